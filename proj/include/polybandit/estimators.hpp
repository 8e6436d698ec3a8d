#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "polybandit/errors.hpp"
#include "polybandit/polytope.hpp"
#include "polybandit/types.hpp"

namespace polybandit {

/// Running reward means and play counts per exploration arm, plus the anchor
/// arm for the difference estimator. Means are updated incrementally, so
/// repeated identical rewards keep the mean exact.
template <typename Scalar = double>
class ParameterEstimate
{
public:
    explicit ParameterEstimate(Index dim)
        : means_(Vector<Scalar>::Zero(dim)), counts_(static_cast<std::size_t>(dim), 0)
    {
    }

    void update_axis(Index axis, Scalar reward)
    {
        check_axis(axis);
        const auto c = ++counts_[static_cast<std::size_t>(axis)];
        means_(axis) += (reward - means_(axis)) / static_cast<Scalar>(c);
    }

    void update_anchor(Scalar reward)
    {
        ++anchor_count_;
        anchor_mean_ += (reward - anchor_mean_) / static_cast<Scalar>(anchor_count_);
    }

    Index dim() const { return means_.size(); }
    /// Zero for arms without plays.
    const Vector<Scalar>& running_means() const { return means_; }
    std::int64_t count(Index axis) const
    {
        check_axis(axis);
        return counts_[static_cast<std::size_t>(axis)];
    }
    const std::vector<std::int64_t>& counts() const { return counts_; }
    std::int64_t anchor_count() const { return anchor_count_; }

    /// Per-arm sample means; throws when some arm has no plays.
    const Vector<Scalar>& arm_means() const
    {
        for (Index n = 0; n < dim(); ++n) {
            const auto c = counts_[static_cast<std::size_t>(n)];
            if (c <= 0)
                throw EstimatorError("estimate: axis " + std::to_string(n) + " has no plays");
        }
        return means_;
    }

    Scalar anchor_mean() const
    {
        if (anchor_count_ <= 0)
            throw EstimatorError("estimate: anchor arm has no plays");
        return anchor_mean_;
    }

private:
    void check_axis(Index axis) const
    {
        if (axis < 0 || axis >= dim())
            throw DimensionError("ParameterEstimate: axis " + std::to_string(axis) + " out of range [0, " +
                                 std::to_string(dim()) + ")");
    }

    Vector<Scalar> means_;
    std::vector<std::int64_t> counts_;
    Scalar anchor_mean_ = 0;
    std::int64_t anchor_count_ = 0;
};

/// theta_n = mean_n / z_n: the sample mean of arm z_n e_n scaled
/// back to a coordinate. Requires an origin-anchored basis.
template <typename Scalar>
Vector<Scalar> estimate_origin(const ParameterEstimate<Scalar>& est, const ExplorationBasis<Scalar>& basis)
{
    if (basis.dim() != est.dim())
        throw DimensionError("estimate_origin: basis dimension mismatch");
    if (!basis.anchor.isZero(0))
        throw EstimatorError("estimate_origin: basis is not anchored at the origin");
    return est.arm_means().cwiseQuotient(basis.reaches);
}

/// theta_n = (mean(anchor + z_n e_n) - mean(anchor)) / z_n.
template <typename Scalar>
Vector<Scalar> estimate_difference(const ParameterEstimate<Scalar>& est, const ExplorationBasis<Scalar>& basis)
{
    if (basis.dim() != est.dim())
        throw DimensionError("estimate_difference: basis dimension mismatch");
    const Scalar anchor = est.anchor_mean();
    return (est.arm_means().array() - anchor).matrix().cwiseQuotient(basis.reaches);
}

/// Solves (1 anchor' + diag(alphas)) theta = mean_rewards, the system obeyed by
/// the mean rewards of arms anchor + alphas_n e_n when no anchor plays exist.
template <typename Scalar>
Vector<Scalar> estimate_linear_system(const Vector<Scalar>& mean_rewards, const Vector<Scalar>& anchor,
                                      const Vector<Scalar>& alphas,
                                      Scalar max_condition = Scalar(tolerance::singular_condition))
{
    const Index n = anchor.size();
    if (mean_rewards.size() != n || alphas.size() != n)
        throw DimensionError("estimate_linear_system: dimension mismatch");
    if ((alphas.array() == Scalar(0)).any())
        throw SingularSystem("estimate_linear_system: zero step length");
    Matrix<Scalar> system = Vector<Scalar>::Ones(n) * anchor.transpose();
    system.diagonal() += alphas;
    const Eigen::JacobiSVD<Matrix<Scalar>> svd(system);
    const auto& sv = svd.singularValues();
    if (!(sv(n - 1) > 0) || sv(0) / sv(n - 1) > max_condition)
        throw SingularSystem("estimate_linear_system: condition number exceeds guard");
    return system.partialPivLu().solve(mean_rewards);
}

}  // namespace polybandit
