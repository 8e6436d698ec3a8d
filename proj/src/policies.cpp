#include "polybandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include "polybandit/errors.hpp"

namespace polybandit {

const std::vector<CycleRecord>& Policy::cycles() const
{
    static const std::vector<CycleRecord> none;
    return none;
}

std::string to_string(PolicyKind kind)
{
    switch (kind) {
    case PolicyKind::see:
        return "see";
    case PolicyKind::see2:
        return "see2";
    case PolicyKind::polylin:
        return "polylin";
    case PolicyKind::general_see:
        return "general_see";
    case PolicyKind::improved_see2:
        return "improved_see2";
    case PolicyKind::ucb_normal:
        return "ucb_normal";
    case PolicyKind::linucb:
        return "linucb";
    case PolicyKind::linucb_disjoint:
        return "linucb_disjoint";
    case PolicyKind::self_normalized:
        return "self_normalized";
    }
    return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name)
{
    for (auto kind : {PolicyKind::see, PolicyKind::see2, PolicyKind::polylin, PolicyKind::general_see,
                      PolicyKind::improved_see2, PolicyKind::ucb_normal, PolicyKind::linucb,
                      PolicyKind::linucb_disjoint, PolicyKind::self_normalized})
        if (to_string(kind) == name)
            return kind;
    throw ConfigError("unknown policy type '" + name + "'");
}

std::int64_t power_block(double exponent, std::int64_t cap)
{
    if (cap < 1)
        cap = 1;
    if (!(exponent > 0))
        return 1;
    if (exponent >= 62)
        return cap;
    std::int64_t length;
    if (exponent == std::floor(exponent))
        length = std::int64_t{1} << static_cast<int>(exponent);
    else
        length = static_cast<std::int64_t>(std::floor(std::exp2(exponent)));
    return std::clamp<std::int64_t>(length, 1, cap);
}

std::int64_t see_block(std::int64_t cycle, double epsilon, std::int64_t cap)
{
    const double c = static_cast<double>(cycle);
    return power_block(c * c / (1.0 + epsilon), cap);
}

std::int64_t see2_block(std::int64_t cycle, std::int64_t cap)
{
    return power_block(static_cast<double>(cycle), cap);
}

std::int64_t polylin_block(double kappa, std::int64_t cycle, std::int64_t cap)
{
    if (!(kappa > 0))
        return 1;
    return power_block(kappa * static_cast<double>(cycle), cap);
}

double estimated_gap(const VertexSet<double>& vertices, const Vector<double>& theta_hat, const Vector<double>& greedy)
{
    double margin = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < vertices.size(); ++j) {
        const Vector<double> diff = greedy - vertices.vertices.col(j);
        if (diff.cwiseAbs().maxCoeff() <= tolerance::dedupe)
            continue;
        margin = std::min(margin, theta_hat.dot(diff));
    }
    return margin;
}

namespace {

std::shared_ptr<const VertexSet<double>> ensure_vertices(const Polyhedron<double>& poly,
                                                         std::shared_ptr<const VertexSet<double>> vertices)
{
    if (vertices)
        return vertices;
    return std::make_shared<const VertexSet<double>>(enumerate_vertices(poly));
}

/// SEE, SEE2, PolyLin, general SEE and Improved-SEE2: explore a fixed set of
/// arms, estimate, then commit to the greedy arm for a growing block.
class PhasedPolicy final : public Policy
{
public:
    PhasedPolicy(const PolicySpec& spec, const Polyhedron<double>& poly,
                 std::shared_ptr<const VertexSet<double>> vertices)
        : Policy(spec.display_name()), spec_(spec), poly_(poly), pooled_(poly.dim()), cycle_est_(poly.dim()),
          cycle_(spec.start_cycle)
    {
        if (spec_.start_cycle < 0)
            throw ConfigError(name() + ": start_cycle must be nonnegative");
        if ((kind() == PolicyKind::see || kind() == PolicyKind::general_see) && !(spec_.epsilon > 0))
            throw ConfigError(name() + ": epsilon must be positive");
        if (kind() == PolicyKind::improved_see2 && !(spec_.lambda > 0 && spec_.lambda <= 1))
            throw ConfigError(name() + ": lambda must lie in (0, 1]");

        const bool from_origin =
            kind() == PolicyKind::see || kind() == PolicyKind::see2 || kind() == PolicyKind::polylin;
        basis_ = exploration_basis(poly_, from_origin);
        initial_basis_ = basis_;

        if (kind() == PolicyKind::polylin) {
            if (!(spec_.R > 0))
                throw ConfigError(name() + ": R must be positive");
            a_const_ = basis_.reaches.cwiseAbs2().minCoeff() / (spec_.R * spec_.R);
            vertices_ = ensure_vertices(poly_, std::move(vertices));
        }
        weighted_sum_ = Vector<double>::Zero(poly_.dim());
        weight_total_ = Vector<double>::Zero(poly_.dim());
    }

    Decision next() override
    {
        if (awaiting_)
            throw std::logic_error(name() + ": next() called before observing the last exploration reward");
        if (slot_ < slot_count()) {
            awaiting_ = true;
            ++steps_;
            ++exploration_steps_;
            return {slot_arm(slot_), Phase::explore, 1};
        }
        return finish_cycle();
    }

    void observe(double reward) override
    {
        if (!awaiting_)
            throw std::logic_error(name() + ": observe() without a pending exploration decision");
        awaiting_ = false;
        const Index axis = slot_axis(slot_);
        if (axis < 0) {
            pooled_.update_anchor(reward);
            cycle_est_.update_anchor(reward);
        } else {
            pooled_.update_axis(axis, reward);
            cycle_est_.update_axis(axis, reward);
        }
        if (++rep_ == plays_per_slot()) {
            rep_ = 0;
            ++slot_;
        }
    }

    const std::vector<CycleRecord>& cycles() const override { return log_; }

private:
    PolicyKind kind() const { return spec_.kind; }

    bool anchor_plays() const
    {
        return kind() == PolicyKind::improved_see2 || (kind() == PolicyKind::general_see && !spec_.linear_system);
    }

    std::int64_t plays_per_slot() const { return kind() == PolicyKind::polylin ? 1 : 2 * cycle_ + 1; }

    Index slot_count() const { return poly_.dim() + (anchor_plays() ? 1 : 0); }

    // -1 denotes the anchor arm, played first
    Index slot_axis(Index slot) const { return anchor_plays() ? slot - 1 : slot; }

    Vector<double> slot_arm(Index slot) const
    {
        const Index axis = slot_axis(slot);
        return axis < 0 ? basis_.anchor : Vector<double>(basis_.arms.col(axis));
    }

    Vector<double> estimate()
    {
        switch (kind()) {
        case PolicyKind::see:
        case PolicyKind::see2:
        case PolicyKind::polylin:
            return estimate_origin(pooled_, basis_);
        case PolicyKind::general_see:
            if (spec_.linear_system)
                return estimate_linear_system(pooled_.arm_means(), basis_.anchor, basis_.reaches);
            return estimate_difference(pooled_, basis_);
        default:
            break;
        }
        // the anchor moves between cycles: combine per-cycle difference
        // estimates with inverse-variance weights (2c+1) z_n^2
        const Vector<double> current = estimate_difference(cycle_est_, basis_);
        const Vector<double> weight = static_cast<double>(plays_per_slot()) * basis_.reaches.cwiseAbs2();
        weighted_sum_ += weight.cwiseProduct(current);
        weight_total_ += weight;
        return weighted_sum_.cwiseQuotient(weight_total_);
    }

    Decision finish_cycle()
    {
        CycleRecord rec;
        rec.cycle = cycle_;
        rec.anchor = basis_.anchor;
        rec.theta_hat = estimate();
        const auto sol = maximize(rec.theta_hat, poly_);
        if (sol.status != LpStatus::optimal)
            throw GeometryError(name() + ": greedy program is " + to_string(sol.status));
        rec.greedy_arm = sol.point;

        switch (kind()) {
        case PolicyKind::see:
        case PolicyKind::general_see:
            rec.exploit_length = see_block(cycle_, spec_.epsilon, spec_.block_cap);
            break;
        case PolicyKind::see2:
        case PolicyKind::improved_see2:
            rec.exploit_length = see2_block(cycle_, spec_.block_cap);
            break;
        default:
            rec.delta_hat = estimated_gap(*vertices_, rec.theta_hat, rec.greedy_arm);
            rec.kappa = a_const_ * rec.delta_hat / 2;
            rec.exploit_length = polylin_block(rec.kappa, cycle_, spec_.block_cap);
            break;
        }
        rec.plays_per_arm = pooled_.count(0);
        rec.exploration_steps = exploration_steps_;
        rec.steps_before_exploit = steps_;
        steps_ += rec.exploit_length;

        Decision out{rec.greedy_arm, Phase::exploit, rec.exploit_length};
        log_.push_back(std::move(rec));

        ++cycle_;
        slot_ = 0;
        rep_ = 0;
        if (kind() == PolicyKind::improved_see2) {
            cycle_est_ = ParameterEstimate<double>(poly_.dim());
            recenter(out.arm);
        }
        return out;
    }

    void recenter(const Vector<double>& greedy)
    {
        const Vector<double> shifted = greedy + spec_.lambda * (initial_basis_.anchor - greedy);
        try {
            basis_ = basis_from_anchor(poly_, shifted);
            basis_.at_origin = false;
        } catch (const GeometryError&) {
            basis_ = initial_basis_;
        }
    }

    PolicySpec spec_;
    Polyhedron<double> poly_;
    std::shared_ptr<const VertexSet<double>> vertices_;
    ExplorationBasis<double> basis_;
    ExplorationBasis<double> initial_basis_;
    ParameterEstimate<double> pooled_;
    ParameterEstimate<double> cycle_est_;
    Vector<double> weighted_sum_;
    Vector<double> weight_total_;
    double a_const_ = 0;
    std::int64_t cycle_;
    Index slot_ = 0;
    std::int64_t rep_ = 0;
    bool awaiting_ = false;
    std::int64_t steps_ = 0;
    std::int64_t exploration_steps_ = 0;
    std::vector<CycleRecord> log_;
};

/// Vertex-armed policy base: remembers the last arm handed out.
class VertexPolicy : public Policy
{
protected:
    VertexPolicy(std::string name, std::shared_ptr<const VertexSet<double>> vertices)
        : Policy(std::move(name)), vertices_(std::move(vertices))
    {
    }

    Decision play(Index arm)
    {
        if (pending_ >= 0)
            throw std::logic_error(name() + ": next() called before observing the last reward");
        pending_ = arm;
        return {vertices_->vertices.col(arm), Phase::explore, 1};
    }

    Index take_pending()
    {
        if (pending_ < 0)
            throw std::logic_error(name() + ": observe() without a pending decision");
        const Index arm = pending_;
        pending_ = -1;
        return arm;
    }

    Index arm_count() const { return vertices_->size(); }
    const Matrix<double>& arms() const { return vertices_->vertices; }

private:
    std::shared_ptr<const VertexSet<double>> vertices_;
    Index pending_ = -1;
};

/// UCB1-Normal over the vertex set: each vertex once, then forced plays of any
/// vertex seen fewer than ceil(8 ln n) times, else the variance-aware index.
class UcbNormal final : public VertexPolicy
{
public:
    UcbNormal(const PolicySpec& spec, std::shared_ptr<const VertexSet<double>> vertices)
        : VertexPolicy(spec.display_name(), std::move(vertices))
    {
        const Index k = arm_count();
        counts_.assign(static_cast<std::size_t>(k), 0);
        means_ = Vector<double>::Zero(k);
        squares_ = Vector<double>::Zero(k);
        spread_ = Vector<double>::Zero(k);
        for (Index j = 0; j < k; ++j)
            by_count_.insert({0, j});
    }

    Decision next() override
    {
        const auto n = plays_;
        if (n < arm_count())
            return play(static_cast<Index>(n));
        const auto threshold = static_cast<std::int64_t>(std::ceil(8.0 * std::log(static_cast<double>(n))));
        const auto least = *by_count_.begin();
        if (least.first < threshold)
            return play(least.second);
        const double scale = std::sqrt(std::log(static_cast<double>(n - 1)));
        Index best = 0;
        (means_ + scale * spread_).maxCoeff(&best);
        return play(best);
    }

    void observe(double reward) override
    {
        const Index arm = take_pending();
        auto& count = counts_[static_cast<std::size_t>(arm)];
        by_count_.erase({count, arm});
        ++count;
        by_count_.insert({count, arm});
        ++plays_;

        const double nj = static_cast<double>(count);
        means_(arm) += (reward - means_(arm)) / nj;
        squares_(arm) += reward * reward;
        if (count >= 2) {
            const double var = std::max(0.0, (squares_(arm) - nj * means_(arm) * means_(arm)) / (nj - 1));
            spread_(arm) = std::sqrt(16.0 * var / nj);
        }
    }

private:
    std::vector<std::int64_t> counts_;
    std::set<std::pair<std::int64_t, Index>> by_count_;
    Vector<double> means_;
    Vector<double> squares_;
    Vector<double> spread_;  ///< sqrt(16 var_j / n_j)
    std::int64_t plays_ = 0;
};

/// Ridge estimate plus an ellipsoidal bonus, maximized over the vertex set.
/// LinUCB uses the fixed width 1 + sqrt(ln(2/delta)/2); the self-normalized
/// baseline uses R sqrt(2 ln(det(V)^(1/2) lambda^(-N/2) / delta)) + sqrt(lambda) S.
class OptimisticLinear final : public VertexPolicy
{
public:
    OptimisticLinear(const PolicySpec& spec, std::shared_ptr<const VertexSet<double>> vertices)
        : VertexPolicy(spec.display_name(), std::move(vertices)), self_normalized_(spec.kind == PolicyKind::self_normalized),
          lambda_(spec.regularization), delta_(spec.delta), R_(spec.R)
    {
        if (!(lambda_ > 0))
            throw ConfigError(name() + ": regularization must be positive");
        if (!(delta_ > 0 && delta_ < 1))
            throw ConfigError(name() + ": delta must lie in (0, 1)");
        if (self_normalized_ && !(R_ > 0))
            throw ConfigError(name() + ": R must be positive");
        const Index n = arms().rows();
        design_ = lambda_ * Matrix<double>::Identity(n, n);
        response_ = Vector<double>::Zero(n);
        bound_ = std::sqrt(static_cast<double>(n));
        refresh();
    }

    Decision next() override
    {
        Index best = 0;
        const double width = radius();
        (arms().transpose() * theta_hat_ + width * quad_.cwiseMax(0.0).cwiseSqrt()).maxCoeff(&best);
        return play(best);
    }

    void observe(double reward) override
    {
        const Index arm = take_pending();
        const Vector<double> x = arms().col(arm);
        design_.noalias() += x * x.transpose();
        response_ += reward * x;
        if (++updates_ % 4096 == 0) {
            refresh();
            return;
        }
        // Sherman-Morrison
        const Vector<double> u = inverse_ * x;
        const double denom = 1.0 + x.dot(u);
        inverse_.noalias() -= (u * u.transpose()) / denom;
        const Vector<double> proj = arms().transpose() * u;
        quad_ -= proj.cwiseAbs2() / denom;
        log_det_ += std::log(denom);
        theta_hat_ = inverse_ * response_;
    }

private:
    double radius() const
    {
        if (!self_normalized_)
            return 1.0 + std::sqrt(std::log(2.0 / delta_) / 2.0);
        const double n = static_cast<double>(arms().rows());
        const double inside = log_det_ - n * std::log(lambda_) + 2.0 * std::log(1.0 / delta_);
        return R_ * std::sqrt(std::max(0.0, inside)) + std::sqrt(lambda_) * bound_;
    }

    void refresh()
    {
        const Index n = arms().rows();
        const Eigen::LDLT<Matrix<double>> ldlt(design_);
        inverse_ = ldlt.solve(Matrix<double>::Identity(n, n));
        log_det_ = ldlt.vectorD().array().log().sum();
        quad_ = (arms().array() * (inverse_ * arms()).array()).colwise().sum().transpose();
        theta_hat_ = inverse_ * response_;
    }

    bool self_normalized_;
    double lambda_;
    double delta_;
    double R_;
    double bound_ = 1;  ///< S >= ||theta||_2, sqrt(N) for theta in [-1, 1]^N
    Matrix<double> design_;
    Matrix<double> inverse_;
    Vector<double> response_;
    Vector<double> theta_hat_;
    Vector<double> quad_;  ///< v_k' V^{-1} v_k per vertex
    double log_det_ = 0;
    std::int64_t updates_ = 0;
};

/// LinUCB with one ridge model per vertex. The feature of vertex v is v itself,
/// so A_v = I + n_v v v' and both terms of the index have closed forms.
class DisjointLinUcb final : public VertexPolicy
{
public:
    DisjointLinUcb(const PolicySpec& spec, std::shared_ptr<const VertexSet<double>> vertices)
        : VertexPolicy(spec.display_name(), std::move(vertices)), delta_(spec.delta)
    {
        if (!(delta_ > 0 && delta_ < 1))
            throw ConfigError(name() + ": delta must lie in (0, 1)");
        norms_ = arms().colwise().squaredNorm().transpose();
        counts_ = Vector<double>::Zero(arm_count());
        sums_ = Vector<double>::Zero(arm_count());
        alpha_ = 1.0 + std::sqrt(std::log(2.0 / delta_) / 2.0);
    }

    Decision next() override
    {
        // v' A^{-1} v = |v|^2 / (1 + n |v|^2),  theta_v' v = (sum r) v' A^{-1} v
        const Vector<double> quad = norms_.array() / (1.0 + counts_.array() * norms_.array());
        Index best = 0;
        (sums_.cwiseProduct(quad) + alpha_ * quad.cwiseSqrt()).maxCoeff(&best);
        return play(best);
    }

    void observe(double reward) override
    {
        const Index arm = take_pending();
        counts_(arm) += 1;
        sums_(arm) += reward;
    }

private:
    double delta_;
    double alpha_ = 1;
    Vector<double> norms_;
    Vector<double> counts_;
    Vector<double> sums_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const Polyhedron<double>& poly,
                                    std::shared_ptr<const VertexSet<double>> vertices)
{
    switch (spec.kind) {
    case PolicyKind::ucb_normal:
        return std::make_unique<UcbNormal>(spec, ensure_vertices(poly, std::move(vertices)));
    case PolicyKind::linucb_disjoint:
        return std::make_unique<DisjointLinUcb>(spec, ensure_vertices(poly, std::move(vertices)));
    case PolicyKind::linucb:
    case PolicyKind::self_normalized:
        return std::make_unique<OptimisticLinear>(spec, ensure_vertices(poly, std::move(vertices)));
    default:
        return std::make_unique<PhasedPolicy>(spec, poly, std::move(vertices));
    }
}

}  // namespace polybandit
