#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "polybandit/estimators.hpp"
#include "polybandit/polytope.hpp"

namespace polybandit {

enum class Phase { explore, exploit };

/// `block_length` consecutive plays of `arm`. Explore decisions always cover a
/// single play and expect one observe() call before the next decision.
struct Decision
{
    Vector<double> arm;
    Phase phase = Phase::explore;
    std::int64_t block_length = 1;
};

/// Snapshot taken when a cycle's exploitation block is emitted.
struct CycleRecord
{
    std::int64_t cycle = 0;
    Vector<double> anchor;
    Vector<double> theta_hat;
    Vector<double> greedy_arm;
    double delta_hat = std::numeric_limits<double>::quiet_NaN();
    double kappa = std::numeric_limits<double>::quiet_NaN();
    std::int64_t exploit_length = 0;
    std::int64_t plays_per_arm = 0;      ///< cumulative plays of each exploration arm
    std::int64_t exploration_steps = 0;  ///< cumulative, all arms
    std::int64_t steps_before_exploit = 0;
};

class Policy
{
public:
    virtual ~Policy() = default;

    const std::string& name() const { return name_; }
    virtual Decision next() = 0;
    /// Reward of the last explore decision.
    virtual void observe(double reward) = 0;
    virtual const std::vector<CycleRecord>& cycles() const;

protected:
    explicit Policy(std::string name) : name_(std::move(name)) {}

private:
    std::string name_;
};

enum class PolicyKind {
    see,
    see2,
    polylin,
    general_see,
    improved_see2,
    ucb_normal,
    linucb,
    linucb_disjoint,
    self_normalized
};

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

inline constexpr std::int64_t default_block_cap = std::int64_t{1} << 62;

struct PolicySpec
{
    PolicyKind kind = PolicyKind::see;
    std::string name;           ///< defaults to to_string(kind)
    double epsilon = 0.3;       ///< SEE / general SEE
    double lambda = 0.1;        ///< Improved-SEE2 shift toward the initial anchor
    std::int64_t start_cycle = 5;
    double R = 1.0;             ///< PolyLin and the self-normalized baseline
    double delta = 0.001;       ///< baseline confidence
    double regularization = 1.0;
    bool linear_system = false;  ///< general SEE without anchor plays
    std::int64_t block_cap = default_block_cap;

    std::string display_name() const { return name.empty() ? to_string(kind) : name; }
};

/// floor(2^exponent) clamped to [1, cap]; exact when the exponent is integral.
std::int64_t power_block(double exponent, std::int64_t cap = default_block_cap);
/// SEE: floor(2^(c^2 / (1 + epsilon))).
std::int64_t see_block(std::int64_t cycle, double epsilon, std::int64_t cap = default_block_cap);
/// SEE2: 2^c.
std::int64_t see2_block(std::int64_t cycle, std::int64_t cap = default_block_cap);
/// PolyLin: max(1, floor(2^(kappa c))); 1 when kappa <= 0.
std::int64_t polylin_block(double kappa, std::int64_t cycle, std::int64_t cap = default_block_cap);

/// min over vertices v != greedy of theta_hat'(greedy - v).
double estimated_gap(const VertexSet<double>& vertices, const Vector<double>& theta_hat,
                     const Vector<double>& greedy);

/// Builds a policy. `vertices` is required by PolyLin and the baselines; when
/// null it is enumerated here.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const Polyhedron<double>& poly,
                                    std::shared_ptr<const VertexSet<double>> vertices = nullptr);

}  // namespace polybandit
