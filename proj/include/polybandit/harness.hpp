#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "polybandit/env.hpp"
#include "polybandit/policies.hpp"

namespace polybandit {

/// A fully resolved experiment: concrete polyhedron and theta.
struct Experiment
{
    explicit Experiment(Polyhedron<double> arm_set) : poly(std::move(arm_set)) {}

    Polyhedron<double> poly;
    Vector<double> theta;
    NoiseModel noise;
    std::vector<PolicySpec> policies;
    std::int64_t horizon = 200000;
    int runs = 10;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> checkpoints;  ///< empty: geometric grid
    int per_decade = 40;
    bool realized_regret = false;
};

struct TracePoint
{
    std::int64_t t = 0;
    double pseudo_regret = 0;
    double realized_regret = std::numeric_limits<double>::quiet_NaN();
};

struct RegretTrace
{
    std::string policy;
    int run = 0;
    std::vector<TracePoint> points;
    std::vector<CycleRecord> cycles;
};

/// Cumulative sum of per-step regrets kept as (value -> step count) and summed
/// in ascending value order, so a block of L steps and L single steps give
/// bit-identical totals.
class RegretLedger
{
public:
    void add(double regret, std::int64_t steps) { counts_[regret] += steps; }
    double total() const;

private:
    std::map<double, std::int64_t> counts_;
};

/// round(10^(k / per_decade)) for k = 0, 1, ..., deduplicated, ending at T.
std::vector<std::int64_t> geometric_checkpoints(std::int64_t horizon, int per_decade = 40);

/// Strictly increasing, >= 1, last <= horizon.
void validate_checkpoints(const std::vector<std::int64_t>& checkpoints, std::int64_t horizon);

/// Drives one policy against one freshly seeded environment for `horizon`
/// steps, block by block.
RegretTrace run_single(const Experiment& exp, const PolicySpec& spec, int run,
                       std::shared_ptr<const VertexSet<double>> vertices,
                       const std::vector<std::int64_t>& checkpoints);

/// Every (policy, run) pair, ordered policy-major. Runs with the same index
/// share the environment seed across policies. Rejects zero-gap instances
/// before any run.
std::vector<RegretTrace> run_experiment(const Experiment& exp, int parallel = 1);

struct PolicySummary
{
    std::string policy;
    std::vector<std::int64_t> t;
    std::vector<double> mean;
    std::vector<double> std;  ///< sample standard deviation, 0 for a single run
    std::vector<double> realized_mean;
};

std::vector<PolicySummary> summarize(const std::vector<RegretTrace>& traces);

/// (N-1) Delta / max_k KL(theta*, theta_k) * ln T with Gaussian KL
/// (mu1 - mu2)^2 / (2 R^2), over the arms {e_n} and the zero arm.
double lower_bound_slope(const Vector<double>& theta, double R);
std::vector<double> lower_bound_curve(const Vector<double>& theta, double R, const std::vector<std::int64_t>& Ts);

/// CSV columns: policy,run,t,pseudo_regret[,realized_regret].
void write_traces_csv(std::ostream& out, const std::vector<RegretTrace>& traces, bool realized);

}  // namespace polybandit
