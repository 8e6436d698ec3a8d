#include "polybandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "polybandit/errors.hpp"

namespace polybandit {

double RegretLedger::total() const
{
    double sum = 0;
    for (const auto& [value, steps] : counts_)
        sum += value * static_cast<double>(steps);
    return sum;
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t horizon, int per_decade)
{
    if (horizon < 1)
        throw ConfigError("checkpoints: horizon must be at least 1");
    if (per_decade < 1)
        throw ConfigError("checkpoints: need at least one point per decade");
    std::vector<std::int64_t> grid;
    for (int k = 0;; ++k) {
        const auto t = static_cast<std::int64_t>(std::llround(std::pow(10.0, static_cast<double>(k) / per_decade)));
        if (t >= horizon)
            break;
        if (grid.empty() || t > grid.back())
            grid.push_back(t);
    }
    grid.push_back(horizon);
    return grid;
}

void validate_checkpoints(const std::vector<std::int64_t>& checkpoints, std::int64_t horizon)
{
    if (checkpoints.empty())
        throw ConfigError("checkpoints: list is empty");
    if (checkpoints.front() < 1)
        throw ConfigError("checkpoints: values must be at least 1");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1])
            throw ConfigError("checkpoints: values must be strictly increasing");
    if (checkpoints.back() > horizon)
        throw ConfigError("checkpoints: last value " + std::to_string(checkpoints.back()) + " exceeds horizon " +
                          std::to_string(horizon));
}

namespace {

bool needs_vertices(const PolicySpec& spec)
{
    return spec.kind == PolicyKind::polylin || spec.kind == PolicyKind::ucb_normal ||
           spec.kind == PolicyKind::linucb || spec.kind == PolicyKind::linucb_disjoint ||
           spec.kind == PolicyKind::self_normalized;
}

}  // namespace

RegretTrace run_single(const Experiment& exp, const PolicySpec& spec, int run,
                       std::shared_ptr<const VertexSet<double>> vertices,
                       const std::vector<std::int64_t>& checkpoints)
{
    Environment env(exp.poly, exp.theta, exp.noise, split_seed(exp.seed, static_cast<std::uint64_t>(run)));
    auto policy = make_policy(spec, exp.poly, std::move(vertices));

    RegretTrace trace;
    trace.policy = policy->name();
    trace.run = run;
    trace.points.reserve(checkpoints.size());

    RegretLedger ledger;
    double reward_sum = 0;
    std::int64_t t = 0;
    std::size_t next_cp = 0;
    const std::int64_t T = exp.horizon;

    auto record = [&] {
        while (next_cp < checkpoints.size() && checkpoints[next_cp] == t) {
            TracePoint p;
            p.t = t;
            p.pseudo_regret = ledger.total();
            if (exp.realized_regret)
                p.realized_regret = static_cast<double>(t) * env.optimal_value() - reward_sum;
            trace.points.push_back(p);
            ++next_cp;
        }
    };

    while (t < T) {
        const Decision d = policy->next();
        // no arm beats the optimum; clamp rounding residue
        const double regret = std::max(0.0, env.instantaneous_regret(d.arm));
        if (d.phase == Phase::explore) {
            if (d.block_length != 1)
                throw std::logic_error(policy->name() + ": exploration decisions cover a single play");
            const double reward = env.pull(d.arm);
            policy->observe(reward);
            reward_sum += reward;
            ledger.add(regret, 1);
            ++t;
            record();
            continue;
        }
        // exploitation rewards are never read by the policy; they are only
        // sampled when realized regret is requested
        std::int64_t left = std::min(d.block_length, T - t);
        while (left > 0) {
            std::int64_t seg = left;
            if (next_cp < checkpoints.size())
                seg = std::min(seg, checkpoints[next_cp] - t);
            ledger.add(regret, seg);
            if (exp.realized_regret)
                reward_sum += env.pull_block(d.arm, seg);
            t += seg;
            left -= seg;
            record();
        }
    }
    trace.cycles = policy->cycles();
    return trace;
}

std::vector<RegretTrace> run_experiment(const Experiment& exp, int parallel)
{
    if (exp.horizon < 1)
        throw ConfigError("experiment: horizon must be at least 1");
    if (exp.runs < 1)
        throw ConfigError("experiment: runs must be at least 1");
    if (exp.policies.empty())
        throw ConfigError("experiment: no policies configured");

    const auto checkpoints =
        exp.checkpoints.empty() ? geometric_checkpoints(exp.horizon, exp.per_decade) : exp.checkpoints;
    validate_checkpoints(checkpoints, exp.horizon);

    auto vertices = std::make_shared<const VertexSet<double>>(enumerate_vertices(exp.poly));
    gap(*vertices, exp.theta);  // throws TiedOptimum
    // validate every policy once before spending time on runs
    for (const auto& spec : exp.policies)
        make_policy(spec, exp.poly, needs_vertices(spec) ? vertices : nullptr);

    const std::size_t runs = static_cast<std::size_t>(exp.runs);
    const std::size_t jobs = exp.policies.size() * runs;
    std::vector<RegretTrace> traces(jobs);
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t job = cursor.fetch_add(1);
            if (job >= jobs)
                return;
            const auto& spec = exp.policies[job / runs];
            try {
                traces[job] = run_single(exp, spec, static_cast<int>(job % runs),
                                         needs_vertices(spec) ? vertices : nullptr, checkpoints);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                cursor = jobs;
            }
        }
    };

    const int threads = std::max(1, std::min<int>(parallel, static_cast<int>(jobs)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return traces;
}

std::vector<PolicySummary> summarize(const std::vector<RegretTrace>& traces)
{
    std::vector<PolicySummary> out;
    std::vector<std::vector<const RegretTrace*>> groups;
    for (const auto& trace : traces) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.policy == trace.policy; });
        if (it == out.end()) {
            out.push_back({trace.policy, {}, {}, {}, {}});
            groups.emplace_back();
            it = out.end() - 1;
        }
        groups[static_cast<std::size_t>(it - out.begin())].push_back(&trace);
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        const auto& group = groups[g];
        const std::size_t points = group.front()->points.size();
        for (const auto* trace : group)
            if (trace->points.size() != points)
                throw std::invalid_argument("summarize: traces of " + out[g].policy + " have different checkpoints");
        const double n = static_cast<double>(group.size());
        for (std::size_t k = 0; k < points; ++k) {
            double sum = 0;
            double realized = 0;
            for (const auto* trace : group) {
                sum += trace->points[k].pseudo_regret;
                realized += trace->points[k].realized_regret;
            }
            const double mean = sum / n;
            double sq = 0;
            for (const auto* trace : group) {
                const double d = trace->points[k].pseudo_regret - mean;
                sq += d * d;
            }
            out[g].t.push_back(group.front()->points[k].t);
            out[g].mean.push_back(mean);
            out[g].std.push_back(group.size() > 1 ? std::sqrt(sq / (n - 1)) : 0.0);
            if (!std::isnan(realized))
                out[g].realized_mean.push_back(realized / n);
        }
    }
    return out;
}

double lower_bound_slope(const Vector<double>& theta, double R)
{
    if (!(R > 0))
        throw ConfigError("lower bound: R must be positive");
    const Index n = theta.size();
    if (n < 1)
        throw DimensionError("lower bound: theta is empty");
    Index star = 0;
    for (Index k = 1; k < n; ++k)
        if (theta(k) > theta(star))
            star = k;
    const double top = theta(star);
    for (Index k = 0; k < n; ++k)
        if (k != star && theta(k) == top)
            throw TiedOptimum("lower bound: maximal coordinate of theta is not unique");
    if (!(top > 0))
        throw ConfigError("lower bound: the zero arm is optimal when max theta <= 0");

    double runner_up = 0;  // the zero arm
    double max_kl = top * top / (2 * R * R);
    for (Index k = 0; k < n; ++k) {
        if (k == star)
            continue;
        runner_up = std::max(runner_up, theta(k));
        const double d = top - theta(k);
        max_kl = std::max(max_kl, d * d / (2 * R * R));
    }
    const double delta = top - runner_up;
    return static_cast<double>(n - 1) * delta / max_kl;
}

std::vector<double> lower_bound_curve(const Vector<double>& theta, double R, const std::vector<std::int64_t>& Ts)
{
    const double slope = lower_bound_slope(theta, R);
    std::vector<double> curve;
    curve.reserve(Ts.size());
    for (auto T : Ts) {
        if (T < 1)
            throw ConfigError("lower bound: T must be at least 1");
        curve.push_back(slope * std::log(static_cast<double>(T)));
    }
    return curve;
}

void write_traces_csv(std::ostream& out, const std::vector<RegretTrace>& traces, bool realized)
{
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "policy,run,t,pseudo_regret";
    if (realized)
        out << ",realized_regret";
    out << '\n';
    for (const auto& trace : traces) {
        for (const auto& p : trace.points) {
            out << trace.policy << ',' << trace.run << ',' << p.t << ',' << p.pseudo_regret;
            if (realized)
                out << ',' << p.realized_regret;
            out << '\n';
        }
    }
    out.precision(old_precision);
}

}  // namespace polybandit
