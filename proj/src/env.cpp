#include "polybandit/env.hpp"

#include <cmath>

#include "polybandit/errors.hpp"

namespace polybandit {

std::string to_string(NoiseKind kind)
{
    switch (kind) {
    case NoiseKind::gaussian:
        return "gaussian";
    case NoiseKind::uniform_bounded:
        return "uniform_bounded";
    case NoiseKind::none:
        return "none";
    }
    return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& name)
{
    if (name == "gaussian")
        return NoiseKind::gaussian;
    if (name == "uniform_bounded" || name == "uniform")
        return NoiseKind::uniform_bounded;
    if (name == "none")
        return NoiseKind::none;
    throw ConfigError("unknown noise kind '" + name + "' (expected gaussian, uniform_bounded or none)");
}

double NoiseModel::draw(std::mt19937_64& rng) const
{
    switch (kind) {
    case NoiseKind::gaussian:
        return std::normal_distribution<double>(0.0, R)(rng);
    case NoiseKind::uniform_bounded:
        return std::uniform_real_distribution<double>(-R, R)(rng);
    case NoiseKind::none:
        return 0.0;
    }
    return 0.0;
}

double NoiseModel::draw_sum(std::int64_t count, std::mt19937_64& rng) const
{
    if (count <= 0 || kind == NoiseKind::none)
        return 0.0;
    const double n = static_cast<double>(count);
    if (kind == NoiseKind::gaussian)
        return std::normal_distribution<double>(0.0, R * std::sqrt(n))(rng);
    if (count <= (std::int64_t{1} << 20)) {
        std::uniform_real_distribution<double> unif(-R, R);
        double sum = 0;
        for (std::int64_t i = 0; i < count; ++i)
            sum += unif(rng);
        return sum;
    }
    return std::normal_distribution<double>(0.0, R * std::sqrt(n / 3.0))(rng);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index)
{
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Environment::Environment(Polyhedron<double> poly, Vector<double> theta, NoiseModel noise, std::uint64_t seed)
    : poly_(std::move(poly)), theta_(std::move(theta)), noise_(noise), rng_(split_seed(seed, 0)),
      block_rng_(split_seed(seed, 1))
{
    if (theta_.size() != poly_.dim())
        throw DimensionError("Environment: theta has " + std::to_string(theta_.size()) +
                             " entries, polyhedron dimension is " + std::to_string(poly_.dim()));
    if (!theta_.allFinite() || theta_.cwiseAbs().maxCoeff() > 1.0)
        throw ConfigError("Environment: theta must lie in [-1, 1]^N");
    if (!(noise_.R > 0) && noise_.kind != NoiseKind::none)
        throw ConfigError("Environment: noise R must be positive");

    const auto best = maximize(theta_, poly_);
    const auto worst = maximize(Vector<double>(-theta_), poly_);
    if (best.status != LpStatus::optimal || worst.status != LpStatus::optimal)
        throw GeometryError("Environment: reward is not bounded over the polyhedron");
    optimal_arm_ = best.point;
    optimal_value_ = theta_.dot(optimal_arm_);
    max_reward_ = std::max(std::abs(optimal_value_), std::abs(theta_.dot(worst.point)));
}

void Environment::check_member(const Vector<double>& x) const
{
    if (!contains(poly_, x))
        throw OutsidePolyhedron("pull: arm lies outside the polyhedron (violation " +
                                std::to_string(max_violation(poly_, x)) + ")");
}

double Environment::pull(const Vector<double>& x)
{
    check_member(x);
    return theta_.dot(x) + noise_.draw(rng_);
}

double Environment::pull_block(const Vector<double>& x, std::int64_t count)
{
    check_member(x);
    return static_cast<double>(count) * theta_.dot(x) + noise_.draw_sum(count, block_rng_);
}

double Environment::mean_reward(const Vector<double>& x) const
{
    check_member(x);
    return theta_.dot(x);
}

double Environment::instantaneous_regret(const Vector<double>& x) const
{
    check_member(x);
    return optimal_value_ - theta_.dot(x);
}

}  // namespace polybandit
