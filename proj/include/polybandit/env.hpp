#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "polybandit/polytope.hpp"

namespace polybandit {

enum class NoiseKind { gaussian, uniform_bounded, none };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

/// Zero-mean reward noise. Gaussian draws have standard deviation R, bounded
/// draws are uniform on [-R, R]; both are R-sub-Gaussian.
struct NoiseModel
{
    NoiseKind kind = NoiseKind::gaussian;
    double R = 1.0;

    double draw(std::mt19937_64& rng) const;
    /// Sum of `count` independent draws. Exact for gaussian; bounded noise is
    /// summed draw by draw up to 2^20 terms and by a matched normal beyond.
    double draw_sum(std::int64_t count, std::mt19937_64& rng) const;
};

/// splitmix64 finalizer applied to (master, index): independent per-run seeds.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

/// Hidden parameter, arm set and noise of one run. Owns its random streams, so
/// an instance is single-threaded; distinct instances may run concurrently.
class Environment
{
public:
    Environment(Polyhedron<double> poly, Vector<double> theta, NoiseModel noise, std::uint64_t seed);

    /// theta'x plus fresh noise; the arm must lie in the polyhedron.
    double pull(const Vector<double>& x);

    /// Sum of `count` rewards of arm x drawn from a second stream, so that
    /// sampling exploitation blocks leaves the exploration stream untouched.
    double pull_block(const Vector<double>& x, std::int64_t count);

    double mean_reward(const Vector<double>& x) const;
    /// optimal_value - theta'x for a member arm.
    double instantaneous_regret(const Vector<double>& x) const;

    const Polyhedron<double>& poly() const { return poly_; }
    const Vector<double>& theta() const { return theta_; }
    const NoiseModel& noise() const { return noise_; }
    const Vector<double>& optimal_arm() const { return optimal_arm_; }
    double optimal_value() const { return optimal_value_; }
    /// max |theta'x| over the polyhedron.
    double max_reward() const { return max_reward_; }

private:
    void check_member(const Vector<double>& x) const;

    Polyhedron<double> poly_;
    Vector<double> theta_;
    NoiseModel noise_;
    std::mt19937_64 rng_;
    std::mt19937_64 block_rng_;
    Vector<double> optimal_arm_;
    double optimal_value_ = 0;
    double max_reward_ = 0;
};

}  // namespace polybandit
