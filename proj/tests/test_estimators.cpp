#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polybandit/estimators.hpp"
#include "polybandit/generators.hpp"

using namespace polybandit;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using test_oracles::vec;

namespace {

ExplorationBasis<double> origin_basis(const VectorXd& reaches)
{
    ExplorationBasis<double> basis;
    basis.anchor = VectorXd::Zero(reaches.size());
    basis.reaches = reaches;
    basis.arms = MatrixXd(reaches.asDiagonal());
    basis.at_origin = true;
    return basis;
}

}  // namespace

TEST_CASE("update_axis tracks means and counts")
{
    ParameterEstimate<double> est(3);
    est.update_axis(1, 0.7);
    CHECK(est.running_means() == vec({0, 0.7, 0}));
    CHECK(est.count(1) == 1);
    CHECK(est.count(0) == 0);

    ParameterEstimate<double> twice(3);
    twice.update_axis(1, 0.5);
    twice.update_axis(1, 0.7);
    CHECK(twice.running_means()(1) == Catch::Approx(0.6));

    ParameterEstimate<double> repeated(1);
    for (int k = 0; k < 1001; ++k)
        repeated.update_axis(0, 0.3);
    CHECK(repeated.arm_means()(0) == 0.3);
    CHECK(twice.count(1) == 2);

    CHECK_THROWS_AS(est.update_axis(3, 1.0), DimensionError);
    CHECK_THROWS_AS(est.update_axis(-1, 1.0), DimensionError);
}

TEST_CASE("estimate_origin")
{
    ParameterEstimate<double> est(2);
    est.update_axis(0, 0.5);
    est.update_axis(0, 0.7);
    est.update_axis(1, 0.1);
    CHECK(estimate_origin(est, origin_basis(vec({1, 1})))(0) == Catch::Approx(0.6));

    ParameterEstimate<double> single(1);
    single.update_axis(0, 1.0);
    CHECK(estimate_origin(single, origin_basis(vec({2})))(0) == 0.5);

    // noiseless rewards of z_n e_n recover theta exactly for any counts
    const VectorXd theta = vec({0.2, -0.4});
    const VectorXd reaches = vec({1.0, 2.5});
    ParameterEstimate<double> exact(2);
    for (int k = 0; k < 7; ++k)
        exact.update_axis(0, theta(0) * reaches(0));
    for (int k = 0; k < 3; ++k)
        exact.update_axis(1, theta(1) * reaches(1));
    CHECK((estimate_origin(exact, origin_basis(reaches)) - theta).cwiseAbs().maxCoeff() < 1e-15);

    ParameterEstimate<double> empty(2);
    empty.update_axis(0, 1.0);
    CHECK_THROWS_AS(estimate_origin(empty, origin_basis(vec({1, 1}))), EstimatorError);

    auto shifted = origin_basis(vec({1, 1}));
    shifted.anchor = vec({0.1, 0.1});
    CHECK_THROWS_AS(estimate_origin(exact, shifted), EstimatorError);
}

TEST_CASE("estimate_difference")
{
    SECTION("arithmetic")
    {
        auto basis = origin_basis(vec({2}));
        basis.anchor = vec({0.3});
        ParameterEstimate<double> est(1);
        est.update_anchor(1.0);
        est.update_axis(0, 1.6);
        CHECK(estimate_difference(est, basis)(0) == Catch::Approx(0.3));
    }
    SECTION("noiseless recovery on a polygon with an interior anchor")
    {
        MatrixXd A(3, 2);
        A << -1, 0, 0, -1, 1, 1;
        const Polyhedron<double> tri(A, vec({0, 0, 2}));
        const auto basis = exploration_basis(tri, false);
        const VectorXd theta = vec({0.3, 0.7});
        ParameterEstimate<double> est(2);
        est.update_anchor(theta.dot(basis.anchor));
        for (Index n = 0; n < 2; ++n)
            est.update_axis(n, theta.dot(basis.arms.col(n)));
        CHECK((estimate_difference(est, basis) - theta).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("gaussian error stays inside five standard deviations")
    {
        const auto square = make_box<double>(2, 0.0, 1.0);
        const auto basis = exploration_basis(square, false);
        const VectorXd theta = vec({0.3, 0.7});
        const int plays = 10000;
        const int runs = 200;
        std::mt19937_64 rng(5);
        std::normal_distribution<double> noise(0.0, 1.0);
        int inside = 0;
        for (int r = 0; r < runs; ++r) {
            ParameterEstimate<double> est(2);
            for (int k = 0; k < plays; ++k) {
                est.update_anchor(theta.dot(basis.anchor) + noise(rng));
                for (Index n = 0; n < 2; ++n)
                    est.update_axis(n, theta.dot(basis.arms.col(n)) + noise(rng));
            }
            const VectorXd err = (estimate_difference(est, basis) - theta).cwiseAbs();
            bool ok = true;
            for (Index n = 0; n < 2; ++n)
                ok = ok && err(n) <= 5 * std::sqrt(2.0 / plays) / basis.reaches(n);
            inside += ok;
        }
        CHECK(inside >= 0.99 * runs);
    }
    SECTION("missing anchor plays")
    {
        ParameterEstimate<double> est(1);
        est.update_axis(0, 1.0);
        CHECK_THROWS_AS(estimate_difference(est, origin_basis(vec({1}))), EstimatorError);
    }
}

TEST_CASE("estimate_linear_system")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 4;
        VectorXd anchor(n), alphas(n), theta(n);
        for (Index k = 0; k < n; ++k) {
            anchor(k) = unit(rng);
            alphas(k) = 0.2 + std::abs(unit(rng));
            theta(k) = unit(rng);
        }
        // mean reward of arm anchor + alpha_n e_n, built coordinate by coordinate
        VectorXd rewards(n);
        for (Index k = 0; k < n; ++k) {
            double r = 0;
            for (Index j = 0; j < n; ++j)
                r += theta(j) * anchor(j);
            rewards(k) = r + alphas(k) * theta(k);
        }
        try {
            CHECK((estimate_linear_system(rewards, anchor, alphas) - theta).cwiseAbs().maxCoeff() < 1e-9);
        } catch (const SingularSystem&) {
            // 1 + sum(anchor / alphas) near zero makes the system singular
            double det_factor = 1;
            for (Index k = 0; k < n; ++k)
                det_factor += anchor(k) / alphas(k);
            CHECK(std::abs(det_factor) < 1e-6);
        }
    }

    // zero anchor reduces to the origin estimator
    const VectorXd reaches = vec({0.5, 2.0, 1.5});
    ParameterEstimate<double> est(3);
    est.update_axis(0, 0.31);
    est.update_axis(0, 0.12);
    est.update_axis(1, -0.9);
    est.update_axis(2, 0.44);
    const VectorXd direct = estimate_linear_system(est.arm_means(), VectorXd(VectorXd::Zero(3)), reaches);
    CHECK((direct - estimate_origin(est, origin_basis(reaches))).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(estimate_linear_system(vec({1, 1}), vec({0, 0}), vec({1, 0})), SingularSystem);
    // 1 + sum(anchor / alpha) = 0
    CHECK_THROWS_AS(estimate_linear_system(vec({1, 1}), vec({-1, 0}), vec({1, 1})), SingularSystem);
    CHECK_THROWS_AS(estimate_linear_system(vec({1}), vec({0, 0}), vec({1, 1})), DimensionError);
}

TEST_CASE("tail frequency after c^2 plays respects the sub-Gaussian bound")
{
    // one axis, reach 1, R = 1
    const int c = 3;
    const double delta = 0.6;
    const int trials = 10000;
    const double theta = 0.4;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> noise(0.0, 1.0);
    int misses = 0;
    for (int t = 0; t < trials; ++t) {
        ParameterEstimate<double> est(1);
        for (int k = 0; k < c * c; ++k)
            est.update_axis(0, theta + noise(rng));
        misses += std::abs(estimate_origin(est, origin_basis(vec({1})))(0) - theta) > delta;
    }
    const double bound = 2 * std::exp(-c * c * delta * delta / 2);
    CHECK(bound == Catch::Approx(2 * std::exp(-1.62)));
    const double freq = static_cast<double>(misses) / trials;
    CHECK(freq <= bound + 3 * std::sqrt(bound * (1 - bound) / trials));
}

TEST_CASE("sup-norm tail frequency respects the union bound")
{
    const Index n = 3;
    const int c = 4;
    const double eta = 0.5;
    const double R = 1.0;
    const VectorXd reaches = vec({1.0, 0.8, 1.2});
    const double a = reaches.cwiseAbs2().minCoeff() / (R * R);
    const VectorXd theta = vec({0.1, -0.5, 0.9});
    const int trials = 10000;
    std::mt19937_64 rng(77);
    std::normal_distribution<double> noise(0.0, R);
    int misses = 0;
    for (int t = 0; t < trials; ++t) {
        ParameterEstimate<double> est(n);
        for (Index k = 0; k < n; ++k)
            for (int j = 0; j < c * c; ++j)
                est.update_axis(k, theta(k) * reaches(k) + noise(rng));
        misses += (estimate_origin(est, origin_basis(reaches)) - theta).cwiseAbs().maxCoeff() > eta;
    }
    const double bound = std::min(1.0, 2 * n * std::exp(-c * c * eta * eta * a));
    const double freq = static_cast<double>(misses) / trials;
    CHECK(freq <= bound + 3 * std::sqrt(std::max(bound * (1 - bound), 1e-4) / trials));
}
