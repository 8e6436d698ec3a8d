#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "polybandit/generators.hpp"
#include "polybandit/polytope.hpp"

using namespace polybandit;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using test_oracles::vec;

namespace {

Polyhedron<double> triangle()  // x >= 0, y >= 0, x + y <= 2
{
    MatrixXd A(3, 2);
    A << -1, 0, 0, -1, 1, 1;
    return Polyhedron<double>(A, vec({0, 0, 2}));
}

bool has_vertex(const VertexSet<double>& set, const VectorXd& v)
{
    for (Index j = 0; j < set.size(); ++j)
        if ((set.vertices.col(j) - v).cwiseAbs().maxCoeff() < 1e-9)
            return true;
    return false;
}

}  // namespace

TEST_CASE("contains")
{
    const auto square = make_box<double>(2, 0.0, 1.0);
    CHECK(contains(square, vec({0.5, 0.5}), 1e-12));
    CHECK_FALSE(contains(square, vec({1.1, 0.0}), 1e-12));
    CHECK(contains(square, vec({1.0, 1.0}), 1e-12));
    CHECK_THROWS_AS(contains(square, vec({1.0}), 1e-12), DimensionError);
}

TEST_CASE("check_bounded")
{
    const auto square = make_box<double>(2, 0.0, 1.0);
    CHECK(check_bounded(square.A(), square.b()));

    MatrixXd half(1, 2);
    half << -1, 0;
    CHECK_FALSE(check_bounded<double>(half, VectorXd::Zero(1)));

    // x >= 0, x1 + x2 <= 2: all four directional programs are finite
    MatrixXd A(3, 2);
    A << -1, 0, 0, -1, 1, 1;
    const VectorXd b = vec({0, 0, 2});
    CHECK(check_bounded<double>(A, b));
    for (Index axis = 0; axis < 2; ++axis) {
        VectorXd up = VectorXd::Zero(2);
        up(axis) = 1;
        CHECK(maximize<double>(up, A, b).value == Catch::Approx(2.0));
        CHECK(maximize<double>(VectorXd(-up), A, b).value == Catch::Approx(0.0).margin(1e-12));
    }

    MatrixXd empty(2, 1);
    empty << 1, -1;
    CHECK_THROWS_AS(check_bounded<double>(empty, vec({-1, -1})), InfeasiblePolyhedron);
}

TEST_CASE("Polyhedron construction validates its input")
{
    MatrixXd half(1, 2);
    half << -1, 0;
    CHECK_THROWS_AS(Polyhedron<double>(half, VectorXd::Zero(1)), UnboundedPolyhedron);
    MatrixXd open(3, 2);
    open << -1, 0, 0, -1, 1, -1;
    CHECK_THROWS_AS(Polyhedron<double>(open, VectorXd::Zero(3)), UnboundedPolyhedron);
    CHECK_THROWS_AS(Polyhedron<double>(MatrixXd::Identity(3, 2), VectorXd::Zero(2)), DimensionError);
}

TEST_CASE("axis_reach ratio test")
{
    const auto square = make_box<double>(2, 0.0, 1.0);
    CHECK(axis_reach(square, vec({0, 0}), 0) == 1.0);

    const auto tri = triangle();
    // the ray from (0.5, 0.5) leaves through x + y = 2 at (1.5, 0.5)
    const double reach = axis_reach(tri, vec({0.5, 0.5}), 0);
    CHECK(reach == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(reach + 0.5 == Catch::Approx(1.5));
    CHECK(std::abs(reach - test_oracles::bisection_reach(tri.A(), tri.b(), vec({0.5, 0.5}), 0)) < 1e-9);

    CHECK_THROWS_AS(axis_reach(square, vec({1, 0}), 0), DegenerateReach);
    CHECK_THROWS_AS(axis_reach(square, vec({2, 0}), 0), OutsidePolyhedron);
    CHECK_THROWS_AS(axis_reach(square, vec({0, 0}), 2), DimensionError);
}

TEST_CASE("axis_reach agrees with bisection on random instances")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
        const Index n = 1 + checked % 4;
        const auto poly = random_polyhedron<double>(n, n + 1 + checked % 6, rng);
        // random interior point: convex combination of two LP optima
        VectorXd c1(n), c2(n);
        for (Index k = 0; k < n; ++k) {
            c1(k) = unit(rng) - 0.5;
            c2(k) = unit(rng) - 0.5;
        }
        const double w = 0.1 + 0.8 * unit(rng);
        const VectorXd anchor = w * maximize(c1, poly).point + (1 - w) * maximize(c2, poly).point;
        const Index axis = checked % n;
        double reach = 0;
        try {
            reach = axis_reach(poly, anchor, axis);
        } catch (const DegenerateReach&) {
            continue;
        }
        CHECK(std::abs(reach - test_oracles::bisection_reach(poly.A(), poly.b(), anchor, axis)) <= 1e-9);
        ++checked;
    }
}

TEST_CASE("interior_anchor")
{
    SECTION("square [-1,1]^2")
    {
        const auto square = make_box<double>(2, -1.0, 1.0);
        const auto anchor = interior_anchor(square);
        CHECK(anchor.anchor.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(anchor.alpha == Catch::Approx(1.0));
        const auto grid = test_oracles::grid_search_anchor(square.A(), square.b(), -1, 1, -1, 1, 400);
        CHECK(std::abs(anchor.alpha - grid.value) <= 2 * grid.step);
    }
    SECTION("unit simplex")
    {
        const auto simplex = make_simplex<double>(2);
        const auto anchor = interior_anchor(simplex);
        CHECK(anchor.anchor(0) == Catch::Approx(1.0 / 3));
        CHECK(anchor.anchor(1) == Catch::Approx(1.0 / 3));
        CHECK(anchor.alpha == Catch::Approx(1.0 / 3));
        const auto grid = test_oracles::grid_search_anchor(simplex.A(), simplex.b(), 0, 1, 0, 1, 600);
        CHECK(std::abs(anchor.alpha - grid.value) <= 2 * grid.step);
    }
    SECTION("flat slice has no interior along e1")
    {
        MatrixXd A(4, 2);
        A << 1, 0, -1, 0, 0, 1, 0, -1;
        const Polyhedron<double> slice(A, vec({0, 0, 1, 0}));
        CHECK_THROWS_AS(interior_anchor(slice), DegenerateAnchor);
    }
}

TEST_CASE("interior_anchor matches grid search on random planar polygons")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto poly = random_polyhedron<double>(2, 3 + trial % 5, rng);
        const auto vertices = enumerate_vertices(poly);
        const VectorXd lo = vertices.vertices.rowwise().minCoeff();
        const VectorXd hi = vertices.vertices.rowwise().maxCoeff();
        const auto anchor = interior_anchor(poly);
        const auto grid = test_oracles::grid_search_anchor(poly.A(), poly.b(), lo(0), hi(0), lo(1), hi(1), 150);
        CHECK(std::abs(anchor.alpha - grid.value) <= 2 * grid.step);
    }
}

TEST_CASE("exploration_basis")
{
    SECTION("unit cube from the origin")
    {
        const auto cube = make_box<double>(3, 0.0, 1.0);
        const auto basis = exploration_basis(cube, true);
        CHECK(basis.at_origin);
        CHECK(basis.reaches == VectorXd::Ones(3));
        CHECK(basis.arms == MatrixXd::Identity(3, 3));
    }
    SECTION("square [-1,1]^2 from the origin")
    {
        const auto basis = exploration_basis(make_box<double>(2, -1.0, 1.0), true);
        CHECK(basis.reaches == VectorXd::Ones(2));
        CHECK(basis.arms == MatrixXd::Identity(2, 2));
    }
    SECTION("triangle from the interior anchor")
    {
        const auto tri = triangle();
        const auto basis = exploration_basis(tri, false);
        CHECK_FALSE(basis.at_origin);
        for (Index n = 0; n < 2; ++n) {
            const VectorXd arm = basis.arms.col(n);
            CHECK(contains(tri, arm));
            CHECK_FALSE(active_rows(tri, arm).empty());
            CHECK((arm - basis.anchor - basis.reaches(n) * VectorXd::Unit(2, n)).norm() < 1e-15);
        }
    }
    SECTION("origin on the boundary facing an axis")
    {
        MatrixXd A(3, 2);
        A << 1, 0, 0, 1, -1, -1;  // x <= 0, y <= 1, x + y >= -1
        const Polyhedron<double> poly(A, vec({0, 1, 1}));
        CHECK_THROWS_AS(exploration_basis(poly, true), DegenerateReach);
    }
}

TEST_CASE("every exploration arm is a boundary member on random polytopes")
{
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + trial % 4;
        const auto poly = random_polyhedron<double>(n, n + 2 + trial % 5, rng);
        const auto basis = exploration_basis(poly, false);
        for (Index k = 0; k < n; ++k) {
            const VectorXd arm = basis.arms.col(k);
            CHECK(contains(poly, arm));
            CHECK_FALSE(active_rows(poly, arm).empty());
            // maximal: any further step along e_k leaves the polyhedron
            CHECK_FALSE(contains(poly, VectorXd(arm + 1e-6 * VectorXd::Unit(n, k))));
        }
    }
}

TEST_CASE("enumerate_vertices")
{
    const auto square = enumerate_vertices(make_box<double>(2, 0.0, 1.0));
    CHECK(square.size() == 4);
    for (const auto& v : {vec({0, 0}), vec({1, 0}), vec({0, 1}), vec({1, 1})})
        CHECK(has_vertex(square, v));

    const auto tri = enumerate_vertices(triangle());
    CHECK(tri.size() == 3);
    for (const auto& v : {vec({0, 0}), vec({2, 0}), vec({0, 2})})
        CHECK(has_vertex(tri, v));

    CHECK(enumerate_vertices(make_box<double>(3, 0.0, 1.0)).size() == 8);
    CHECK(enumerate_vertices(make_box<double>(10, 0.0, 1.0)).size() == 1024);

    // redundant constraint through a vertex: no duplicates
    MatrixXd A(5, 2);
    A << 1, 0, 0, 1, -1, 0, 0, -1, 1, 1;
    const auto redundant = enumerate_vertices(Polyhedron<double>(A, vec({1, 1, 0, 0, 2})));
    CHECK(redundant.size() == 4);

    CHECK_THROWS_AS(enumerate_vertices(make_box<double>(13, 0.0, 1.0)), VertexBlowup);
    CHECK_THROWS_AS(enumerate_vertices(make_box<double>(12, 0.0, 1.0), 1e-9, 12, 1000ULL), VertexBlowup);
}

TEST_CASE("gap")
{
    const auto square = make_box<double>(2, 0.0, 1.0);

    const auto g = gap(square, vec({0.3, 0.5}));
    CHECK(g.best == vec({1, 1}));
    CHECK(g.delta == Catch::Approx(0.3));
    CHECK(vec({0.3, 0.5}).dot(g.second) == Catch::Approx(0.5));

    const auto even = gap(square, vec({0.5, 0.5}));
    CHECK(even.best == vec({1, 1}));
    CHECK(even.delta == Catch::Approx(0.5));

    CHECK_THROWS_AS(gap(square, vec({0.0, 1.0})), TiedOptimum);
}

TEST_CASE("max_l1_norm")
{
    CHECK(max_l1_norm(enumerate_vertices(make_box<double>(3, -1.0, 1.0))) == 3.0);
    CHECK(max_l1_norm(enumerate_vertices(make_simplex<double>(4, 2.0))) == Catch::Approx(2.0));
}
