#pragma once

// Bounded polyhedra {x : A x <= b} and the geometry the bandit policies need:
// membership, axis reaches, interior anchors, exploration bases, vertex
// enumeration and sub-optimality gaps.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polybandit/errors.hpp"
#include "polybandit/lp.hpp"
#include "polybandit/types.hpp"

namespace polybandit {

/// True iff maximizing each of +x_n and -x_n over {A x <= b} is bounded.
/// Throws InfeasiblePolyhedron when the system has no solution.
template <typename Scalar>
bool check_bounded(const Matrix<Scalar>& A, const Vector<Scalar>& b)
{
    if (A.rows() != b.size())
        throw DimensionError("check_bounded: A has " + std::to_string(A.rows()) + " rows but b has " +
                             std::to_string(b.size()) + " entries");
    const Index n = A.cols();
    for (Index axis = 0; axis < n; ++axis) {
        for (Scalar sign : {Scalar(1), Scalar(-1)}) {
            Vector<Scalar> direction = Vector<Scalar>::Zero(n);
            direction(axis) = sign;
            const auto sol = maximize<Scalar>(direction, A, b);
            if (sol.status == LpStatus::infeasible)
                throw InfeasiblePolyhedron("check_bounded: the constraint system is infeasible");
            if (sol.status == LpStatus::unbounded)
                return false;
        }
    }
    return true;
}

/// A bounded polyhedron {x in R^N : A x <= b}. Construction validates
/// dimensions, M >= N + 1 and boundedness, so every instance is bounded.
template <typename Scalar = double>
class Polyhedron
{
public:
    using MatrixType = Matrix<Scalar>;
    using VectorType = Vector<Scalar>;

    Polyhedron(MatrixType A, VectorType b) : A_(std::move(A)), b_(std::move(b))
    {
        if (A_.rows() != b_.size())
            throw DimensionError("Polyhedron: A has " + std::to_string(A_.rows()) + " rows but b has " +
                                 std::to_string(b_.size()) + " entries");
        if (A_.cols() == 0)
            throw DimensionError("Polyhedron: dimension must be positive");
        if (!A_.allFinite() || !b_.allFinite())
            throw DimensionError("Polyhedron: non-finite coefficient");
        if (A_.rows() < A_.cols() + 1)
            throw UnboundedPolyhedron("Polyhedron: " + std::to_string(A_.rows()) +
                                      " constraints cannot bound dimension " + std::to_string(A_.cols()));
        if (!check_bounded(A_, b_))
            throw UnboundedPolyhedron("Polyhedron: constraint system is unbounded");
    }

    const MatrixType& A() const { return A_; }
    const VectorType& b() const { return b_; }
    Index dim() const { return A_.cols(); }
    Index rows() const { return A_.rows(); }

private:
    MatrixType A_;
    VectorType b_;
};

/// {lo <= x_n <= hi for all n}
template <typename Scalar = double>
Polyhedron<Scalar> make_box(Index n, Scalar lo, Scalar hi)
{
    Matrix<Scalar> A(2 * n, n);
    A << Matrix<Scalar>::Identity(n, n), -Matrix<Scalar>::Identity(n, n);
    Vector<Scalar> b(2 * n);
    b << Vector<Scalar>::Constant(n, hi), Vector<Scalar>::Constant(n, -lo);
    return Polyhedron<Scalar>(std::move(A), std::move(b));
}

/// {x >= 0, sum x <= scale}
template <typename Scalar = double>
Polyhedron<Scalar> make_simplex(Index n, Scalar scale = Scalar(1))
{
    Matrix<Scalar> A(n + 1, n);
    A << -Matrix<Scalar>::Identity(n, n), Matrix<Scalar>::Ones(1, n);
    Vector<Scalar> b = Vector<Scalar>::Zero(n + 1);
    b(n) = scale;
    return Polyhedron<Scalar>(std::move(A), std::move(b));
}

template <typename Scalar, typename Derived>
bool contains(const Polyhedron<Scalar>& poly, const Eigen::MatrixBase<Derived>& x,
              Scalar tol = Scalar(tolerance::membership))
{
    if (x.size() != poly.dim())
        throw DimensionError("contains: point has dimension " + std::to_string(x.size()) + ", polyhedron " +
                             std::to_string(poly.dim()));
    return ((poly.A() * x - poly.b()).array() <= tol).all();
}

/// Largest |A_i x - b_i| over the rows, signed: positive means violated.
template <typename Scalar, typename Derived>
Scalar max_violation(const Polyhedron<Scalar>& poly, const Eigen::MatrixBase<Derived>& x)
{
    return (poly.A() * x - poly.b()).maxCoeff();
}

/// Rows i with |A_i x - b_i| <= tol.
template <typename Scalar, typename Derived>
std::vector<Index> active_rows(const Polyhedron<Scalar>& poly, const Eigen::MatrixBase<Derived>& x,
                               Scalar tol = Scalar(tolerance::membership))
{
    const Vector<Scalar> slack = poly.b() - poly.A() * x;
    std::vector<Index> rows;
    for (Index i = 0; i < slack.size(); ++i)
        if (std::abs(slack(i)) <= tol)
            rows.push_back(i);
    return rows;
}

template <typename Scalar>
LpSolution<Scalar> maximize(const Vector<Scalar>& objective, const Polyhedron<Scalar>& poly)
{
    return maximize<Scalar>(objective, poly.A(), poly.b());
}

/// max{z >= 0 : anchor + z e_axis in poly}, by the ratio test over rows with
/// A(i, axis) > 0.
template <typename Scalar, typename Derived>
Scalar axis_reach(const Polyhedron<Scalar>& poly, const Eigen::MatrixBase<Derived>& anchor, Index axis,
                  Scalar tol = Scalar(tolerance::membership))
{
    if (axis < 0 || axis >= poly.dim())
        throw DimensionError("axis_reach: axis " + std::to_string(axis) + " out of range");
    if (!contains(poly, anchor, tol))
        throw OutsidePolyhedron("axis_reach: anchor lies outside the polyhedron");
    Scalar reach = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < poly.rows(); ++i) {
        const Scalar a = poly.A()(i, axis);
        if (a <= 0)
            continue;
        const Scalar slack = std::max(Scalar(0), poly.b()(i) - poly.A().row(i).dot(anchor));
        reach = std::min(reach, slack / a);
    }
    if (!std::isfinite(reach))
        throw UnboundedPolyhedron("axis_reach: no constraint limits axis " + std::to_string(axis));
    if (reach <= tol)
        throw DegenerateReach("axis_reach: anchor sits on a facet facing +e_" + std::to_string(axis));
    return reach;
}

template <typename Scalar>
struct InteriorAnchor
{
    Vector<Scalar> anchor;   ///< x-bar
    Vector<Scalar> margins;  ///< y-bar: anchor +- margins(n) e_n stays inside
    Scalar alpha = 0;        ///< min_n margins(n)
};

/// The point whose smallest two-sided room along the coordinate axes is
/// largest:  max alpha  s.t.  A x <= b,  y_n >= alpha >= 0,
/// A(x +- y_n e_n) <= b.  Throws DegenerateAnchor when alpha <= tol.
template <typename Scalar>
InteriorAnchor<Scalar> interior_anchor(const Polyhedron<Scalar>& poly, Scalar tol = Scalar(tolerance::membership))
{
    const Index n = poly.dim();
    const Index m = poly.rows();
    const Index vars = 2 * n + 1;  // x | y | alpha
    const Index alpha_col = 2 * n;
    const Index rows = m + 2 * m * n + n + n + 1;
    Matrix<Scalar> A = Matrix<Scalar>::Zero(rows, vars);
    Vector<Scalar> b = Vector<Scalar>::Zero(rows);
    Index r = 0;
    A.block(r, 0, m, n) = poly.A();
    b.segment(r, m) = poly.b();
    r += m;
    for (Index i = 0; i < n; ++i) {
        for (Scalar sign : {Scalar(1), Scalar(-1)}) {
            A.block(r, 0, m, n) = poly.A();
            A.block(r, n + i, m, 1) = sign * poly.A().col(i);
            b.segment(r, m) = poly.b();
            r += m;
        }
    }
    for (Index i = 0; i < n; ++i, ++r) {  // alpha - y_i <= 0
        A(r, alpha_col) = 1;
        A(r, n + i) = -1;
    }
    for (Index i = 0; i < n; ++i, ++r)  // -y_i <= 0
        A(r, n + i) = -1;
    A(r, alpha_col) = -1;  // -alpha <= 0
    ++r;

    Vector<Scalar> objective = Vector<Scalar>::Zero(vars);
    objective(alpha_col) = 1;
    const auto sol = maximize<Scalar>(objective, A, b);
    if (sol.status != LpStatus::optimal)
        throw DegenerateAnchor(std::string("interior_anchor: anchor program is ") + to_string(sol.status));
    InteriorAnchor<Scalar> out;
    out.anchor = sol.point.head(n);
    out.margins = sol.point.segment(n, n);
    out.alpha = sol.point(alpha_col);
    if (!(out.alpha > tol))
        throw DegenerateAnchor("interior_anchor: no interior room along every axis (alpha = " +
                               std::to_string(static_cast<double>(out.alpha)) + ")");
    return out;
}

template <typename Scalar>
struct ExplorationBasis
{
    Vector<Scalar> anchor;   ///< zero when the origin is used
    Vector<Scalar> reaches;  ///< z-bar_n > 0
    Matrix<Scalar> arms;     ///< column n is anchor + reaches(n) e_n
    bool at_origin = true;

    Index dim() const { return anchor.size(); }
};

/// Basis whose arms stretch from `anchor` to the boundary along each axis.
template <typename Scalar>
ExplorationBasis<Scalar> basis_from_anchor(const Polyhedron<Scalar>& poly, const Vector<Scalar>& anchor,
                                           Scalar tol = Scalar(tolerance::membership))
{
    const Index n = poly.dim();
    if (anchor.size() != n)
        throw DimensionError("basis_from_anchor: anchor dimension mismatch");
    ExplorationBasis<Scalar> basis;
    basis.anchor = anchor;
    basis.reaches.resize(n);
    basis.arms.resize(n, n);
    for (Index axis = 0; axis < n; ++axis) {
        basis.reaches(axis) = axis_reach(poly, anchor, axis, tol);
        basis.arms.col(axis) = anchor;
        basis.arms(axis, axis) += basis.reaches(axis);
    }
    basis.at_origin = anchor.isZero(0);
    return basis;
}

/// Exploration arms from the origin (use_origin) or from the interior anchor.
/// In the latter case the anchor's margins are stretched to the boundary by
/// measuring the reach along e_n from the anchor itself.
template <typename Scalar>
ExplorationBasis<Scalar> exploration_basis(const Polyhedron<Scalar>& poly, bool use_origin,
                                           Scalar tol = Scalar(tolerance::membership))
{
    if (use_origin)
        return basis_from_anchor(poly, Vector<Scalar>::Zero(poly.dim()).eval(), tol);
    return basis_from_anchor(poly, interior_anchor(poly, tol).anchor, tol);
}

template <typename Scalar>
struct VertexSet
{
    Matrix<Scalar> vertices;              ///< one vertex per column
    std::optional<Vector<Scalar>> values;  ///< theta'v per column, when requested

    Index size() const { return vertices.cols(); }
};

/// Binomial coefficient with saturation at `cap + 1`.
inline unsigned long long bounded_binomial(Index m, Index n, unsigned long long cap)
{
    if (n < 0 || n > m)
        return 0;
    n = std::min(n, m - n);
    unsigned long long result = 1;
    for (Index k = 1; k <= n; ++k) {
        result = result * static_cast<unsigned long long>(m - n + k) / static_cast<unsigned long long>(k);
        if (result > cap)
            return cap + 1;
    }
    return result;
}

/// All basic feasible solutions: every N-subset of rows with a nonsingular
/// submatrix is solved; feasible solutions are kept and deduplicated
/// (L-infinity distance <= tolerance::dedupe). Column order follows the
/// lexicographic order of the first row subset producing each vertex.
template <typename Scalar>
VertexSet<Scalar> enumerate_vertices(const Polyhedron<Scalar>& poly, Scalar tol = Scalar(tolerance::membership),
                                     Index max_dim = 12, unsigned long long max_subsets = 1000000ULL)
{
    const Index n = poly.dim();
    const Index m = poly.rows();
    if (n > max_dim)
        throw VertexBlowup("enumerate_vertices: dimension " + std::to_string(n) + " exceeds " +
                           std::to_string(max_dim));
    if (bounded_binomial(m, n, max_subsets) > max_subsets)
        throw VertexBlowup("enumerate_vertices: C(" + std::to_string(m) + ", " + std::to_string(n) + ") exceeds " +
                           std::to_string(max_subsets));

    std::vector<Index> subset(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k)
        subset[k] = k;
    std::vector<Vector<Scalar>> found;
    Matrix<Scalar> sub(n, n);
    Vector<Scalar> rhs(n);
    const Scalar dedupe = Scalar(tolerance::dedupe);

    while (true) {
        for (Index k = 0; k < n; ++k) {
            sub.row(k) = poly.A().row(subset[k]);
            rhs(k) = poly.b()(subset[k]);
        }
        Eigen::FullPivLU<Matrix<Scalar>> lu(sub);
        if (lu.isInvertible()) {
            Vector<Scalar> v = lu.solve(rhs);
            if (contains(poly, v, tol)) {
                const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Vector<Scalar>& w) {
                    return (w - v).cwiseAbs().maxCoeff() <= dedupe;
                });
                if (!duplicate)
                    found.push_back(std::move(v));
            }
        }
        // next lexicographic n-subset of {0..m-1}
        Index k = n - 1;
        while (k >= 0 && subset[k] == m - n + k)
            --k;
        if (k < 0)
            break;
        ++subset[k];
        for (Index j = k + 1; j < n; ++j)
            subset[j] = subset[j - 1] + 1;
    }

    VertexSet<Scalar> out;
    out.vertices.resize(n, static_cast<Index>(found.size()));
    for (std::size_t j = 0; j < found.size(); ++j)
        out.vertices.col(static_cast<Index>(j)) = found[j];
    return out;
}

template <typename Scalar>
VertexSet<Scalar> with_values(VertexSet<Scalar> set, const Vector<Scalar>& theta)
{
    set.values = (set.vertices.transpose() * theta).eval();
    return set;
}

template <typename Scalar>
struct GapResult
{
    Scalar delta = 0;
    Vector<Scalar> best;
    Vector<Scalar> second;
    Index best_index = -1;
    Index second_index = -1;
};

/// Best vertex under theta and its margin over every other vertex:
/// delta = min over v != best of theta'(best - v). Throws TiedOptimum when
/// delta <= tol.
template <typename Scalar>
GapResult<Scalar> gap(const VertexSet<Scalar>& set, const Vector<Scalar>& theta,
                      Scalar tol = Scalar(tolerance::membership))
{
    if (set.vertices.rows() != theta.size())
        throw DimensionError("gap: theta dimension mismatch");
    if (set.size() < 2)
        throw TiedOptimum("gap: fewer than two vertices");
    const Vector<Scalar> values = set.vertices.transpose() * theta;
    Index best = 0;
    for (Index j = 1; j < values.size(); ++j)
        if (values(j) > values(best))
            best = j;
    GapResult<Scalar> out;
    out.best_index = best;
    out.delta = std::numeric_limits<Scalar>::infinity();
    for (Index j = 0; j < set.size(); ++j) {
        if (j == best)
            continue;
        const Scalar margin = theta.dot(set.vertices.col(best) - set.vertices.col(j));
        if (margin < out.delta) {
            out.delta = margin;
            out.second_index = j;
        }
    }
    out.best = set.vertices.col(best);
    out.second = set.vertices.col(out.second_index);
    if (!(out.delta > tol)) {
        std::ostringstream msg;
        msg << "gap: tied optimum (delta = " << static_cast<double>(out.delta) << ")";
        throw TiedOptimum(msg.str());
    }
    return out;
}

template <typename Scalar>
GapResult<Scalar> gap(const Polyhedron<Scalar>& poly, const Vector<Scalar>& theta,
                      Scalar tol = Scalar(tolerance::membership))
{
    return gap(enumerate_vertices(poly, tol), theta, tol);
}

/// h = max over the polyhedron of ||x||_1, attained at a vertex.
template <typename Scalar>
Scalar max_l1_norm(const VertexSet<Scalar>& set)
{
    return set.vertices.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace polybandit
