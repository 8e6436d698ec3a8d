#pragma once

// Dense two-phase simplex for  max c'x  s.t.  A x <= b,  A_eq x = b_eq,  x free.
//
// The free variables are pivoted into the basis first and never leave it, so
// the remaining problem is a standard-form LP over the slacks. Every basis the
// method visits therefore leaves exactly N constraint slacks nonbasic, and the
// returned point is a vertex: the solution of those N active rows.
// Entering and leaving variables follow Bland's rule.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "polybandit/errors.hpp"
#include "polybandit/types.hpp"

namespace polybandit {

enum class LpStatus { optimal, unbounded, infeasible };

inline const char* to_string(LpStatus status)
{
    switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

template <typename Scalar>
struct LpProblem
{
    Vector<Scalar> objective;  ///< maximized
    Matrix<Scalar> A;
    Vector<Scalar> b;
    Matrix<Scalar> A_eq;  ///< optional; zero rows when absent
    Vector<Scalar> b_eq;
};

template <typename Scalar>
struct LpSolution
{
    Vector<Scalar> point;
    Scalar value = 0;
    LpStatus status = LpStatus::infeasible;
    /// Rows of A that are tight at `point` by construction (the nonbasic
    /// slacks). Equality row k of A_eq appears as A.rows() + 2k and
    /// A.rows() + 2k + 1 (its two halves).
    std::vector<Index> active_set;
};

namespace detail {

template <typename Scalar>
class SimplexTableau
{
public:
    SimplexTableau(const Matrix<Scalar>& A, const Vector<Scalar>& b, Scalar pivot_tol)
        : n_(A.cols()), m_(A.rows()), pivot_tol_(pivot_tol)
    {
        // columns: x (n) | slack (m) | artificial (m) | rhs
        tab_ = Matrix<Scalar>::Zero(m_, n_ + 2 * m_ + 1);
        tab_.leftCols(n_) = A;
        tab_.block(0, n_, m_, m_).setIdentity();
        tab_.col(rhs_col()) = b;
        basis_.resize(m_);
        in_basis_.assign(n_ + 2 * m_, false);
        for (Index i = 0; i < m_; ++i) {
            basis_[i] = n_ + i;
            in_basis_[n_ + i] = true;
        }
        row_alive_.assign(m_, true);
        dead_column_.assign(n_ + 2 * m_, false);
        for (Index k = 0; k < m_; ++k)
            dead_column_[n_ + m_ + k] = true;  // artificials enabled on demand
        pivotable_.assign(n_, false);
    }

    /// Moves every free variable it can into the basis. Returns false when
    /// some column of A is linearly dependent on the others.
    bool pivot_in_free_variables()
    {
        bool full_rank = true;
        for (Index j = 0; j < n_; ++j) {
            Index best_row = -1;
            Scalar best = 0;
            for (Index i = 0; i < m_; ++i) {
                if (is_free_row(i))
                    continue;
                const Scalar v = std::abs(tab_(i, j));
                if (v > best) {
                    best = v;
                    best_row = i;
                }
            }
            if (best_row < 0 || best <= pivot_tol_) {
                full_rank = false;
                for (Index i = 0; i < m_; ++i)
                    if (!is_free_row(i))
                        tab_(i, j) = 0;
                continue;
            }
            pivot(best_row, j);
            pivotable_[j] = true;
        }
        return full_rank;
    }

    /// Phase one. Returns false when the constraints are infeasible.
    bool find_feasible_basis(Scalar feas_tol)
    {
        bool any_artificial = false;
        for (Index i = 0; i < m_; ++i) {
            if (is_free_row(i) || tab_(i, rhs_col()) >= 0)
                continue;
            tab_.row(i) *= Scalar(-1);
            const Index art = n_ + m_ + i;
            tab_(i, art) = 1;
            in_basis_[basis_[i]] = false;
            in_basis_[art] = true;
            basis_[i] = art;
            dead_column_[art] = false;
            any_artificial = true;
        }
        if (!any_artificial)
            return true;

        Vector<Scalar> cost = Vector<Scalar>::Zero(n_ + 2 * m_);
        for (Index i = 0; i < m_; ++i)
            if (basis_[i] >= n_ + m_)
                cost(basis_[i]) = -1;
        price(cost);
        if (!optimize(Scalar(1)))
            throw std::logic_error("simplex phase one reported an unbounded auxiliary problem");
        if (-objective_row_(rhs_col()) < -feas_tol)
            return false;

        // Drive zero-level artificials out of the basis, then retire them.
        for (Index i = 0; i < m_; ++i) {
            if (!row_alive_[i] || basis_[i] < n_ + m_)
                continue;
            Index entering = -1;
            for (Index j = n_; j < n_ + m_; ++j) {
                if (std::abs(tab_(i, j)) > pivot_tol_ && !is_basic(j)) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) {
                row_alive_[i] = false;  // redundant row
                in_basis_[basis_[i]] = false;
            } else
                pivot(i, entering);
        }
        for (Index k = 0; k < m_; ++k)
            dead_column_[n_ + m_ + k] = true;
        return true;
    }

    /// Phase two. Returns false when the objective is unbounded.
    bool maximize(const Vector<Scalar>& c)
    {
        Vector<Scalar> cost = Vector<Scalar>::Zero(n_ + 2 * m_);
        cost.head(n_) = c;
        price(cost);
        const Scalar scale = std::max(c.cwiseAbs().maxCoeff(), std::numeric_limits<Scalar>::min());
        // A free column that could not be pivoted in is a line of the feasible
        // set; a nonzero reduced cost along it means the objective is unbounded.
        for (Index j = 0; j < n_; ++j)
            if (!pivotable_[j] && std::abs(objective_row_(j)) > reduced_cost_tol_ * scale)
                return false;
        return optimize(scale);
    }

    Vector<Scalar> tableau_point() const
    {
        Vector<Scalar> x = Vector<Scalar>::Zero(n_);
        for (Index i = 0; i < m_; ++i)
            if (row_alive_[i] && basis_[i] < n_)
                x(basis_[i]) = tab_(i, rhs_col());
        return x;
    }

    /// Constraint rows whose slack is nonbasic, ascending.
    std::vector<Index> nonbasic_slacks() const
    {
        std::vector<bool> basic(m_, false);
        for (Index i = 0; i < m_; ++i)
            if (row_alive_[i] && basis_[i] >= n_ && basis_[i] < n_ + m_)
                basic[basis_[i] - n_] = true;
        std::vector<Index> out;
        for (Index k = 0; k < m_; ++k)
            if (!basic[k])
                out.push_back(k);
        return out;
    }

    bool all_free_pivoted() const
    {
        return std::all_of(pivotable_.begin(), pivotable_.end(), [](bool p) { return p; });
    }

private:
    Index rhs_col() const { return n_ + 2 * m_; }
    bool is_free_row(Index i) const { return basis_[i] < n_; }
    bool is_basic(Index j) const { return in_basis_[j]; }

    void pivot(Index r, Index j)
    {
        tab_.row(r) /= tab_(r, j);
        for (Index i = 0; i < m_; ++i) {
            if (i == r || !row_alive_[i])
                continue;
            const Scalar f = tab_(i, j);
            if (f != 0)
                tab_.row(i) -= f * tab_.row(r);
            tab_(i, j) = 0;
        }
        if (objective_row_.size() > 0) {
            const Scalar f = objective_row_(j);
            if (f != 0)
                objective_row_ -= f * tab_.row(r).transpose();
            objective_row_(j) = 0;
        }
        in_basis_[basis_[r]] = false;
        in_basis_[j] = true;
        basis_[r] = j;
    }

    /// objective_row_ = reduced costs c - c_B B^-1 [A I], rhs entry = -z.
    void price(const Vector<Scalar>& cost)
    {
        objective_row_ = Vector<Scalar>::Zero(rhs_col() + 1);
        objective_row_.head(cost.size()) = cost;
        for (Index i = 0; i < m_; ++i) {
            if (!row_alive_[i])
                continue;
            const Scalar cb = cost(basis_[i]);
            if (cb != 0)
                objective_row_ -= cb * tab_.row(i).transpose();
        }
    }

    bool optimize(Scalar scale)
    {
        const Scalar d_tol = reduced_cost_tol_ * scale;
        const long max_iterations = 100000 + 50 * static_cast<long>(m_ + n_) * static_cast<long>(m_ + n_);
        for (long iter = 0; iter < max_iterations; ++iter) {
            // Bland: lowest-index improving column. Free columns are basic or dead.
            Index entering = -1;
            for (Index j = n_; j < rhs_col(); ++j) {
                if (dead_column_[j])
                    continue;
                if (objective_row_(j) > d_tol && !is_basic(j)) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0)
                return true;

            Scalar min_ratio = std::numeric_limits<Scalar>::infinity();
            for (Index i = 0; i < m_; ++i) {
                if (!row_alive_[i] || is_free_row(i) || tab_(i, entering) <= pivot_tol_)
                    continue;
                const Scalar ratio = std::max(tab_(i, rhs_col()), Scalar(0)) / tab_(i, entering);
                min_ratio = std::min(min_ratio, ratio);
            }
            if (!std::isfinite(min_ratio))
                return false;
            // Bland: among (numerically) tied rows, the lowest basic index leaves.
            const Scalar tie = Scalar(1e-12) * (Scalar(1) + min_ratio);
            Index leaving = -1;
            for (Index i = 0; i < m_; ++i) {
                if (!row_alive_[i] || is_free_row(i) || tab_(i, entering) <= pivot_tol_)
                    continue;
                const Scalar ratio = std::max(tab_(i, rhs_col()), Scalar(0)) / tab_(i, entering);
                if (ratio <= min_ratio + tie && (leaving < 0 || basis_[i] < basis_[leaving]))
                    leaving = i;
            }
            pivot(leaving, entering);
        }
        throw std::runtime_error("simplex iteration limit exceeded");
    }

    Index n_;
    Index m_;
    Scalar pivot_tol_;
    Scalar reduced_cost_tol_ = Scalar(1e-10);
    Matrix<Scalar> tab_;
    Vector<Scalar> objective_row_;
    std::vector<Index> basis_;
    std::vector<bool> in_basis_;
    std::vector<bool> row_alive_;
    std::vector<bool> dead_column_;
    std::vector<bool> pivotable_;
};

}  // namespace detail

/// Solves  max objective'x  s.t.  A x <= b (and A_eq x = b_eq).
///
/// Deterministic: identical inputs give bit-identical outputs, and positive
/// rescaling of the objective does not change the returned vertex. When the
/// optimum is attained on a face, the vertex reached by Bland's rule is
/// returned.
template <typename Scalar>
LpSolution<Scalar> maximize(const LpProblem<Scalar>& problem, Scalar pivot_tol = Scalar(tolerance::pivot))
{
    const Index n = problem.objective.size();
    if (problem.A.cols() != n || problem.A.rows() != problem.b.size())
        throw DimensionError("maximize: inequality system does not match objective dimension");
    const Index m_eq = problem.A_eq.rows();
    if (m_eq > 0 && (problem.A_eq.cols() != n || problem.b_eq.size() != m_eq))
        throw DimensionError("maximize: equality system does not match objective dimension");
    const Index m_total = problem.A.rows() + 2 * m_eq;
    if (m_total == 0)
        throw DimensionError("maximize: at least one constraint row is required");

    // Stack equalities as paired inequalities, then scale each row to unit
    // infinity norm. All-zero rows are either vacuous or infeasible.
    Matrix<Scalar> A(m_total, n);
    Vector<Scalar> b(m_total);
    A.topRows(problem.A.rows()) = problem.A;
    b.head(problem.A.rows()) = problem.b;
    for (Index k = 0; k < m_eq; ++k) {
        A.row(problem.A.rows() + 2 * k) = problem.A_eq.row(k);
        b(problem.A.rows() + 2 * k) = problem.b_eq(k);
        A.row(problem.A.rows() + 2 * k + 1) = -problem.A_eq.row(k);
        b(problem.A.rows() + 2 * k + 1) = -problem.b_eq(k);
    }

    LpSolution<Scalar> solution;
    solution.point = Vector<Scalar>::Zero(n);

    std::vector<Index> kept;
    for (Index i = 0; i < m_total; ++i) {
        const Scalar norm = A.row(i).cwiseAbs().maxCoeff();
        if (norm == 0) {
            if (b(i) < 0) {
                solution.status = LpStatus::infeasible;
                return solution;
            }
            continue;
        }
        A.row(i) /= norm;
        b(i) /= norm;
        kept.push_back(i);
    }
    if (kept.empty()) {
        solution.status = problem.objective.isZero() ? LpStatus::optimal : LpStatus::unbounded;
        return solution;
    }
    Matrix<Scalar> A_kept(static_cast<Index>(kept.size()), n);
    Vector<Scalar> b_kept(static_cast<Index>(kept.size()));
    for (std::size_t r = 0; r < kept.size(); ++r) {
        A_kept.row(static_cast<Index>(r)) = A.row(kept[r]);
        b_kept(static_cast<Index>(r)) = b(kept[r]);
    }

    detail::SimplexTableau<Scalar> tableau(A_kept, b_kept, pivot_tol);
    tableau.pivot_in_free_variables();
    const Scalar feas_tol = Scalar(1e-9) * std::max(Scalar(1), b_kept.cwiseAbs().maxCoeff());
    if (!tableau.find_feasible_basis(feas_tol)) {
        solution.status = LpStatus::infeasible;
        return solution;
    }
    if (!tableau.maximize(problem.objective)) {
        solution.status = LpStatus::unbounded;
        return solution;
    }

    for (Index k : tableau.nonbasic_slacks())
        solution.active_set.push_back(kept[k]);
    if (tableau.all_free_pivoted() && static_cast<Index>(solution.active_set.size()) == n) {
        // Re-solve the active rows directly; more accurate than the tableau rhs.
        Matrix<Scalar> A_act(n, n);
        Vector<Scalar> b_act(n);
        for (Index r = 0; r < n; ++r) {
            const Index row = solution.active_set[r];
            if (row < problem.A.rows()) {
                A_act.row(r) = problem.A.row(row);
                b_act(r) = problem.b(row);
            } else {
                const Index k = (row - problem.A.rows()) / 2;
                const Scalar sign = ((row - problem.A.rows()) % 2 == 0) ? Scalar(1) : Scalar(-1);
                A_act.row(r) = sign * problem.A_eq.row(k);
                b_act(r) = sign * problem.b_eq(k);
            }
        }
        solution.point = A_act.partialPivLu().solve(b_act);
    } else {
        solution.point = tableau.tableau_point();
    }
    solution.value = problem.objective.dot(solution.point);
    solution.status = LpStatus::optimal;
    return solution;
}

/// Convenience overload for a plain inequality system.
template <typename Scalar>
LpSolution<Scalar> maximize(const Vector<Scalar>& objective, const Matrix<Scalar>& A, const Vector<Scalar>& b)
{
    return maximize(LpProblem<Scalar>{objective, A, b, Matrix<Scalar>(0, objective.size()), Vector<Scalar>(0)});
}

}  // namespace polybandit
