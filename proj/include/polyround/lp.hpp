#ifndef POLYROUND_LP_HPP
#define POLYROUND_LP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "polyround/errors.hpp"
#include "polyround/polytope.hpp"

namespace polyround {

enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LinearProgram {
    Sense sense = Sense::Minimize;
    int num_vars = 0;
    std::vector<double> objective;                  // empty means all-zero (feasibility)
    std::vector<Constraint> constraints;
    std::vector<std::pair<double, double>> bounds;  // per-var [lo, hi]; empty means [0,1]

    double bound_lo(int v) const { return bounds.empty() ? 0.0 : bounds[static_cast<std::size_t>(v)].first; }
    double bound_hi(int v) const { return bounds.empty() ? 1.0 : bounds[static_cast<std::size_t>(v)].second; }
    double obj_coef(int v) const { return objective.empty() ? 0.0 : objective[static_cast<std::size_t>(v)]; }
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Point values;                // size num_vars when Optimal
    double objective_value = 0.0;
};

namespace detail {

/// Dense two-phase tableau simplex. Dantzig pricing, switching to Bland's
/// rule after 3x the row count pivots so degenerate scheduling LPs cannot
/// cycle. Returns basic feasible optima.
class SimplexTableau {
public:
    SimplexTableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols) {
        t_.assign((m_ + 1) * (n_ + 1), 0.0);
        basis_.assign(m_, -1);
    }

    double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    double& cost(std::size_t j) { return at(m_, j); }
    double objective_value() const { return -at(m_, n_); }

    std::vector<int> basis_;

    void pivot(std::size_t row, std::size_t col) {
        double piv = at(row, col);
        for (std::size_t j = 0; j <= n_; ++j) at(row, j) /= piv;
        at(row, col) = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == row) continue;
            double f = at(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(row, j);
            at(i, col) = 0.0;
        }
        basis_[row] = static_cast<int>(col);
    }

    /// Runs pivots until the cost row is nonnegative on the allowed columns.
    /// Returns false on unboundedness.
    bool iterate(std::size_t allowed_cols, long long& pivot_budget, long long bland_after) {
        long long pivots = 0;
        while (true) {
            std::size_t enter = n_;
            if (pivots < bland_after) {
                double best = -kEps;
                for (std::size_t j = 0; j < allowed_cols; ++j)
                    if (cost(j) < best) { best = cost(j); enter = j; }
            } else {
                for (std::size_t j = 0; j < allowed_cols; ++j)
                    if (cost(j) < -kEps) { enter = j; break; }
            }
            if (enter == n_) return true;

            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                double a = at(i, enter);
                if (a > kEps) {
                    double ratio = rhs(i) / a;
                    if (ratio < best_ratio - kEps ||
                        (ratio < best_ratio + kEps && leave < m_ && basis_[i] < basis_[leave])) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
            ++pivots;
            if (--pivot_budget <= 0) throw SolverFailureError("simplex exceeded pivot budget");
        }
    }

    static constexpr double kEps = 1e-9;

private:
    std::size_t m_, n_;
    std::vector<double> t_;
};

} // namespace detail

inline LpSolution solve(const LinearProgram& lp) {
    const double feas_tol = 1e-7;
    const std::size_t nv = static_cast<std::size_t>(lp.num_vars);
    if (!lp.objective.empty() && lp.objective.size() != nv)
        throw InvalidInputError("objective size mismatch");
    if (!lp.bounds.empty() && lp.bounds.size() != nv)
        throw InvalidInputError("bounds size mismatch");
    for (std::size_t v = 0; v < nv; ++v) {
        double lo = lp.bound_lo(static_cast<int>(v)), hi = lp.bound_hi(static_cast<int>(v));
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
            throw InvalidInputError("invalid variable bounds");
        if (!std::isfinite(lp.obj_coef(static_cast<int>(v))))
            throw InvalidInputError("non-finite objective coefficient");
    }

    // Fixed variables are substituted out; the rest are shifted to start at 0.
    std::vector<int> col_of(nv, -1);
    std::vector<std::size_t> var_of;
    for (std::size_t v = 0; v < nv; ++v)
        if (lp.bound_hi(static_cast<int>(v)) - lp.bound_lo(static_cast<int>(v)) > 0.0) {
            col_of[v] = static_cast<int>(var_of.size());
            var_of.push_back(v);
        }
    const std::size_t ns = var_of.size();

    struct Row {
        std::vector<double> a;
        Relation rel;
        double b;
    };
    std::vector<Row> rows;
    for (const Constraint& c : lp.constraints) {
        if (!std::isfinite(c.rhs)) throw InvalidInputError("non-finite rhs");
        Row r{std::vector<double>(ns, 0.0), c.rel, c.rhs};
        for (auto [v, coef] : c.terms) {
            if (v < 0 || v >= lp.num_vars) throw InvalidInputError("constraint references unknown variable");
            if (!std::isfinite(coef)) throw InvalidInputError("non-finite coefficient");
            int col = col_of[static_cast<std::size_t>(v)];
            if (col < 0) r.b -= coef * lp.bound_lo(v);
            else {
                r.a[static_cast<std::size_t>(col)] += coef;
                r.b -= coef * lp.bound_lo(v);
            }
        }
        rows.push_back(std::move(r));
    }
    // Finite upper bounds become explicit rows so basic solutions are
    // vertices of the original box-bounded polytope.
    for (std::size_t col = 0; col < ns; ++col) {
        std::size_t v = var_of[col];
        Row r{std::vector<double>(ns, 0.0), Relation::LessEqual,
              lp.bound_hi(static_cast<int>(v)) - lp.bound_lo(static_cast<int>(v))};
        r.a[col] = 1.0;
        rows.push_back(std::move(r));
    }

    auto finish = [&](const std::vector<double>& z) {
        LpSolution s;
        s.status = LpStatus::Optimal;
        s.values.assign(nv, 0.0);
        for (std::size_t v = 0; v < nv; ++v) s.values[v] = lp.bound_lo(static_cast<int>(v));
        for (std::size_t col = 0; col < ns; ++col) s.values[var_of[col]] += z[col];
        s.objective_value = 0.0;
        for (std::size_t v = 0; v < nv; ++v)
            s.objective_value += lp.obj_coef(static_cast<int>(v)) * s.values[v];
        return s;
    };

    // Rows with no free variables are plain feasibility checks.
    {
        std::vector<Row> live;
        for (Row& r : rows) {
            bool empty = std::all_of(r.a.begin(), r.a.end(), [](double c) { return c == 0.0; });
            if (!empty) {
                live.push_back(std::move(r));
                continue;
            }
            bool ok = (r.rel == Relation::LessEqual && 0.0 <= r.b + feas_tol) ||
                      (r.rel == Relation::GreaterEqual && 0.0 >= r.b - feas_tol) ||
                      (r.rel == Relation::Equal && std::fabs(r.b) <= feas_tol);
            if (!ok) return LpSolution{LpStatus::Infeasible, {}, 0.0};
        }
        rows = std::move(live);
    }
    if (ns == 0) return finish({});

    const std::size_t m = rows.size();
    std::size_t n_slack = 0, n_art = 0;
    for (Row& r : rows) {
        if (r.b < 0) {
            for (double& c : r.a) c = -c;
            r.b = -r.b;
            if (r.rel == Relation::LessEqual) r.rel = Relation::GreaterEqual;
            else if (r.rel == Relation::GreaterEqual) r.rel = Relation::LessEqual;
        }
        if (r.rel != Relation::Equal) ++n_slack;
        if (r.rel != Relation::LessEqual) ++n_art;
    }
    const std::size_t total = ns + n_slack + n_art;
    detail::SimplexTableau t(m, total);
    std::size_t slack_at = ns, art_at = ns + n_slack;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < ns; ++j) t.at(i, j) = rows[i].a[j];
        t.rhs(i) = rows[i].b;
        if (rows[i].rel == Relation::LessEqual) {
            t.at(i, slack_at) = 1.0;
            t.basis_[i] = static_cast<int>(slack_at++);
        } else if (rows[i].rel == Relation::GreaterEqual) {
            t.at(i, slack_at++) = -1.0;
            t.at(i, art_at) = 1.0;
            t.basis_[i] = static_cast<int>(art_at++);
        } else {
            t.at(i, art_at) = 1.0;
            t.basis_[i] = static_cast<int>(art_at++);
        }
    }

    long long pivot_budget = 4000 + 80LL * static_cast<long long>(m + total);
    long long bland_after = 3LL * static_cast<long long>(m);

    // Phase 1: drive the artificials to zero.
    if (n_art > 0) {
        for (std::size_t j = ns + n_slack; j < total; ++j) t.cost(j) = 1.0;
        for (std::size_t i = 0; i < m; ++i)
            if (t.basis_[i] >= static_cast<int>(ns + n_slack))
                for (std::size_t j = 0; j <= total; ++j) t.at(m, j) -= t.at(i, j);
        if (!t.iterate(total, pivot_budget, bland_after))
            throw SolverFailureError("phase 1 unbounded");
        if (t.objective_value() > feas_tol) return LpSolution{LpStatus::Infeasible, {}, 0.0};
        // Pivot leftover artificials out of the basis; rows that cannot be
        // pivoted are redundant and get zeroed.
        for (std::size_t i = 0; i < m; ++i) {
            if (t.basis_[i] < static_cast<int>(ns + n_slack)) continue;
            std::size_t piv = total;
            for (std::size_t j = 0; j < ns + n_slack; ++j)
                if (std::fabs(t.at(i, j)) > 1e-7) { piv = j; break; }
            if (piv < total) t.pivot(i, piv);
            else
                for (std::size_t j = 0; j <= total; ++j)
                    if (j != static_cast<std::size_t>(t.basis_[i])) t.at(i, j) = 0.0;
        }
    }

    // Phase 2: original objective over structural columns only.
    for (std::size_t j = 0; j <= total; ++j) t.at(m, j) = 0.0;
    double sign = lp.sense == Sense::Minimize ? 1.0 : -1.0;
    for (std::size_t col = 0; col < ns; ++col)
        t.cost(col) = sign * lp.obj_coef(static_cast<int>(var_of[col]));
    for (std::size_t i = 0; i < m; ++i) {
        int b = t.basis_[i];
        if (b >= 0 && b < static_cast<int>(ns)) {
            double cb = sign * lp.obj_coef(static_cast<int>(var_of[static_cast<std::size_t>(b)]));
            if (cb != 0.0)
                for (std::size_t j = 0; j <= total; ++j) t.at(m, j) -= cb * t.at(i, j);
        }
    }
    if (!t.iterate(ns + n_slack, pivot_budget, bland_after))
        return LpSolution{LpStatus::Unbounded, {}, 0.0};

    std::vector<double> z(ns, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis_[i] >= 0 && t.basis_[i] < static_cast<int>(ns))
            z[static_cast<std::size_t>(t.basis_[i])] = std::max(0.0, t.rhs(i));
    return finish(z);
}

} // namespace polyround

#endif
