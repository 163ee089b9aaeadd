#ifndef POLYROUND_POLYTOPE_HPP
#define POLYROUND_POLYTOPE_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polyround/errors.hpp"
#include "polyround/linalg.hpp"
#include "polyround/rng.hpp"

namespace polyround {

using VarId = int;

enum class Relation { LessEqual, Equal, GreaterEqual };

/// Origin of a constraint row; carried through drop rules and reports.
enum class Tag { Assign, Load, Capacity, Cost, Profit, BundleProfit, Box };

inline const char* tag_name(Tag t) {
    switch (t) {
        case Tag::Assign: return "Assign";
        case Tag::Load: return "Load";
        case Tag::Capacity: return "Capacity";
        case Tag::Cost: return "Cost";
        case Tag::Profit: return "Profit";
        case Tag::BundleProfit: return "BundleProfit";
        case Tag::Box: return "Box";
    }
    return "?";
}

struct Constraint {
    std::vector<std::pair<VarId, double>> terms;
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;
    Tag tag = Tag::Assign;

    double lhs_at(const std::vector<double>& x) const {
        double s = 0.0;
        for (auto [v, c] : terms) s += c * x[static_cast<std::size_t>(v)];
        return s;
    }

    /// Nonnegative slack means satisfied; equalities report -|lhs - rhs|.
    double slack_at(const std::vector<double>& x) const {
        double lhs = lhs_at(x);
        switch (rel) {
            case Relation::LessEqual: return rhs - lhs;
            case Relation::GreaterEqual: return lhs - rhs;
            case Relation::Equal: return -std::fabs(lhs - rhs);
        }
        return 0.0;
    }
};

/// Variables live in [0,1]; the box is implicit and never stored as rows.
struct Polytope {
    int num_vars = 0;
    std::vector<Constraint> constraints;

    void validate() const {
        for (const Constraint& c : constraints) {
            if (c.terms.empty()) throw InvalidInputError("constraint with no terms");
            if (!std::isfinite(c.rhs)) throw InvalidInputError("non-finite rhs");
            for (auto [v, coef] : c.terms) {
                if (v < 0 || v >= num_vars) throw InvalidInputError("constraint references unknown variable");
                if (!std::isfinite(coef)) throw InvalidInputError("non-finite coefficient");
            }
        }
    }
};

/// A point of the polytope, indexed like its variables.
using Point = std::vector<double>;

/// A box face that is tight at the current point.
struct TightBox {
    VarId var;
    bool at_one; // false: x_v = 0, true: x_v = 1
};

struct TightSet {
    std::vector<std::size_t> rows; // indices into Polytope::constraints
    std::vector<TightBox> box;
};

inline void check_membership(const Polytope& p, const Point& x, double tol) {
    if (static_cast<int>(x.size()) != p.num_vars)
        throw InvalidInputError("point dimension does not match polytope");
    for (double v : x) {
        if (!std::isfinite(v)) throw InvalidInputError("non-finite point coordinate");
        if (v < -tol || v > 1.0 + tol) throw InfeasiblePointError("point outside the unit box");
    }
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
        if (p.constraints[i].slack_at(x) < -tol) {
            std::ostringstream os;
            os << "point violates constraint " << i << " (" << tag_name(p.constraints[i].tag)
               << ") by " << -p.constraints[i].slack_at(x);
            throw InfeasiblePointError(os.str());
        }
}

/// Rows satisfied with equality at x (within tol), plus the box faces hit.
inline TightSet tight_set(const Polytope& p, const Point& x, double tol = 1e-7) {
    check_membership(p, x, tol);
    TightSet t;
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        const Constraint& c = p.constraints[i];
        if (c.rel == Relation::Equal || std::fabs(c.slack_at(x)) <= tol) t.rows.push_back(i);
    }
    for (VarId v = 0; v < p.num_vars; ++v) {
        double val = x[static_cast<std::size_t>(v)];
        if (val <= tol) t.box.push_back({v, false});
        else if (val >= 1.0 - tol) t.box.push_back({v, true});
    }
    return t;
}

namespace detail {

/// Tight rows restricted to the floating variables (those strictly inside
/// the box). Variables at 0/1 are frozen: their box rows are tight, which
/// the restriction expresses by simply omitting their columns.
struct ReducedTight {
    std::vector<VarId> floating;            // column order
    std::vector<int> col_of;                // var -> column or -1
    Matrix a;                               // tight rows x floating columns
};

inline ReducedTight reduce_tight(const Polytope& p, const Point& x, double tol) {
    ReducedTight r;
    r.col_of.assign(static_cast<std::size_t>(p.num_vars), -1);
    for (VarId v = 0; v < p.num_vars; ++v) {
        double val = x[static_cast<std::size_t>(v)];
        if (val > tol && val < 1.0 - tol) {
            r.col_of[static_cast<std::size_t>(v)] = static_cast<int>(r.floating.size());
            r.floating.push_back(v);
        }
    }
    TightSet t = tight_set(p, x, tol);
    std::vector<std::vector<double>> rows;
    for (std::size_t idx : t.rows) {
        std::vector<double> row(r.floating.size(), 0.0);
        bool touches = false;
        for (auto [v, c] : p.constraints[idx].terms) {
            int col = r.col_of[static_cast<std::size_t>(v)];
            if (col >= 0 && c != 0.0) {
                row[static_cast<std::size_t>(col)] = c;
                touches = true;
            }
        }
        if (touches) rows.push_back(std::move(row));
    }
    r.a = Matrix(rows.size(), r.floating.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < r.floating.size(); ++j) r.a(i, j) = rows[i][j];
    return r;
}

} // namespace detail

/// x is a vertex iff the tight rows restricted to floating variables have
/// full column rank (no floating variables means trivially a vertex).
inline bool is_vertex(const Polytope& p, const Point& x, double tol = 1e-7) {
    detail::ReducedTight r = detail::reduce_tight(p, x, tol);
    if (r.floating.empty()) return true;
    return rank(r.a) == r.floating.size();
}

/// The two candidate endpoints of one RandMove step and the probability of
/// taking the +direction branch. Exposing the pair keeps the conditional-
/// expectation derandomization and the exact two-branch tests independent
/// of any RNG.
struct MoveBranches {
    Point up;
    Point down;
    double prob_up;
};

namespace detail {

inline void snap_unit(Point& x, double tol) {
    for (double& v : x) {
        if (v < tol) v = 0.0;
        else if (v > 1.0 - tol) v = 1.0;
    }
}

/// Largest step t >= 0 along direction r keeping every constraint of P and
/// the unit box satisfied. Tight rows have r in their nullspace so they do
/// not bound the step (their |a.r| is ~0 and slack ~0; skip them).
inline double max_step(const Polytope& p, const Point& x, const std::vector<double>& dir,
                       double tol) {
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < x.size(); ++v) {
        if (dir[v] > tol) t = std::min(t, (1.0 - x[v]) / dir[v]);
        else if (dir[v] < -tol) t = std::min(t, x[v] / -dir[v]);
    }
    for (const Constraint& c : p.constraints) {
        double d = 0.0;
        for (auto [v, coef] : c.terms) d += coef * dir[static_cast<std::size_t>(v)];
        double slack = c.slack_at(x);
        if (c.rel == Relation::Equal || std::fabs(slack) <= tol) continue;
        if (c.rel == Relation::LessEqual && d > tol) t = std::min(t, slack / d);
        else if (c.rel == Relation::GreaterEqual && d < -tol) t = std::min(t, slack / -d);
    }
    return t;
}

} // namespace detail

/// Compute one RandMove step's branch points without sampling.
/// Throws AtVertexError when x is a vertex of P at tolerance tol.
inline MoveBranches compute_move(const Polytope& p, const Point& x, double tol = 1e-7) {
    detail::ReducedTight red = detail::reduce_tight(p, x, tol);
    if (red.floating.empty()) throw AtVertexError("rand_move called with no floating variables");
    auto basis = nullspace_basis(red.a);
    if (basis.empty()) throw AtVertexError("rand_move called at a vertex");

    // Any nullspace direction is admissible; take free columns in order and
    // fall back to the next one if travel degenerates numerically.
    for (const auto& rf : basis) {
        std::vector<double> dir(x.size(), 0.0);
        for (std::size_t j = 0; j < red.floating.size(); ++j)
            dir[static_cast<std::size_t>(red.floating[j])] = rf[j];
        std::vector<double> neg(dir.size());
        for (std::size_t j = 0; j < dir.size(); ++j) neg[j] = -dir[j];

        double f_plus = detail::max_step(p, x, dir, tol);
        double f_minus = detail::max_step(p, x, neg, tol);
        if (!(f_plus > 0.0) || !(f_minus > 0.0) || !std::isfinite(f_plus) || !std::isfinite(f_minus))
            continue;

        MoveBranches mb;
        mb.up = x;
        mb.down = x;
        for (std::size_t j = 0; j < dir.size(); ++j) {
            mb.up[j] += f_plus * dir[j];
            mb.down[j] -= f_minus * dir[j];
        }
        detail::snap_unit(mb.up, tol);
        detail::snap_unit(mb.down, tol);
        mb.prob_up = f_minus / (f_plus + f_minus);
        return mb;
    }
    throw DegenerateDirectionError(
        "no nullspace direction admits positive travel both ways (drop-rule bug?)");
}

/// One randomized step: Y = x + f(r) r with probability f(-r)/(f(r)+f(-r)),
/// else Y = x - f(-r) r. Preserves every tight constraint, makes at least
/// one new constraint tight, and preserves per-coordinate expectations.
inline Point rand_move(const Polytope& p, const Point& x, Rng& rng, double tol = 1e-7) {
    MoveBranches mb = compute_move(p, x, tol);
    return rng.bernoulli(mb.prob_up) ? mb.up : mb.down;
}

} // namespace polyround

#endif
