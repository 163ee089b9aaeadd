#ifndef POLYROUND_GAPCAP_HPP
#define POLYROUND_GAPCAP_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "polyround/errors.hpp"
#include "polyround/lp.hpp"
#include "polyround/polytope.hpp"
#include "polyround/rng.hpp"

namespace polyround {

/// GAP with hard per-machine capacities: every job goes to one machine,
/// machine i takes at most b_i jobs, total cost stays under the budget.
struct GapInstance {
    int machines = 0;
    int jobs = 0;
    std::vector<std::vector<double>> p;   // processing time, machines x jobs
    std::vector<std::vector<double>> c;   // assignment cost, machines x jobs
    std::vector<long long> b;             // per-machine job-count capacity
    double cost_budget = std::numeric_limits<double>::infinity();
    std::optional<double> makespan_target;

    void validate() const {
        if (machines <= 0 || jobs <= 0) throw InvalidInputError("empty instance");
        auto check = [&](const std::vector<std::vector<double>>& m, const char* what) {
            if (static_cast<int>(m.size()) != machines) throw InvalidInputError(std::string(what) + ": bad row count");
            for (auto& row : m) {
                if (static_cast<int>(row.size()) != jobs) throw InvalidInputError(std::string(what) + ": bad column count");
                for (double v : row)
                    if (!std::isfinite(v) || v < 0) throw InvalidInputError(std::string(what) + ": entries must be finite and nonnegative");
            }
        };
        check(p, "p");
        check(c, "c");
        if (static_cast<int>(b.size()) != machines) throw InvalidInputError("b: bad length");
        for (long long cap : b)
            if (cap < 0) throw InvalidInputError("b: negative capacity");
        if (std::isnan(cost_budget)) throw InvalidInputError("cost budget is NaN");
    }

    bool all_p_integral() const {
        for (auto& row : p)
            for (double v : row)
                if (v != std::floor(v)) return false;
        return true;
    }

    double sum_max_p() const {
        double s = 0.0;
        for (int j = 0; j < jobs; ++j) {
            double mx = 0.0;
            for (int i = 0; i < machines; ++i) mx = std::max(mx, p[i][j]);
            s += mx;
        }
        return s;
    }
};

struct Schedule {
    std::vector<int> assign;       // job -> machine (-1 means dropped; never in gap-cap)
    std::vector<double> loads;     // per machine
    double makespan = 0.0;
    double cost = 0.0;
    long long iterations = 0;      // randomized-move steps used by the walk
};

/// LP-Cap over edge variables x_{i,j}, pairs with p_{i,j} > T omitted.
struct GapLp {
    LinearProgram lp;
    std::vector<std::vector<int>> var_of;     // machine x job -> variable or -1
    std::vector<std::pair<int, int>> edge_of; // variable -> (machine, job)
};

inline GapLp build_lp_cap(const GapInstance& inst, double T) {
    inst.validate();
    if (!(T > 0)) throw InvalidInputError("makespan guess T must be positive");
    GapLp g;
    g.var_of.assign(static_cast<std::size_t>(inst.machines), std::vector<int>(static_cast<std::size_t>(inst.jobs), -1));
    for (int i = 0; i < inst.machines; ++i)
        for (int j = 0; j < inst.jobs; ++j)
            if (inst.p[i][j] <= T) {
                g.var_of[i][j] = static_cast<int>(g.edge_of.size());
                g.edge_of.emplace_back(i, j);
            }
    g.lp.num_vars = static_cast<int>(g.edge_of.size());
    g.lp.sense = Sense::Minimize; // zero objective: feasibility with cost as a row

    if (std::isfinite(inst.cost_budget)) {
        Constraint cost{{}, Relation::LessEqual, inst.cost_budget, Tag::Cost};
        for (int v = 0; v < g.lp.num_vars; ++v) {
            auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
            if (inst.c[i][j] != 0.0) cost.terms.push_back({v, inst.c[i][j]});
        }
        g.lp.constraints.push_back(std::move(cost));
    }
    for (int j = 0; j < inst.jobs; ++j) {
        Constraint row{{}, Relation::Equal, 1.0, Tag::Assign};
        for (int i = 0; i < inst.machines; ++i)
            if (g.var_of[i][j] >= 0) row.terms.push_back({g.var_of[i][j], 1.0});
        g.lp.constraints.push_back(std::move(row));
    }
    for (int i = 0; i < inst.machines; ++i) {
        Constraint load{{}, Relation::LessEqual, T, Tag::Load};
        Constraint cap{{}, Relation::LessEqual, static_cast<double>(inst.b[i]), Tag::Capacity};
        for (int j = 0; j < inst.jobs; ++j)
            if (g.var_of[i][j] >= 0) {
                if (inst.p[i][j] != 0.0) load.terms.push_back({g.var_of[i][j], inst.p[i][j]});
                cap.terms.push_back({g.var_of[i][j], 1.0});
            }
        g.lp.constraints.push_back(std::move(load));
        g.lp.constraints.push_back(std::move(cap));
    }
    return g;
}

inline bool lp_cap_feasible(const GapInstance& inst, double T) {
    return solve(build_lp_cap(inst, T).lp).status == LpStatus::Optimal;
}

/// Smallest makespan guess with a feasible LP-Cap. Integral processing
/// times admit an exact integer search; otherwise bisection to `precision`
/// (default 1e-6 times the total processing mass).
inline double min_feasible_T(const GapInstance& inst, double precision = -1.0) {
    inst.validate();
    double hi = std::max(1.0, inst.sum_max_p());
    if (!lp_cap_feasible(inst, hi))
        throw InfeasibleInstanceError("LP-Cap infeasible even at the maximum makespan guess");
    if (inst.all_p_integral()) {
        long long lo = 1, top = static_cast<long long>(std::llround(hi));
        while (lo < top) {
            long long mid = lo + (top - lo) / 2;
            if (lp_cap_feasible(inst, static_cast<double>(mid))) top = mid;
            else lo = mid + 1;
        }
        return static_cast<double>(lo);
    }
    if (precision <= 0) precision = 1e-6 * std::max(1.0, inst.sum_max_p());
    double lo = 0.0;
    while (hi - lo > precision) {
        double mid = 0.5 * (lo + hi);
        if (mid <= 0) break;
        if (lp_cap_feasible(inst, mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

namespace detail {

inline long long ceil_snapped(double s, double tol) {
    return std::max<long long>(1, static_cast<long long>(std::ceil(s - tol)));
}

struct GapWalkState {
    Point x;
    long long iterations = 0;
};

/// The Sched-Cap iteration: project to floating variables, apply the
/// machine drop rules by current floating degree, and take one move in the
/// reduced polytope. `pick` chooses between the two branch points, which is
/// where the randomized and the derandomized versions differ.
template <class Picker>
GapWalkState sched_cap_walk(const GapInstance& inst, const GapLp& g, const Point& start, double T,
                            Picker&& pick, double tol = 1e-7) {
    const int nv = g.lp.num_vars;
    if (static_cast<int>(start.size()) != nv) throw InvalidInputError("point size does not match LP-Cap");
    GapWalkState st;
    st.x = start;
    for (double& v : st.x) {
        if (!std::isfinite(v) || v < -tol || v > 1 + tol) throw InvalidInputError("start point outside unit box");
        if (v < tol) v = 0.0;
        else if (v > 1 - tol) v = 1.0;
    }

    std::vector<std::optional<long long>> m2_ceil(static_cast<std::size_t>(inst.machines));
    const long long guard =
        static_cast<long long>(g.lp.constraints.size()) + 2LL * nv;

    while (true) {
        std::vector<int> float_vars;
        std::vector<std::vector<int>> by_machine(static_cast<std::size_t>(inst.machines));
        std::vector<std::vector<int>> by_job(static_cast<std::size_t>(inst.jobs));
        std::vector<int> ones_on_machine(static_cast<std::size_t>(inst.machines), 0);
        std::vector<double> settled_load(static_cast<std::size_t>(inst.machines), 0.0);
        for (int v = 0; v < nv; ++v) {
            auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
            double val = st.x[static_cast<std::size_t>(v)];
            if (val == 1.0) {
                ++ones_on_machine[static_cast<std::size_t>(i)];
                settled_load[static_cast<std::size_t>(i)] += inst.p[i][j];
            } else if (val > 0.0) {
                float_vars.push_back(v);
                by_machine[static_cast<std::size_t>(i)].push_back(v);
                by_job[static_cast<std::size_t>(j)].push_back(v);
            }
        }
        if (float_vars.empty()) break;

        Polytope poly;
        poly.num_vars = nv;
        for (int j = 0; j < inst.jobs; ++j) {
            if (by_job[static_cast<std::size_t>(j)].empty()) continue;
            Constraint row{{}, Relation::Equal, 1.0, Tag::Assign};
            for (int v : by_job[static_cast<std::size_t>(j)]) row.terms.push_back({v, 1.0});
            poly.constraints.push_back(std::move(row));
        }
        for (int i = 0; i < inst.machines; ++i) {
            auto& vars = by_machine[static_cast<std::size_t>(i)];
            std::size_t deg = vars.size();
            if (deg <= 1) continue; // singleton machines lose both rows
            double b_res = static_cast<double>(inst.b[i] - ones_on_machine[static_cast<std::size_t>(i)]);
            double t_res = T - settled_load[static_cast<std::size_t>(i)];
            double float_sum = 0.0, float_load = 0.0;
            for (int v : vars) {
                float_sum += st.x[static_cast<std::size_t>(v)];
                float_load += inst.p[g.edge_of[static_cast<std::size_t>(v)].first]
                                    [g.edge_of[static_cast<std::size_t>(v)].second] *
                              st.x[static_cast<std::size_t>(v)];
            }
            if (deg == 2) {
                // Degree 2: load row dropped; capacity rewritten with the
                // ceiling of the fractional mass at the moment of entry.
                auto& entry = m2_ceil[static_cast<std::size_t>(i)];
                if (!entry) entry = ceil_snapped(float_sum, tol);
                Constraint cap{{}, Relation::LessEqual, static_cast<double>(*entry), Tag::Capacity};
                for (int v : vars) cap.terms.push_back({v, 1.0});
                poly.constraints.push_back(std::move(cap));
                continue;
            }
            bool load_tight = std::fabs(float_load - t_res) <= tol;
            bool cap_tight = std::fabs(float_sum - b_res) <= tol;
            bool drop_load = (deg == 3) && load_tight && cap_tight;
            if (!drop_load) {
                Constraint load{{}, Relation::LessEqual, t_res, Tag::Load};
                for (int v : vars) {
                    auto [mi, mj] = g.edge_of[static_cast<std::size_t>(v)];
                    if (inst.p[mi][mj] != 0.0) load.terms.push_back({v, inst.p[mi][mj]});
                }
                if (!load.terms.empty()) poly.constraints.push_back(std::move(load));
            }
            Constraint cap{{}, Relation::LessEqual, b_res, Tag::Capacity};
            for (int v : vars) cap.terms.push_back({v, 1.0});
            poly.constraints.push_back(std::move(cap));
        }

        MoveBranches mb;
        try {
            mb = compute_move(poly, st.x, tol);
        } catch (const AtVertexError&) {
            // The counting argument rules a vertex out here; dump the degree
            // profile so the failure is diagnosable.
            std::vector<int> mk(6, 0);
            for (int i = 0; i < inst.machines; ++i) {
                std::size_t d = by_machine[static_cast<std::size_t>(i)].size();
                if (d > 0) ++mk[std::min<std::size_t>(d, 5)];
            }
            std::ostringstream os;
            os << "sched-cap walk reached a vertex; machines by floating degree 1..4: " << mk[1]
               << " " << mk[2] << " " << mk[3] << " " << mk[4] << ", degree 5+: " << mk[5]
               << ", floating vars: " << float_vars.size();
            throw InternalInvariantError(os.str());
        }
        st.x = pick(mb);
        ++st.iterations;
        if (st.iterations > guard)
            throw InternalInvariantError("sched-cap walk exceeded the iteration bound");
    }
    return st;
}

inline Schedule schedule_from_point(const GapInstance& inst, const GapLp& g, const Point& x,
                                    long long iterations) {
    Schedule s;
    s.assign.assign(static_cast<std::size_t>(inst.jobs), -1);
    s.loads.assign(static_cast<std::size_t>(inst.machines), 0.0);
    s.iterations = iterations;
    for (int v = 0; v < g.lp.num_vars; ++v) {
        if (x[static_cast<std::size_t>(v)] != 1.0) continue;
        auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
        if (s.assign[static_cast<std::size_t>(j)] != -1)
            throw InternalInvariantError("job assigned twice after rounding");
        s.assign[static_cast<std::size_t>(j)] = i;
        s.loads[static_cast<std::size_t>(i)] += inst.p[i][j];
        s.cost += inst.c[i][j];
    }
    for (int j = 0; j < inst.jobs; ++j)
        if (s.assign[static_cast<std::size_t>(j)] < 0)
            throw InternalInvariantError("job left unassigned after rounding");
    std::vector<int> counts(static_cast<std::size_t>(inst.machines), 0);
    for (int m : s.assign) ++counts[static_cast<std::size_t>(m)];
    for (int i = 0; i < inst.machines; ++i)
        if (counts[static_cast<std::size_t>(i)] > inst.b[i])
            throw InternalInvariantError("capacity violated after rounding");
    s.makespan = *std::max_element(s.loads.begin(), s.loads.end());
    return s;
}

} // namespace detail

/// Randomized rounding of an LP-Cap solution. With probability one the
/// output respects every capacity and each machine's load stays below its
/// fractional load plus its largest fractional processing time; per-edge
/// expectations equal the input.
inline Schedule sched_cap_round(const GapInstance& inst, const GapLp& g, const Point& x_star,
                                double T, Rng& rng) {
    auto st = detail::sched_cap_walk(inst, g, x_star, T, [&rng](const MoveBranches& mb) {
        return rng.bernoulli(mb.prob_up) ? mb.up : mb.down;
    });
    return detail::schedule_from_point(inst, g, st.x, st.iterations);
}

/// Method of conditional expectation on the cost functional: at each branch
/// point take the side whose cost does not exceed the current one. Keeps
/// every guarantee of the randomized walk and ends with cost at most the
/// fractional cost.
inline Schedule derandomize_cost(const GapInstance& inst, const GapLp& g, const Point& x_star,
                                 double T) {
    auto cost_of = [&](const Point& x) {
        double s = 0.0;
        for (int v = 0; v < g.lp.num_vars; ++v) {
            auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
            s += inst.c[i][j] * x[static_cast<std::size_t>(v)];
        }
        return s;
    };
    auto st = detail::sched_cap_walk(inst, g, x_star, T, [&](const MoveBranches& mb) {
        return cost_of(mb.up) <= cost_of(mb.down) ? mb.up : mb.down;
    });
    return detail::schedule_from_point(inst, g, st.x, st.iterations);
}

/// End-to-end Sched-Cap: binary-search the makespan guess, solve LP-Cap,
/// and round (derandomized on cost by default).
inline Schedule solve_gap_cap(const GapInstance& inst, Rng* rng = nullptr) {
    double T = inst.makespan_target ? *inst.makespan_target : min_feasible_T(inst);
    GapLp g = build_lp_cap(inst, T);
    LpSolution sol = solve(g.lp);
    if (sol.status != LpStatus::Optimal)
        throw InfeasibleInstanceError("LP-Cap infeasible at the requested makespan target");
    return rng ? sched_cap_round(inst, g, sol.values, T, *rng)
               : derandomize_cost(inst, g, sol.values, T);
}

} // namespace polyround

#endif
