#ifndef POLYROUND_OUTLIER_HPP
#define POLYROUND_OUTLIER_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "polyround/errors.hpp"
#include "polyround/gapcap.hpp"
#include "polyround/lp.hpp"
#include "polyround/polytope.hpp"
#include "polyround/rng.hpp"

namespace polyround {

/// GAP with droppable jobs: job j earns profit pi_j when scheduled, and the
/// total scheduled profit must reach the hard floor Pi.
struct OutlierInstance {
    GapInstance base;             // capacities unused here
    std::vector<double> profits;
    double profit_floor = 0.0;
    double epsilon = 0.5;         // accuracy knob; expensive pairs have c > eps^2 C

    double eps_prime() const { return epsilon * epsilon; }

    void validate() const {
        GapInstance g = base;
        if (g.b.empty()) g.b.assign(static_cast<std::size_t>(g.machines), g.jobs);
        g.validate();
        if (static_cast<int>(profits.size()) != base.jobs)
            throw InvalidInputError("profits: bad length");
        double total = 0.0;
        for (double v : profits) {
            if (!std::isfinite(v) || v < 0) throw InvalidInputError("profits must be finite and nonnegative");
            total += v;
        }
        if (!std::isfinite(profit_floor) || profit_floor < 0)
            throw InvalidInputError("profit floor must be finite and nonnegative");
        if (profit_floor > total + 1e-12)
            throw InvalidInputError("profit floor exceeds the total available profit");
        if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw InvalidInputError("epsilon must lie in (0,1)");
        if (!std::isfinite(base.cost_budget)) throw InvalidInputError("outlier instances need a finite cost budget");
    }
};

/// A guessed assignment of the expensive pairs (cost above eps^2 C):
/// the listed pairs are pinned to 1, every other expensive pair to 0.
struct Guess {
    std::vector<std::pair<int, int>> ones;
};

inline std::vector<std::pair<int, int>> expensive_pairs(const OutlierInstance& inst) {
    std::vector<std::pair<int, int>> out;
    double threshold = inst.eps_prime() * inst.base.cost_budget;
    for (int i = 0; i < inst.base.machines; ++i)
        for (int j = 0; j < inst.base.jobs; ++j)
            if (inst.base.c[i][j] > threshold) out.emplace_back(i, j);
    return out;
}

/// Every pin pattern a feasible schedule could induce on the expensive
/// pairs: at most floor(1/eps^2) of them set to 1, no job twice. Includes
/// the all-zero guess.
inline std::vector<Guess> enumerate_guesses(const OutlierInstance& inst,
                                            std::size_t max_guesses = 200000) {
    inst.validate();
    auto pairs = expensive_pairs(inst);
    auto limit = static_cast<std::size_t>(std::floor(1.0 / inst.eps_prime() + 1e-9));
    std::vector<Guess> out;
    std::vector<std::pair<int, int>> chosen;
    std::set<int> used_jobs;
    auto rec = [&](auto&& self, std::size_t from) -> void {
        if (out.size() >= max_guesses)
            throw BudgetExceededError("too many expensive-pair guesses; increase epsilon");
        out.push_back(Guess{chosen});
        if (chosen.size() == limit) return;
        for (std::size_t k = from; k < pairs.size(); ++k) {
            if (used_jobs.count(pairs[k].second)) continue;
            chosen.push_back(pairs[k]);
            used_jobs.insert(pairs[k].second);
            self(self, k + 1);
            used_jobs.erase(pairs[k].second);
            chosen.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

/// LP-Out with the job variables y_j substituted out: per-job totals are
/// bounded by 1, profit is a single >= row over the edge variables, and the
/// guess pins become fixed variable bounds.
inline GapLp build_lp_out(const OutlierInstance& inst, double T, const Guess& guess) {
    inst.validate();
    if (!(T > 0)) throw InvalidInputError("makespan guess T must be positive");
    const GapInstance& base = inst.base;

    GapLp g;
    g.var_of.assign(static_cast<std::size_t>(base.machines),
                    std::vector<int>(static_cast<std::size_t>(base.jobs), -1));
    for (int i = 0; i < base.machines; ++i)
        for (int j = 0; j < base.jobs; ++j)
            if (base.p[i][j] <= T) {
                g.var_of[i][j] = static_cast<int>(g.edge_of.size());
                g.edge_of.emplace_back(i, j);
            }
    g.lp.num_vars = static_cast<int>(g.edge_of.size());
    g.lp.bounds.assign(static_cast<std::size_t>(g.lp.num_vars), {0.0, 1.0});

    double threshold = inst.eps_prime() * base.cost_budget;
    bool impossible = false;
    for (int i = 0; i < base.machines; ++i)
        for (int j = 0; j < base.jobs; ++j) {
            if (base.c[i][j] <= threshold) continue;
            bool pinned_one =
                std::find(guess.ones.begin(), guess.ones.end(), std::make_pair(i, j)) != guess.ones.end();
            int v = g.var_of[i][j];
            if (v < 0) {
                if (pinned_one) impossible = true; // pinned onto a pruned pair
                continue;
            }
            g.lp.bounds[static_cast<std::size_t>(v)] = pinned_one ? std::make_pair(1.0, 1.0)
                                                                  : std::make_pair(0.0, 0.0);
        }
    if (impossible)
        g.lp.constraints.push_back({{}, Relation::GreaterEqual, 1.0, Tag::Assign});

    Constraint cost{{}, Relation::LessEqual, base.cost_budget, Tag::Cost};
    for (int v = 0; v < g.lp.num_vars; ++v) {
        auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
        if (base.c[i][j] != 0.0) cost.terms.push_back({v, base.c[i][j]});
    }
    if (!cost.terms.empty()) g.lp.constraints.push_back(std::move(cost));

    for (int j = 0; j < base.jobs; ++j) {
        Constraint row{{}, Relation::LessEqual, 1.0, Tag::Assign};
        for (int i = 0; i < base.machines; ++i)
            if (g.var_of[i][j] >= 0) row.terms.push_back({g.var_of[i][j], 1.0});
        if (!row.terms.empty()) g.lp.constraints.push_back(std::move(row));
    }
    for (int i = 0; i < base.machines; ++i) {
        Constraint load{{}, Relation::LessEqual, T, Tag::Load};
        for (int j = 0; j < base.jobs; ++j)
            if (g.var_of[i][j] >= 0 && base.p[i][j] != 0.0)
                load.terms.push_back({g.var_of[i][j], base.p[i][j]});
        if (!load.terms.empty()) g.lp.constraints.push_back(std::move(load));
    }
    Constraint profit{{}, Relation::GreaterEqual, inst.profit_floor, Tag::Profit};
    for (int v = 0; v < g.lp.num_vars; ++v) {
        auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
        if (inst.profits[static_cast<std::size_t>(j)] != 0.0)
            profit.terms.push_back({v, inst.profits[static_cast<std::size_t>(j)]});
    }
    if (!profit.terms.empty() || inst.profit_floor > 0)
        g.lp.constraints.push_back(std::move(profit));
    return g;
}

enum class Config { None, Config1, Config2, Config3, Config4, Config5 };

inline const char* config_name(Config c) {
    switch (c) {
        case Config::None: return "none";
        case Config::Config1: return "config-1";
        case Config::Config2: return "config-2";
        case Config::Config3: return "config-3";
        case Config::Config4: return "config-4";
        case Config::Config5: return "config-5";
    }
    return "?";
}

/// The floating machine-job subgraph inspected by the terminal step.
struct FloatingSubgraph {
    std::map<int, std::vector<int>> machine_jobs; // machine -> floating jobs on it
    std::map<int, std::vector<int>> job_machines; // job -> machines holding it
};

/// Classification of a terminal vertex state by singleton count and degree
/// profile. Anything else is None, which callers treat as an invariant
/// failure when the state was claimed to be a vertex.
inline Config classify_config(const FloatingSubgraph& g) {
    int n1 = 0, n2 = 0, n3 = 0, n_other = 0;
    for (auto& [j, ms] : g.job_machines) {
        switch (ms.size()) {
            case 1: ++n1; break;
            case 2: ++n2; break;
            case 3: ++n3; break;
            default: ++n_other; break;
        }
    }
    int m1 = 0, m2 = 0, m3 = 0, m_other = 0;
    for (auto& [i, js] : g.machine_jobs) {
        switch (js.size()) {
            case 1: ++m1; break;
            case 2: ++m2; break;
            case 3: ++m3; break;
            default: ++m_other; break;
        }
    }
    if (n_other > 0 || m_other > 0) return Config::None;
    if (n1 == 0 && n3 == 0 && m1 == 0 && m3 == 0) return Config::Config1;
    if (n1 == 2 && n3 == 0 && m1 == 0 && m3 == 0) return Config::Config2;
    if (n1 == 1 && n3 == 1 && m1 == 0 && m3 == 0) return Config::Config3;
    if (n1 == 1 && n3 == 0 && m1 == 0 && m3 == 1) return Config::Config4;
    if (n1 == 1 && n3 == 0 && m1 == 1 && m3 == 0) return Config::Config5;
    return Config::None;
}

struct OutlierSchedule {
    std::vector<int> assign; // job -> machine, -1 when dropped
    std::vector<double> loads;
    double makespan = 0.0;
    double cost = 0.0;
    double profit = 0.0;
    long long iterations = 0;
    bool final_step_used = false;
    Config terminal_config = Config::None;
    double lp_makespan_guess = 0.0;
};

namespace detail {

struct OutWalk {
    OutWalk(const OutlierInstance& inst_, const GapLp& g_, double T_)
        : inst(inst_), g(g_), T(T_) {}

    const OutlierInstance& inst;
    const GapLp& g;
    double T;
    double tol = 1e-7;

    Point x;
    std::set<int> folded_jobs;     // assign row replaced by the bundle profit row
    std::set<int> dropped_load;    // machines whose load row is gone for good
    long long iterations = 0;
    bool final_step_used = false;
    Config terminal_config = Config::None;

    std::vector<std::vector<int>> by_machine, by_job;

    void scan_floating() {
        by_machine.assign(static_cast<std::size_t>(inst.base.machines), {});
        by_job.assign(static_cast<std::size_t>(inst.base.jobs), {});
        for (int v = 0; v < g.lp.num_vars; ++v) {
            double val = x[static_cast<std::size_t>(v)];
            if (val > 0.0 && val < 1.0) {
                auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
                by_machine[static_cast<std::size_t>(i)].push_back(v);
                by_job[static_cast<std::size_t>(j)].push_back(v);
            }
        }
    }

    bool any_floating() const {
        for (auto& vars : by_job)
            if (!vars.empty()) return true;
        return false;
    }

    double job_sum(int j) const {
        double s = 0.0;
        for (int v : by_job[static_cast<std::size_t>(j)]) s += x[static_cast<std::size_t>(v)];
        return s;
    }

    double machine_sum(int i) const {
        double s = 0.0;
        for (int v : by_machine[static_cast<std::size_t>(i)]) s += x[static_cast<std::size_t>(v)];
        return s;
    }

    Polytope build_system() {
        Polytope poly;
        poly.num_vars = g.lp.num_vars;
        // Singleton jobs fold into the shared profit row.
        for (int j = 0; j < inst.base.jobs; ++j)
            if (by_job[static_cast<std::size_t>(j)].size() == 1) folded_jobs.insert(j);

        Constraint bundle{{}, Relation::Equal, 0.0, Tag::BundleProfit};
        double bundle_value = 0.0;
        for (int j = 0; j < inst.base.jobs; ++j) {
            auto& vars = by_job[static_cast<std::size_t>(j)];
            if (vars.empty()) continue;
            if (folded_jobs.count(j)) {
                double pi = inst.profits[static_cast<std::size_t>(j)];
                for (int v : vars) {
                    bundle.terms.push_back({v, pi});
                    bundle_value += pi * x[static_cast<std::size_t>(v)];
                }
                if (vars.size() >= 2) {
                    // The dropped assignment row survives only as a slack
                    // barrier so a folded job can never exceed one machine.
                    Constraint ub{{}, Relation::LessEqual, 1.0, Tag::Assign};
                    for (int v : vars) ub.terms.push_back({v, 1.0});
                    poly.constraints.push_back(std::move(ub));
                }
            } else {
                Constraint row{{}, Relation::Equal, job_sum(j), Tag::Assign};
                for (int v : vars) row.terms.push_back({v, 1.0});
                poly.constraints.push_back(std::move(row));
            }
        }
        if (!bundle.terms.empty()) {
            bundle.rhs = bundle_value;
            poly.constraints.push_back(std::move(bundle));
        }
        for (int i = 0; i < inst.base.machines; ++i) {
            auto& vars = by_machine[static_cast<std::size_t>(i)];
            if (vars.size() <= 1) continue; // singleton machines shed their load row
            if (dropped_load.count(i)) continue;
            double settled = 0.0;
            for (int v = 0; v < g.lp.num_vars; ++v)
                if (x[static_cast<std::size_t>(v)] == 1.0 &&
                    g.edge_of[static_cast<std::size_t>(v)].first == i)
                    settled += inst.base.p[i][g.edge_of[static_cast<std::size_t>(v)].second];
            Constraint load{{}, Relation::LessEqual, T - settled, Tag::Load};
            for (int v : vars) {
                auto [mi, mj] = g.edge_of[static_cast<std::size_t>(v)];
                if (inst.base.p[mi][mj] != 0.0) load.terms.push_back({v, inst.base.p[mi][mj]});
            }
            if (!load.terms.empty()) poly.constraints.push_back(std::move(load));
        }
        return poly;
    }

    FloatingSubgraph subgraph() const {
        FloatingSubgraph fs;
        for (int i = 0; i < inst.base.machines; ++i)
            for (int v : by_machine[static_cast<std::size_t>(i)])
                fs.machine_jobs[i].push_back(g.edge_of[static_cast<std::size_t>(v)].second);
        for (int j = 0; j < inst.base.jobs; ++j)
            for (int v : by_job[static_cast<std::size_t>(j)])
                fs.job_machines[j].push_back(g.edge_of[static_cast<std::size_t>(v)].first);
        return fs;
    }

    [[noreturn]] void dump_and_fail(const char* what) const {
        std::ostringstream os;
        os << what << "; floating subgraph:";
        for (int j = 0; j < inst.base.jobs; ++j)
            for (int v : by_job[static_cast<std::size_t>(j)])
                os << " (" << g.edge_of[static_cast<std::size_t>(v)].first << "," << j << ")="
                   << x[static_cast<std::size_t>(v)];
        throw InternalInvariantError(os.str());
    }

    int var_at(int i, int j) const { return g.var_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

    /// The combinatorial last step of the algorithm, entered only when the
    /// fully reduced system is a vertex.
    void terminal_step() {
        final_step_used = true;
        FloatingSubgraph fs = subgraph();
        if (static_cast<double>(fs.machine_jobs.size()) >= std::ceil(1.0 / inst.epsilon))
            dump_and_fail("terminal state reached with too many floating machines");
        terminal_config = classify_config(fs);
        if (terminal_config == Config::None) dump_and_fail("unrecognized terminal configuration");

        std::set<int> discarded;
        std::map<int, int> forced;   // job -> machine, fixed before the matching
        std::set<int> closed_machines;

        if (terminal_config == Config::Config2) {
            std::vector<int> singles;
            for (auto& [j, ms] : fs.job_machines)
                if (ms.size() == 1) singles.push_back(j);
            int j1 = singles[0], j2 = singles[1];
            double v1 = x[static_cast<std::size_t>(var_at(fs.job_machines[j1][0], j1))];
            double v2 = x[static_cast<std::size_t>(var_at(fs.job_machines[j2][0], j2))];
            if (v1 + v2 >= 1.0 - tol)
                dump_and_fail("config-2 terminal with combined singleton mass at least 1");
            double p1 = inst.profits[static_cast<std::size_t>(j1)];
            double p2 = inst.profits[static_cast<std::size_t>(j2)];
            int drop = p1 < p2 ? j1 : (p2 < p1 ? j2 : std::max(j1, j2));
            discarded.insert(drop);
        } else if (terminal_config == Config::Config4) {
            int deg3 = -1;
            for (auto& [i, js] : fs.machine_jobs)
                if (js.size() == 3) deg3 = i;
            int singleton = -1;
            std::vector<int> others;
            for (int j : fs.machine_jobs[deg3]) {
                if (fs.job_machines.at(j).size() == 1) singleton = j;
                else others.push_back(j);
            }
            if (singleton < 0 || others.size() != 2)
                dump_and_fail("config-4 terminal without a singleton on the degree-3 machine");
            int j1 = others[0], j2 = others[1];
            double mass = x[static_cast<std::size_t>(var_at(deg3, j1))] +
                          x[static_cast<std::size_t>(var_at(deg3, j2))];
            if (mass <= 1.0 + tol)
                dump_and_fail("config-4 terminal with non-singleton mass at most 1");
            int cheap = inst.base.p[deg3][j1] <= inst.base.p[deg3][j2] ? j1 : j2;
            int pricey = cheap == j1 ? j2 : j1;
            forced[singleton] = deg3;
            forced[cheap] = deg3;
            // The remaining job of the degree-3 machine goes to its other machine.
            int other_machine = -1;
            for (int mi : fs.job_machines[pricey])
                if (mi != deg3) other_machine = mi;
            if (other_machine < 0) dump_and_fail("config-4 pricier job has no second machine");
            forced[pricey] = other_machine;
            closed_machines.insert(deg3);
            closed_machines.insert(other_machine);
        }

        // Jobs still to place, each on an adjacent machine, one new job per
        // machine. Augmenting-path matching over the tiny subgraph.
        std::vector<int> jobs_to_place;
        for (auto& [j, ms] : fs.job_machines)
            if (!discarded.count(j) && !forced.count(j)) jobs_to_place.push_back(j);
        std::map<int, int> match_of_machine;
        auto augment = [&](auto&& self, int j, std::set<int>& visited) -> bool {
            for (int i : fs.job_machines[j]) {
                if (closed_machines.count(i) || visited.count(i)) continue;
                visited.insert(i);
                auto it = match_of_machine.find(i);
                if (it == match_of_machine.end() || self(self, it->second, visited)) {
                    match_of_machine[i] = j;
                    return true;
                }
            }
            return false;
        };
        for (int j : jobs_to_place) {
            std::set<int> visited;
            if (!augment(augment, j, visited)) dump_and_fail("terminal matching failed to place a job");
        }

        std::map<int, int> final_assign = forced;
        for (auto& [i, j] : match_of_machine) final_assign[j] = i;
        for (int j = 0; j < inst.base.jobs; ++j) {
            for (int v : by_job[static_cast<std::size_t>(j)]) x[static_cast<std::size_t>(v)] = 0.0;
            auto it = final_assign.find(j);
            if (it != final_assign.end())
                x[static_cast<std::size_t>(var_at(it->second, j))] = 1.0;
        }
    }

    template <class Picker>
    void run(Picker&& pick) {
        const long long guard = static_cast<long long>(g.lp.constraints.size()) + 2LL * g.lp.num_vars;
        while (true) {
            scan_floating();
            if (!any_floating()) return;
            Polytope poly = build_system();
            if (is_vertex(poly, x, tol)) {
                // Step 3: consolidate the nontight jobs into the profit row.
                bool changed = false;
                for (int j = 0; j < inst.base.jobs; ++j) {
                    if (by_job[static_cast<std::size_t>(j)].empty() || folded_jobs.count(j)) continue;
                    if (job_sum(j) < 1.0 - tol) {
                        folded_jobs.insert(j);
                        changed = true;
                    }
                }
                if (changed) poly = build_system();
                if (is_vertex(poly, x, tol)) {
                    // Step 3, second half: shed load rows on machines whose
                    // fractional assignment nearly matches their degree.
                    bool dropped = false;
                    for (int i = 0; i < inst.base.machines; ++i) {
                        auto d = static_cast<double>(by_machine[static_cast<std::size_t>(i)].size());
                        if (d < 1 || dropped_load.count(i)) continue;
                        if (machine_sum(i) >= d - 1.0 - inst.epsilon) {
                            dropped_load.insert(i);
                            dropped = true;
                        }
                    }
                    if (dropped) poly = build_system();
                    if (is_vertex(poly, x, tol)) {
                        terminal_step();
                        return;
                    }
                }
            }
            MoveBranches mb = compute_move(poly, x, tol);
            x = pick(mb);
            ++iterations;
            if (iterations > guard)
                throw InternalInvariantError("sched-outlier walk exceeded the iteration bound");
        }
    }
};

inline OutlierSchedule outlier_schedule_from_point(const OutlierInstance& inst, const GapLp& g,
                                                   const OutWalk& walk, double T) {
    OutlierSchedule s;
    s.assign.assign(static_cast<std::size_t>(inst.base.jobs), -1);
    s.loads.assign(static_cast<std::size_t>(inst.base.machines), 0.0);
    s.iterations = walk.iterations;
    s.final_step_used = walk.final_step_used;
    s.terminal_config = walk.terminal_config;
    s.lp_makespan_guess = T;
    for (int v = 0; v < g.lp.num_vars; ++v) {
        if (walk.x[static_cast<std::size_t>(v)] != 1.0) continue;
        auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
        if (s.assign[static_cast<std::size_t>(j)] != -1)
            throw InternalInvariantError("job assigned to two machines after rounding");
        s.assign[static_cast<std::size_t>(j)] = i;
        s.loads[static_cast<std::size_t>(i)] += inst.base.p[i][j];
        s.cost += inst.base.c[i][j];
        s.profit += inst.profits[static_cast<std::size_t>(j)];
    }
    s.makespan = *std::max_element(s.loads.begin(), s.loads.end());
    if (s.profit < inst.profit_floor - 1e-6)
        throw InternalInvariantError("scheduled profit fell below the floor");
    return s;
}

} // namespace detail

/// Randomized Sched-Outlier rounding of an LP-Out solution at makespan
/// guess T. Profit stays at or above the floor with probability one; each
/// machine's final load stays below its fractional load plus (1+epsilon)
/// times its largest fractional processing time.
inline OutlierSchedule sched_outlier_round(const OutlierInstance& inst, const GapLp& g,
                                           const Point& x_star, double T, Rng& rng) {
    detail::OutWalk walk(inst, g, T);
    walk.x = x_star;
    for (double& v : walk.x) {
        if (v < walk.tol) v = 0.0;
        else if (v > 1.0 - walk.tol) v = 1.0;
    }
    walk.run([&rng](const MoveBranches& mb) { return rng.bernoulli(mb.prob_up) ? mb.up : mb.down; });
    return detail::outlier_schedule_from_point(inst, g, walk, T);
}

/// Derandomized variant: conditional expectation on the cost functional up
/// to the final combinatorial step.
inline OutlierSchedule sched_outlier_derandomized(const OutlierInstance& inst, const GapLp& g,
                                                  const Point& x_star, double T) {
    detail::OutWalk walk(inst, g, T);
    walk.x = x_star;
    for (double& v : walk.x) {
        if (v < walk.tol) v = 0.0;
        else if (v > 1.0 - walk.tol) v = 1.0;
    }
    auto cost_of = [&](const Point& x) {
        double s = 0.0;
        for (int v = 0; v < g.lp.num_vars; ++v) {
            auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
            s += inst.base.c[i][j] * x[static_cast<std::size_t>(v)];
        }
        return s;
    };
    walk.run([&](const MoveBranches& mb) { return cost_of(mb.up) <= cost_of(mb.down) ? mb.up : mb.down; });
    return detail::outlier_schedule_from_point(inst, g, walk, T);
}

/// Binary search on the makespan guess over all expensive-pair guesses,
/// then round the first feasible LP at the smallest feasible T.
/// Randomized when an Rng is supplied, derandomized on cost otherwise.
inline OutlierSchedule solve_outlier(const OutlierInstance& inst, Rng* rng = nullptr,
                                     std::size_t max_guesses = 200000) {
    inst.validate();
    std::vector<Guess> guesses = enumerate_guesses(inst, max_guesses);

    auto first_feasible = [&](double T) -> std::optional<std::pair<GapLp, LpSolution>> {
        for (const Guess& guess : guesses) {
            GapLp g = build_lp_out(inst, T, guess);
            LpSolution sol = solve(g.lp);
            if (sol.status == LpStatus::Optimal) return std::make_pair(std::move(g), std::move(sol));
        }
        return std::nullopt;
    };

    double hi = std::max(1.0, inst.base.sum_max_p());
    if (!first_feasible(hi))
        throw InfeasibleInstanceError("no guess admits a feasible LP-Out at the maximum makespan");
    double T;
    if (inst.base.all_p_integral()) {
        long long lo = 1, top = static_cast<long long>(std::llround(hi));
        while (lo < top) {
            long long mid = lo + (top - lo) / 2;
            if (first_feasible(static_cast<double>(mid))) top = mid;
            else lo = mid + 1;
        }
        T = static_cast<double>(lo);
    } else {
        double lo = 0.0, precision = 1e-6 * std::max(1.0, inst.base.sum_max_p());
        while (hi - lo > precision) {
            double mid = 0.5 * (lo + hi);
            if (mid <= 0) break;
            if (first_feasible(mid)) hi = mid;
            else lo = mid;
        }
        T = hi;
    }
    auto picked = first_feasible(T);
    if (!picked) throw InfeasibleInstanceError("binary search lost feasibility");
    return rng ? sched_outlier_round(inst, picked->first, picked->second.values, T, *rng)
               : sched_outlier_derandomized(inst, picked->first, picked->second.values, T);
}

} // namespace polyround

#endif
