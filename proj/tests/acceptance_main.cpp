// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Sample sizes and tolerances are fixed here, not tuned at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "polyround/depround.hpp"
#include "polyround/gapcap.hpp"
#include "polyround/maxmin.hpp"
#include "polyround/oracle.hpp"
#include "polyround/outlier.hpp"
#include "polyround/rng.hpp"

#include "support/generators.hpp"

using namespace polyround;

namespace {

int failures = 0;
bool guard_fired = false;       // any internal-invariant error anywhere
long long max_iter_excess = 0;  // iterations beyond the initial constraint count

void report(int criterion, bool pass, const std::string& what, double seconds) {
    std::printf("[%s] criterion %2d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), seconds);
    if (!pass) ++failures;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

double fractional_load(const GapInstance& inst, const GapLp& g, const Point& x, int machine) {
    double s = 0.0;
    for (int v = 0; v < g.lp.num_vars; ++v) {
        auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
        if (i == machine) s += inst.p[i][j] * x[static_cast<std::size_t>(v)];
    }
    return s;
}

double max_fractional_p(const GapInstance& inst, const GapLp& g, const Point& x, int machine) {
    double m = 0.0;
    for (int v = 0; v < g.lp.num_vars; ++v) {
        auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
        double val = x[static_cast<std::size_t>(v)];
        if (i == machine && val > 1e-7 && val < 1.0 - 1e-7) m = std::max(m, inst.p[i][j]);
    }
    return m;
}

void note_iterations(long long iterations, const GapLp& g) {
    long long bound = static_cast<long long>(g.lp.constraints.size()) + 2LL * g.lp.num_vars;
    max_iter_excess = std::max(max_iter_excess, iterations - bound);
}

// Criteria 1, 2: hard capacities and the per-machine load bound over 100
// random instances x 10 seeds.
void criteria_1_2() {
    Timer t1;
    Rng gen(20100);
    long long capacity_violations = 0, load_bound_violations = 0, makespan_violations = 0;
    long long runs = 0;
    for (int trial = 0; trial < 100; ++trial) {
        GapInstance inst = test::random_gap_instance(gen, 5, 12);
        double T = min_feasible_T(inst);
        GapLp g = build_lp_cap(inst, T);
        LpSolution sol = solve(g.lp);
        if (sol.status != LpStatus::Optimal) {
            ++capacity_violations;
            continue;
        }
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            try {
                Rng rng(seed * 1009 + static_cast<std::uint64_t>(trial));
                Schedule s = sched_cap_round(inst, g, sol.values, T, rng);
                ++runs;
                note_iterations(s.iterations, g);
                std::vector<int> counts(static_cast<std::size_t>(inst.machines), 0);
                for (int m : s.assign) ++counts[static_cast<std::size_t>(m)];
                for (int i = 0; i < inst.machines; ++i) {
                    if (counts[static_cast<std::size_t>(i)] > inst.b[static_cast<std::size_t>(i)])
                        ++capacity_violations;
                    double frac = fractional_load(inst, g, sol.values, i);
                    double maxp = max_fractional_p(inst, g, sol.values, i);
                    double slackless = s.loads[static_cast<std::size_t>(i)] - frac;
                    // Exact check modulo the 1e-7 snapping of the walk.
                    if (maxp > 0 ? slackless >= maxp + 1e-6 : slackless > 1e-6)
                        ++load_bound_violations;
                }
                if (s.makespan >= 2.0 * T) ++makespan_violations;
            } catch (const InternalInvariantError&) {
                guard_fired = true;
                ++capacity_violations;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "capacity hardness: %lld runs, %lld capacity violations", runs,
                  capacity_violations);
    report(1, capacity_violations == 0 && runs == 1000, buf, t1.seconds());
    Timer t2;
    std::snprintf(buf, sizeof buf,
                  "load bound: %lld per-machine violations, %lld runs at makespan >= 2 T_LP",
                  load_bound_violations, makespan_violations);
    report(2, load_bound_violations == 0 && makespan_violations == 0, buf, t2.seconds());
}

// Criterion 3: derandomized Sched-Cap against the exact oracle.
void criterion_3() {
    Timer t;
    Rng gen(30300);
    int bad_ratio = 0, bad_cost = 0;
    for (int trial = 0; trial < 50; ++trial) {
        GapInstance inst = test::random_gap_instance(gen, 3, 8);
        double T = min_feasible_T(inst);
        GapLp g = build_lp_cap(inst, T);
        LpSolution sol = solve(g.lp);
        try {
            Schedule s = derandomize_cost(inst, g, sol.values, T);
            note_iterations(s.iterations, g);
            ExactGapResult exact = exact_gap_cap(inst);
            if (s.makespan > 2.0 * exact.makespan + 1e-6) ++bad_ratio;
            if (s.cost > inst.cost_budget + 1e-6) ++bad_cost;
        } catch (const InternalInvariantError&) {
            guard_fired = true;
            ++bad_ratio;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "derandomized ratio vs oracle: %d beyond 2x optimum, %d over budget", bad_ratio,
                  bad_cost);
    report(3, bad_ratio == 0 && bad_cost == 0, buf, t.seconds());
}

// Criterion 4: marginal preservation on three fixed instances at N = 1e4.
void criterion_4() {
    Timer t;
    const int n = 10000;
    const double band = 4.0 * std::sqrt(0.25 / n);
    int outside = 0;

    { // fixed instance 1: the half-fractional 2x2 walk
        GapInstance inst;
        inst.machines = 2;
        inst.jobs = 2;
        inst.p = {{1, 1}, {1, 1}};
        inst.c = {{0, 0}, {0, 0}};
        inst.b = {1, 1};
        GapLp g = build_lp_cap(inst, 1.0);
        Point half(4, 0.5);
        std::vector<double> sums(4, 0.0);
        Rng root(41000);
        for (int k = 0; k < n; ++k) {
            Rng sub = root.substream(static_cast<std::uint64_t>(k));
            Schedule s = sched_cap_round(inst, g, half, 1.0, sub);
            for (int v = 0; v < 4; ++v) {
                auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
                if (s.assign[static_cast<std::size_t>(j)] == i) sums[static_cast<std::size_t>(v)] += 1.0;
            }
        }
        for (double s : sums)
            if (std::fabs(s / n - 0.5) > band) ++outside;
    }
    { // fixed instance 2: a 3x4 walk from its LP optimum
        GapInstance inst;
        inst.machines = 3;
        inst.jobs = 4;
        inst.p = {{2, 3, 4, 2}, {3, 2, 2, 4}, {4, 4, 3, 3}};
        inst.c = {{1, 2, 3, 1}, {2, 1, 1, 2}, {3, 3, 2, 1}};
        inst.b = {2, 1, 2};
        inst.cost_budget = 6.0;
        double T = min_feasible_T(inst);
        GapLp g = build_lp_cap(inst, T);
        LpSolution sol = solve(g.lp);
        std::vector<double> sums(static_cast<std::size_t>(g.lp.num_vars), 0.0);
        Rng root(42000);
        for (int k = 0; k < n; ++k) {
            Rng sub = root.substream(static_cast<std::uint64_t>(k));
            Schedule s = sched_cap_round(inst, g, sol.values, T, sub);
            for (int v = 0; v < g.lp.num_vars; ++v) {
                auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
                if (s.assign[static_cast<std::size_t>(j)] == i) sums[static_cast<std::size_t>(v)] += 1.0;
            }
        }
        for (int v = 0; v < g.lp.num_vars; ++v)
            if (std::fabs(sums[static_cast<std::size_t>(v)] / n - sol.values[static_cast<std::size_t>(v)]) > band)
                ++outside;
    }
    { // fixed instance 3: dependent rounding on a 5-edge bipartite graph
        BipartiteFractional base;
        base.left = 2;
        base.right = 3;
        base.edges[{0, 0}] = 0.4;
        base.edges[{0, 1}] = 0.6;
        base.edges[{1, 0}] = 0.35;
        base.edges[{1, 1}] = 0.3;
        base.edges[{1, 2}] = 0.25;
        std::map<std::pair<int, int>, double> sums;
        Rng root(43000);
        for (int k = 0; k < n; ++k) {
            Rng sub = root.substream(static_cast<std::uint64_t>(k));
            BipartiteFractional g = round_all(base, sub);
            for (auto& [e, x] : g.edges) sums[e] += x;
        }
        for (auto& [e, x] : base.edges)
            if (std::fabs(sums[e] / n - x) > band) ++outside;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "marginals at N=1e4: %d edges outside the %.3f band", outside,
                  band);
    report(4, outside == 0, buf, t.seconds());
}

// Criterion 5: the floor/ceiling degree property of round_all, exactly.
void criterion_5() {
    Timer t;
    Rng gen(50500);
    long long violations = 0;
    for (int run = 0; run < 10000; ++run) {
        int left = 1 + static_cast<int>(gen.next_below(4));
        int right = 1 + static_cast<int>(gen.next_below(4));
        BipartiteFractional g;
        g.left = left;
        g.right = right;
        for (int a = 0; a < left; ++a)
            for (int b = 0; b < right; ++b)
                if (gen.bernoulli(0.6)) g.edges[{a, b}] = 0.02 + 0.96 * gen.next_double();
        std::map<std::pair<bool, int>, double> frac;
        for (int a = 0; a < left; ++a) frac[{true, a}] = g.fractional_degree(true, a);
        for (int b = 0; b < right; ++b) frac[{false, b}] = g.fractional_degree(false, b);
        Rng sub = gen.substream(static_cast<std::uint64_t>(run) + 7);
        g = round_all(std::move(g), sub);
        for (auto& [key, d] : frac) {
            int deg = g.integral_degree(key.first, key.second);
            if (deg < static_cast<int>(std::floor(d + 1e-12)) ||
                deg > static_cast<int>(std::ceil(d - 1e-12)))
                ++violations;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "degree property over 1e4 runs: %lld violations", violations);
    report(5, violations == 0, buf, t.seconds());
}

// Criterion 6: outlier guarantees at epsilon = 0.5 on oracle-solvable instances.
void criterion_6() {
    Timer t;
    Rng gen(60600);
    int bad_profit = 0, bad_cost = 0, bad_makespan = 0, bad_vs_oracle = 0;
    for (int trial = 0; trial < 50; ++trial) {
        OutlierInstance inst = test::random_outlier_instance(gen, 3, 7, 0.5);
        try {
            OutlierSchedule s = solve_outlier(inst);
            if (s.profit < inst.profit_floor) ++bad_profit; // exact on integer data
            if (s.cost > 1.5 * inst.base.cost_budget + 1e-6) ++bad_cost;
            if (s.makespan > 2.5 * s.lp_makespan_guess + 1e-6) ++bad_makespan;
            auto exact = exact_outlier_best_makespan(inst);
            if (!exact || s.lp_makespan_guess > *exact + 1e-9) ++bad_vs_oracle;
        } catch (const InternalInvariantError&) {
            guard_fired = true;
            ++bad_profit;
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "outlier: %d profit, %d cost, %d makespan failures; %d LP guesses above optimum",
                  bad_profit, bad_cost, bad_makespan, bad_vs_oracle);
    report(6, bad_profit + bad_cost + bad_makespan + bad_vs_oracle == 0, buf, t.seconds());
}

// Criterion 7: iteration bound and the internal guards across everything run
// so far (the flag accumulates from all criteria).
void criterion_7() {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "termination: max iterations minus initial constraint count = %lld, guards %s",
                  max_iter_excess, guard_fired ? "FIRED" : "never fired");
    report(7, max_iter_excess <= 0 && !guard_fired, buf, 0.0);
}

// Criterion 8: max-min building blocks at N = 1e4.
void criterion_8() {
    Timer t;
    const int n = 10000;
    const double band = 4.0 * std::sqrt(0.25 / n);
    int outside = 0;
    long long double_alloc = 0;

    { // saturation marginals on a fixed flow-match graph
        MaxMinInstance inst;
        inst.persons = 3;
        inst.goods = 3;
        inst.u = {{9, 9, 0}, {9, 9, 9}, {0, 9, 9}};
        FlowMatchGraph g;
        g.T = 9.0;
        g.lambda = 2.0;
        g.m_person = {0.7, 0.9, 0.55};
        g.m_good = {0.75, 0.8, 0.6};
        g.w[{0, 0}] = 0.4;
        g.w[{0, 1}] = 0.3;
        g.w[{1, 0}] = 0.35;
        g.w[{1, 1}] = 0.25;
        g.w[{1, 2}] = 0.3;
        g.w[{2, 1}] = 0.25;
        g.w[{2, 2}] = 0.3;
        g.matching_edges = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 2}};
        std::vector<double> sat(3, 0.0);
        Rng root(81000);
        for (int k = 0; k < n; ++k) {
            Rng sub = root.substream(static_cast<std::uint64_t>(k));
            auto matched = sample_matching(inst, g, sub);
            std::set<int> goods;
            for (auto& [i, j] : matched) {
                sat[static_cast<std::size_t>(i)] += 1.0;
                if (!goods.insert(j).second) ++double_alloc;
            }
        }
        for (int i = 0; i < 3; ++i)
            if (std::fabs(sat[static_cast<std::size_t>(i)] / n - g.m_person[static_cast<std::size_t>(i)]) > band)
                ++outside;
    }

    int contention_off = 0;
    { // contention resolution keeps per-person expected utility on paths
        MaxMinInstance inst;
        inst.persons = 2;
        inst.goods = 3;
        inst.u = {{4, 2, 0}, {0, 3, 5}};
        FlowMatchGraph g;
        g.m_person = {0.0, 0.0};
        g.m_good = {0.0, 0.0, 0.0};
        g.w[{0, 0}] = 0.6;
        g.w[{0, 1}] = 0.4;
        g.w[{1, 1}] = 0.5;
        g.w[{1, 2}] = 0.7;
        std::map<int, std::vector<int>> claims{{0, {0, 1}}, {1, {1, 2}}};
        double expect0 = 0.6 * 4 + 0.4 * 2, expect1 = 0.5 * 3 + 0.7 * 5;
        double sum0 = 0.0, sum1 = 0.0;
        Rng root(82000);
        for (int k = 0; k < n; ++k) {
            Rng sub = root.substream(static_cast<std::uint64_t>(k));
            auto res = resolve_contention(inst, claims, g, sub);
            std::set<int> owned;
            for (auto& [i, goods] : res.goods_of_person)
                for (int j : goods) {
                    if (!owned.insert(j).second) ++double_alloc;
                    (i == 0 ? sum0 : sum1) += inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                }
        }
        // Per-person utility is a +-u_max-bounded sum of two edges; 4 sigma
        // with sigma <= u_max * sqrt(0.5/n).
        if (std::fabs(sum0 / n - expect0) > 4.0 * 4.0 * std::sqrt(0.5 / n)) ++contention_off;
        if (std::fabs(sum1 / n - expect1) > 4.0 * 5.0 * std::sqrt(0.5 / n)) ++contention_off;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "max-min blocks: %d saturation marginals outside band, %lld double allocations, "
                  "%d contention means off",
                  outside, double_alloc, contention_off);
    report(8, outside == 0 && double_alloc == 0 && contention_off == 0, buf, t.seconds());
}

// Criterion 9: capacitated max-min rounding guarantees.
void criterion_9() {
    Timer t;
    Rng gen(90900);
    int cap_violations = 0, utility_violations = 0, relax_violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        MaxMinInstance inst = test::random_maxmin_instance(gen, 4, 8, true);
        try {
            CapFractional frac = maxmin_cap_fractional(inst);
            ExactMaxMinResult exact = exact_maxmin(inst);
            if (frac.T < exact.value - 1e-6) ++relax_violations;
            for (std::uint64_t seed = 0; seed < 4; ++seed) {
                Rng rng(seed * 53 + static_cast<std::uint64_t>(trial));
                CapRoundResult r = maxmin_cap_round(inst, frac.x, frac.T, &rng);
                for (int i = 0; i < inst.persons; ++i) {
                    if (r.counts[static_cast<std::size_t>(i)] > inst.caps[static_cast<std::size_t>(i)])
                        ++cap_violations;
                    double max_u = *std::max_element(inst.u[static_cast<std::size_t>(i)].begin(),
                                                     inst.u[static_cast<std::size_t>(i)].end());
                    if (r.utility[static_cast<std::size_t>(i)] <= frac.T - max_u - 1e-6)
                        ++utility_violations;
                }
            }
        } catch (const InternalInvariantError&) {
            guard_fired = true;
            ++cap_violations;
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "capacitated max-min: %d cap violations, %d utilities at or below T - max u, "
                  "%d relaxation-bound failures",
                  cap_violations, utility_violations, relax_violations);
    report(9, cap_violations + utility_violations + relax_violations == 0, buf, t.seconds());
}

// Criterion 10: the asymptotic factor is out of reach at this scale; the
// smoke test checks that matched persons always clear T / lambda.
void criterion_10() {
    Timer t;
    Rng gen(101000);
    int below = 0, runs = 0;
    for (int trial = 0; trial < 20; ++trial) {
        MaxMinInstance inst = test::random_maxmin_instance(gen, 3, 10, false);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            Rng rng(seed * 17 + static_cast<std::uint64_t>(trial));
            MaxMinAllocation a = maxmin_solve(inst, rng);
            if (a.T <= 0) continue;
            ++runs;
            for (int i = 0; i < inst.persons; ++i)
                if (a.matched[static_cast<std::size_t>(i)] &&
                    a.utility[static_cast<std::size_t>(i)] < a.T / a.lambda - 1e-9)
                    ++below;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "smoke: %d matched persons below T/lambda across %d pipeline runs", below, runs);
    report(10, below == 0 && runs > 0, buf, t.seconds());
}

} // namespace

int main() {
    criteria_1_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_7(); // reads the guards accumulated by everything above
    if (failures == 0) std::printf("acceptance: all criteria passed\n");
    else std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
