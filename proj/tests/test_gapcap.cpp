#include <catch2/catch_amalgamated.hpp>

#include "polyround/gapcap.hpp"
#include "polyround/oracle.hpp"
#include "polyround/rng.hpp"

#include "support/generators.hpp"

#include <cmath>

using namespace polyround;

namespace {

GapInstance two_by_two(std::vector<std::vector<double>> costs = {{0, 0}, {0, 0}},
                       double budget = std::numeric_limits<double>::infinity()) {
    GapInstance inst;
    inst.machines = 2;
    inst.jobs = 2;
    inst.p = {{1, 1}, {1, 1}};
    inst.c = std::move(costs);
    inst.b = {1, 1};
    inst.cost_budget = budget;
    return inst;
}

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
        if (i == machine && val > 0.0 && val < 1.0) m = std::max(m, inst.p[i][j]);
    }
    return m;
}

} // namespace

TEST_CASE("build_lp_cap prunes oversized pairs into infeasibility", "[gapcap]") {
    GapInstance inst;
    inst.machines = 1;
    inst.jobs = 1;
    inst.p = {{1}};
    inst.c = {{1}};
    inst.b = {1};
    GapLp g = build_lp_cap(inst, 0.5);
    CHECK(g.lp.num_vars == 0);
    CHECK(solve(g.lp).status == LpStatus::Infeasible);
}

TEST_CASE("build_lp_cap trivial feasible singleton", "[gapcap]") {
    GapInstance inst;
    inst.machines = 1;
    inst.jobs = 1;
    inst.p = {{1}};
    inst.c = {{1}};
    inst.b = {1};
    inst.cost_budget = 1.0;
    GapLp g = build_lp_cap(inst, 1.0);
    LpSolution s = solve(g.lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.values[0] == Catch::Approx(1.0));
}

TEST_CASE("build_lp_cap admits the identity permutation on the 2x2 instance", "[gapcap]") {
    GapInstance inst = two_by_two();
    GapLp g = build_lp_cap(inst, 1.0);
    REQUIRE(g.lp.num_vars == 4);
    Point identity(4, 0.0);
    identity[static_cast<std::size_t>(g.var_of[0][0])] = 1.0;
    identity[static_cast<std::size_t>(g.var_of[1][1])] = 1.0;
    for (const Constraint& c : g.lp.constraints) CHECK(c.slack_at(identity) >= -1e-12);
}

TEST_CASE("min_feasible_T on one machine with two unit jobs", "[gapcap]") {
    GapInstance inst;
    inst.machines = 1;
    inst.jobs = 2;
    inst.p = {{1, 1}};
    inst.c = {{0, 0}};
    inst.b = {2};
    CHECK(min_feasible_T(inst) == 2.0);
}

TEST_CASE("min_feasible_T splits identical jobs across machines", "[gapcap]") {
    CHECK(min_feasible_T(two_by_two()) == 1.0);
}

TEST_CASE("min_feasible_T reports infeasible capacities", "[gapcap]") {
    // Machine 0 is priced out by the cost budget; machine 1 has no capacity.
    GapInstance inst;
    inst.machines = 2;
    inst.jobs = 2;
    inst.p = {{1, 1}, {1, 1}};
    inst.c = {{10, 10}, {0, 0}};
    inst.b = {2, 0};
    inst.cost_budget = 5.0;
    CHECK_THROWS_AS(min_feasible_T(inst), InfeasibleInstanceError);
}

TEST_CASE("integral input passes through with zero iterations", "[gapcap]") {
    GapInstance inst = two_by_two();
    GapLp g = build_lp_cap(inst, 1.0);
    Point x(4, 0.0);
    x[static_cast<std::size_t>(g.var_of[0][0])] = 1.0;
    x[static_cast<std::size_t>(g.var_of[1][1])] = 1.0;
    Rng rng(5);
    Schedule s = sched_cap_round(inst, g, x, 1.0, rng);
    CHECK(s.iterations == 0);
    CHECK(s.assign == std::vector<int>{0, 1});
    CHECK(s.makespan == 1.0);
}

TEST_CASE("half-fractional 2x2 always lands on a perfect matching", "[gapcap]") {
    GapInstance inst = two_by_two();
    GapLp g = build_lp_cap(inst, 1.0);
    Point half(4, 0.5);
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        Rng rng(seed);
        Schedule s = sched_cap_round(inst, g, half, 1.0, rng);
        CHECK(s.makespan == 1.0);
        CHECK(s.assign[0] != s.assign[1]);
    }
}

TEST_CASE("a singleton machine with no residual capacity is an infeasible state", "[gapcap]") {
    // Sole fractional job at 0.4 against a capacity row with rhs 0: the
    // walk can never see this, because the point itself violates the row.
    Polytope p;
    p.num_vars = 1;
    p.constraints.push_back({{{0, 1.0}}, Relation::LessEqual, 0.0, Tag::Capacity});
    CHECK_THROWS_AS(tight_set(p, {0.4}), InfeasiblePointError);
}

TEST_CASE("derandomized branches keep symmetric costs unchanged", "[gapcap]") {
    GapInstance inst = two_by_two({{2, 2}, {2, 2}}, 10.0);
    GapLp g = build_lp_cap(inst, 1.0);
    Point half(4, 0.5);
    Schedule s = derandomize_cost(inst, g, half, 1.0);
    CHECK(s.cost == Catch::Approx(4.0)); // both branches cost the same
}

TEST_CASE("conditional expectation picks the cheaper branch", "[gapcap]") {
    GapInstance inst = two_by_two({{0, 1}, {1, 0}}, 1.0);
    GapLp g = build_lp_cap(inst, 1.0);
    LpSolution sol = solve(g.lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    Schedule s = derandomize_cost(inst, g, sol.values, 1.0);
    double fractional_cost = 0.0;
    for (int v = 0; v < g.lp.num_vars; ++v) {
        auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
        fractional_cost += inst.c[i][j] * sol.values[static_cast<std::size_t>(v)];
    }
    CHECK(s.cost <= fractional_cost + 1e-9);
    CHECK(s.cost <= 1.0 + 1e-9);
}

TEST_CASE("degree-3 machines with load and capacity both tight keep the capacity", "[gapcap]") {
    // Both machines hold three fractional jobs with load and capacity rows
    // tight, which sheds the load rows while the tight capacity is carried
    // to the end. Tight value 1 on machine 0 and 2 on machine 1: the final
    // job counts must equal those values in every run.
    GapInstance inst;
    inst.machines = 2;
    inst.jobs = 3;
    inst.p = {{1, 1, 1}, {0.5, 0.5, 0.5}};
    inst.c = {{0, 0, 0}, {0, 0, 0}};
    inst.b = {1, 2};
    double T = 1.0;
    GapLp g = build_lp_cap(inst, T);
    Point x(6);
    for (int j = 0; j < 3; ++j) {
        x[static_cast<std::size_t>(g.var_of[0][j])] = 1.0 / 3.0;
        x[static_cast<std::size_t>(g.var_of[1][j])] = 2.0 / 3.0;
    }
    for (std::uint64_t seed = 0; seed < 24; ++seed) {
        Rng rng(seed);
        Schedule s = sched_cap_round(inst, g, x, T, rng);
        int on0 = 0;
        for (int m : s.assign) on0 += m == 0;
        CHECK(on0 == 1);       // capacity stays tight at 1
        CHECK(3 - on0 == 2);   // and at 2 on the other machine
        CHECK(s.loads[0] < 1.0 + 1.0 + 1e-9);
        CHECK(s.loads[1] < 1.0 + 0.5 + 1e-9);
    }
}

TEST_CASE("capacities and the per-machine load bound hold on random instances", "[gapcap]") {
    Rng gen(314);
    for (int trial = 0; trial < 60; ++trial) {
        GapInstance inst = test::random_gap_instance(gen, 5, 12);
        double T = min_feasible_T(inst);
        GapLp g = build_lp_cap(inst, T);
        LpSolution sol = solve(g.lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            Rng rng(seed * 7919 + static_cast<std::uint64_t>(trial));
            Schedule s = sched_cap_round(inst, g, sol.values, T, rng);
            std::vector<int> counts(static_cast<std::size_t>(inst.machines), 0);
            for (int m : s.assign) ++counts[static_cast<std::size_t>(m)];
            for (int i = 0; i < inst.machines; ++i) {
                CHECK(counts[static_cast<std::size_t>(i)] <= inst.b[static_cast<std::size_t>(i)]);
                double frac = fractional_load(inst, g, sol.values, i);
                double maxp = max_fractional_p(inst, g, sol.values, i);
                if (maxp > 0.0)
                    CHECK(s.loads[static_cast<std::size_t>(i)] < frac + maxp + 1e-6);
                else
                    CHECK(s.loads[static_cast<std::size_t>(i)] <= frac + 1e-6);
            }
            CHECK(s.makespan < 2.0 * T + 1e-6);
            CHECK(s.iterations <= static_cast<long long>(g.lp.constraints.size()) + 2LL * g.lp.num_vars);
        }
    }
}

TEST_CASE("per-edge marginals on the fixed half-fractional instance", "[gapcap]") {
    GapInstance inst = two_by_two();
    GapLp g = build_lp_cap(inst, 1.0);
    Point half(4, 0.5);
    const int n = 10000;
    std::vector<double> sums(4, 0.0);
    Rng root(1234);
    for (int t = 0; t < n; ++t) {
        Rng sub = root.substream(static_cast<std::uint64_t>(t));
        Schedule s = sched_cap_round(inst, g, half, 1.0, sub);
        for (int v = 0; v < 4; ++v) {
            auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
            if (s.assign[static_cast<std::size_t>(j)] == i) sums[static_cast<std::size_t>(v)] += 1.0;
        }
    }
    double band = 4.0 * std::sqrt(0.25 / n);
    for (int v = 0; v < 4; ++v)
        CHECK(std::fabs(sums[static_cast<std::size_t>(v)] / n - 0.5) <= band);
}

TEST_CASE("derandomized makespan stays within twice the exact optimum", "[gapcap]") {
    Rng gen(2718);
    for (int trial = 0; trial < 25; ++trial) {
        GapInstance inst = test::random_gap_instance(gen, 3, 7);
        double T = min_feasible_T(inst);
        GapLp g = build_lp_cap(inst, T);
        LpSolution sol = solve(g.lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        Schedule s = derandomize_cost(inst, g, sol.values, T);
        ExactGapResult exact = exact_gap_cap(inst);
        CHECK(s.makespan <= 2.0 * exact.makespan + 1e-6);
        CHECK(s.cost <= inst.cost_budget + 1e-6);
        CHECK(T <= exact.makespan + 1e-9); // the LP guess never exceeds the true optimum
    }
}

TEST_CASE("solve_gap_cap end to end honors the makespan target", "[gapcap]") {
    GapInstance inst = two_by_two({{0, 1}, {1, 0}}, 1.0);
    Schedule s = solve_gap_cap(inst);
    CHECK(s.makespan == 1.0);
    CHECK(s.cost <= 1.0);
    inst.makespan_target = 0.5;
    CHECK_THROWS_AS(solve_gap_cap(inst), InfeasibleInstanceError);
}
