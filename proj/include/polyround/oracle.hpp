#ifndef POLYROUND_ORACLE_HPP
#define POLYROUND_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "polyround/errors.hpp"
#include "polyround/gapcap.hpp"
#include "polyround/maxmin.hpp"
#include "polyround/outlier.hpp"

namespace polyround {

/// Ground truth by exhaustive enumeration. Inputs at desk scale are
/// integral, for which double accumulation of these short sums is exact;
/// no tolerance from the rounding path leaks in here.

struct ExactGapResult {
    double makespan = 0.0;
    double cost = 0.0;
    std::vector<int> assign;
};

namespace detail {

inline void check_budget(double choices, int slots, long long budget) {
    double total = 1.0;
    for (int i = 0; i < slots; ++i) {
        total *= choices;
        if (total > static_cast<double>(budget))
            throw BudgetExceededError("enumeration exceeds the oracle budget");
    }
}

} // namespace detail

inline ExactGapResult exact_gap_cap(const GapInstance& inst, long long budget = 10'000'000) {
    inst.validate();
    detail::check_budget(inst.machines, inst.jobs, budget);

    std::vector<int> assign(static_cast<std::size_t>(inst.jobs), 0);
    std::vector<int> counts(static_cast<std::size_t>(inst.machines), 0);
    std::vector<double> loads(static_cast<std::size_t>(inst.machines), 0.0);
    std::optional<ExactGapResult> best;

    auto rec = [&](auto&& self, int j, double cost) -> void {
        if (j == inst.jobs) {
            double makespan = *std::max_element(loads.begin(), loads.end());
            if (!best || makespan < best->makespan) best = ExactGapResult{makespan, cost, assign};
            return;
        }
        for (int i = 0; i < inst.machines; ++i) {
            if (counts[static_cast<std::size_t>(i)] >= inst.b[i]) continue;
            double nc = cost + inst.c[i][j];
            if (nc > inst.cost_budget + 1e-12) continue;
            assign[static_cast<std::size_t>(j)] = i;
            ++counts[static_cast<std::size_t>(i)];
            loads[static_cast<std::size_t>(i)] += inst.p[i][j];
            self(self, j + 1, nc);
            loads[static_cast<std::size_t>(i)] -= inst.p[i][j];
            --counts[static_cast<std::size_t>(i)];
        }
    };
    rec(rec, 0, 0.0);
    if (!best) throw InfeasibleInstanceError("no assignment satisfies the capacities and budget");
    return *best;
}

/// One point of the exact outlier Pareto set (profit up, cost down,
/// makespan down).
struct OutlierPoint {
    double profit = 0.0;
    double cost = 0.0;
    double makespan = 0.0;
};

/// Exact Pareto frontier over schedules with makespan at most `makespan_cap`
/// (jobs may be dropped). Pass +infinity for the unconstrained frontier.
inline std::vector<OutlierPoint> exact_outlier(const OutlierInstance& inst, double makespan_cap,
                                               long long budget = 10'000'000) {
    inst.validate();
    const GapInstance& base = inst.base;
    detail::check_budget(base.machines + 1, base.jobs, budget);

    std::vector<OutlierPoint> frontier;
    auto dominates = [](const OutlierPoint& a, const OutlierPoint& b) {
        return a.profit >= b.profit && a.cost <= b.cost && a.makespan <= b.makespan;
    };
    auto offer = [&](const OutlierPoint& cand) {
        for (const OutlierPoint& f : frontier)
            if (dominates(f, cand)) return;
        frontier.erase(std::remove_if(frontier.begin(), frontier.end(),
                                      [&](const OutlierPoint& f) { return dominates(cand, f); }),
                       frontier.end());
        frontier.push_back(cand);
    };

    std::vector<double> loads(static_cast<std::size_t>(base.machines), 0.0);
    auto rec = [&](auto&& self, int j, double cost, double profit) -> void {
        if (j == base.jobs) {
            double makespan = *std::max_element(loads.begin(), loads.end());
            if (makespan <= makespan_cap + 1e-12) offer({profit, cost, makespan});
            return;
        }
        self(self, j + 1, cost, profit); // drop job j
        for (int i = 0; i < base.machines; ++i) {
            loads[static_cast<std::size_t>(i)] += base.p[i][j];
            self(self, j + 1, cost + base.c[i][j], profit + inst.profits[static_cast<std::size_t>(j)]);
            loads[static_cast<std::size_t>(i)] -= base.p[i][j];
        }
    };
    rec(rec, 0, 0.0, 0.0);
    return frontier;
}

/// Smallest exact makespan among schedules with profit >= profit_floor and
/// cost <= cost_budget, or nullopt if none exists.
inline std::optional<double> exact_outlier_best_makespan(const OutlierInstance& inst,
                                                         long long budget = 10'000'000) {
    auto frontier = exact_outlier(inst, std::numeric_limits<double>::infinity(), budget);
    std::optional<double> best;
    for (const OutlierPoint& f : frontier)
        if (f.profit >= inst.profit_floor - 1e-12 &&
            f.cost <= inst.base.cost_budget + 1e-12 && (!best || f.makespan < *best))
            best = f.makespan;
    return best;
}

struct ExactMaxMinResult {
    double value = 0.0;
    std::vector<int> assign; // good -> person, or -1 for withheld (caps only)
};

inline ExactMaxMinResult exact_maxmin(const MaxMinInstance& inst, long long budget = 10'000'000) {
    inst.validate();
    bool capped = !inst.caps.empty();
    detail::check_budget(inst.persons + (capped ? 1 : 0), inst.goods, budget);

    std::vector<int> assign(static_cast<std::size_t>(inst.goods), -1);
    std::vector<double> utility(static_cast<std::size_t>(inst.persons), 0.0);
    std::vector<long long> counts(static_cast<std::size_t>(inst.persons), 0);
    std::optional<ExactMaxMinResult> best;

    auto rec = [&](auto&& self, int g) -> void {
        if (g == inst.goods) {
            double value = *std::min_element(utility.begin(), utility.end());
            if (!best || value > best->value) best = ExactMaxMinResult{value, assign};
            return;
        }
        for (int i = 0; i < inst.persons; ++i) {
            if (capped && counts[static_cast<std::size_t>(i)] >= inst.caps[static_cast<std::size_t>(i)]) continue;
            assign[static_cast<std::size_t>(g)] = i;
            utility[static_cast<std::size_t>(i)] += inst.u[i][g];
            ++counts[static_cast<std::size_t>(i)];
            self(self, g + 1);
            --counts[static_cast<std::size_t>(i)];
            utility[static_cast<std::size_t>(i)] -= inst.u[i][g];
            assign[static_cast<std::size_t>(g)] = -1;
        }
        if (capped) self(self, g + 1); // caps may force leaving a good out
    };
    rec(rec, 0);
    if (!best) throw InfeasibleInstanceError("no allocation exists");
    return *best;
}

} // namespace polyround

#endif
