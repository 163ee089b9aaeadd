#ifndef POLYROUND_TEST_GENERATORS_HPP
#define POLYROUND_TEST_GENERATORS_HPP

#include "polyround/gapcap.hpp"
#include "polyround/maxmin.hpp"
#include "polyround/outlier.hpp"
#include "polyround/rng.hpp"

namespace test {

/// Random capacitated GAP instance with integer data, repaired until the
/// LP admits some makespan (so every caller sees a solvable instance).
inline polyround::GapInstance random_gap_instance(polyround::Rng& rng, int max_machines,
                                                  int max_jobs) {
    using namespace polyround;
    while (true) {
        GapInstance inst;
        inst.machines = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_machines)));
        inst.jobs = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_jobs)));
        inst.p.assign(static_cast<std::size_t>(inst.machines),
                      std::vector<double>(static_cast<std::size_t>(inst.jobs)));
        inst.c = inst.p;
        for (int i = 0; i < inst.machines; ++i)
            for (int j = 0; j < inst.jobs; ++j) {
                inst.p[i][j] = static_cast<double>(rng.next_int(1, 10));
                inst.c[i][j] = static_cast<double>(rng.next_int(0, 9));
            }
        long long total = 0;
        inst.b.resize(static_cast<std::size_t>(inst.machines));
        for (long long& cap : inst.b) {
            cap = rng.next_int(0, inst.jobs);
            total += cap;
        }
        while (total < inst.jobs) {
            ++inst.b[static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(inst.machines)))];
            ++total;
        }
        double min_cost = 0.0;
        for (int j = 0; j < inst.jobs; ++j) {
            double mc = inst.c[0][j];
            for (int i = 1; i < inst.machines; ++i) mc = std::min(mc, inst.c[i][j]);
            min_cost += mc;
        }
        inst.cost_budget = min_cost + static_cast<double>(rng.next_int(2, 3 + inst.jobs));
        try {
            min_feasible_T(inst);
            return inst;
        } catch (const InfeasibleInstanceError&) {
            // capacities and budget clashed; draw again
        }
    }
}

inline polyround::OutlierInstance random_outlier_instance(polyround::Rng& rng, int max_machines,
                                                          int max_jobs, double epsilon) {
    using namespace polyround;
    while (true) {
        OutlierInstance inst;
        inst.epsilon = epsilon;
        inst.base.machines = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_machines)));
        inst.base.jobs = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_jobs - 1)));
        inst.base.p.assign(static_cast<std::size_t>(inst.base.machines),
                           std::vector<double>(static_cast<std::size_t>(inst.base.jobs)));
        inst.base.c = inst.base.p;
        for (int i = 0; i < inst.base.machines; ++i)
            for (int j = 0; j < inst.base.jobs; ++j) {
                inst.base.p[i][j] = static_cast<double>(rng.next_int(1, 10));
                inst.base.c[i][j] = static_cast<double>(rng.next_int(0, 6));
            }
        inst.base.b.assign(static_cast<std::size_t>(inst.base.machines), inst.base.jobs);
        inst.base.cost_budget = static_cast<double>(rng.next_int(6, 14));
        double total_profit = 0.0;
        inst.profits.resize(static_cast<std::size_t>(inst.base.jobs));
        for (double& pi : inst.profits) {
            pi = static_cast<double>(rng.next_int(0, 8));
            total_profit += pi;
        }
        inst.profit_floor = std::floor(total_profit * 0.5);
        try {
            inst.validate();
        } catch (const InvalidInputError&) {
            continue;
        }
        // Keep only instances some schedule can satisfy.
        try {
            solve_outlier(inst);
            return inst;
        } catch (const Error&) {
            continue;
        }
    }
}

inline polyround::MaxMinInstance random_maxmin_instance(polyround::Rng& rng, int max_persons,
                                                        int max_goods, bool with_caps) {
    using namespace polyround;
    MaxMinInstance inst;
    inst.persons = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_persons)));
    inst.goods = inst.persons +
                 static_cast<int>(rng.next_below(static_cast<std::uint64_t>(std::max(1, max_goods - inst.persons + 1))));
    inst.u.assign(static_cast<std::size_t>(inst.persons),
                  std::vector<double>(static_cast<std::size_t>(inst.goods)));
    for (auto& row : inst.u)
        for (double& v : row) v = static_cast<double>(rng.next_int(0, 9));
    if (with_caps) {
        inst.caps.resize(static_cast<std::size_t>(inst.persons));
        long long total = 0;
        for (long long& c : inst.caps) {
            c = rng.next_int(1, std::max<long long>(1, inst.goods / inst.persons + 1));
            total += c;
        }
        while (total < inst.goods) {
            ++inst.caps[static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(inst.persons)))];
            ++total;
        }
    }
    return inst;
}

} // namespace test

#endif
