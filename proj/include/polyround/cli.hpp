#ifndef POLYROUND_CLI_HPP
#define POLYROUND_CLI_HPP

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyround/errors.hpp"
#include "polyround/gapcap.hpp"
#include "polyround/maxmin.hpp"
#include "polyround/oracle.hpp"
#include "polyround/outlier.hpp"
#include "polyround/rng.hpp"

namespace polyround::cli {

using nlohmann::json;

// Exit codes of the command-line interface.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kInfeasible = 2;
inline constexpr int kParseError = 3;
inline constexpr int kBudgetExceeded = 4;
inline constexpr int kInternalInvariant = 5;

struct Options {
    std::string command;
    std::string input;
    std::string output;
    std::string format = "text";
    std::uint64_t seed = 0;
    long long trials = 1000;
    double epsilon = -1.0;
    double precision = -1.0;
    double lambda = -1.0;
    double eps1 = -1.0;
    bool randomize = false;
};

struct ParsedInstance {
    std::string kind;
    std::optional<GapInstance> gap;
    std::optional<OutlierInstance> outlier;
    std::optional<MaxMinInstance> maxmin;
};

namespace detail {

inline std::vector<double> number_array(const json& doc, const std::string& field, std::size_t n) {
    if (!doc.contains(field)) throw ParseError("missing field '" + field + "'");
    const json& arr = doc.at(field);
    if (!arr.is_array() || arr.size() != n) {
        std::ostringstream os;
        os << "field '" << field << "' must be an array of " << n << " numbers";
        throw ParseError(os.str());
    }
    std::vector<double> out;
    out.reserve(n);
    for (const json& v : arr) {
        if (!v.is_number()) throw ParseError("field '" + field + "' has a non-numeric entry");
        out.push_back(v.get<double>());
    }
    return out;
}

inline std::vector<std::vector<double>> row_major(const json& doc, const std::string& field,
                                                  int rows, int cols) {
    std::vector<double> flat = number_array(doc, field, static_cast<std::size_t>(rows) * cols);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(rows),
                                         std::vector<double>(static_cast<std::size_t>(cols)));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                flat[static_cast<std::size_t>(i) * cols + j];
    return out;
}

inline int int_field(const json& doc, const std::string& field) {
    if (!doc.contains(field)) throw ParseError("missing field '" + field + "'");
    if (!doc.at(field).is_number_integer() || doc.at(field).get<long long>() <= 0)
        throw ParseError("field '" + field + "' must be a positive integer");
    return doc.at(field).get<int>();
}

inline double num_field(const json& doc, const std::string& field) {
    if (!doc.contains(field)) throw ParseError("missing field '" + field + "'");
    if (!doc.at(field).is_number()) throw ParseError("field '" + field + "' must be a number");
    return doc.at(field).get<double>();
}

} // namespace detail

inline ParsedInstance parse_instance_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string())
        throw ParseError("instance file must be a JSON object with a string 'kind'");

    ParsedInstance out;
    out.kind = doc.at("kind").get<std::string>();
    try {
        if (out.kind == "gap-cap") {
            GapInstance inst;
            inst.machines = detail::int_field(doc, "machines");
            inst.jobs = detail::int_field(doc, "jobs");
            inst.p = detail::row_major(doc, "p", inst.machines, inst.jobs);
            inst.c = detail::row_major(doc, "c", inst.machines, inst.jobs);
            for (double v : detail::number_array(doc, "b", static_cast<std::size_t>(inst.machines)))
                inst.b.push_back(static_cast<long long>(std::llround(v)));
            inst.cost_budget = detail::num_field(doc, "cost_budget");
            if (doc.contains("makespan_target")) inst.makespan_target = detail::num_field(doc, "makespan_target");
            inst.validate();
            out.gap = std::move(inst);
        } else if (out.kind == "outlier") {
            OutlierInstance inst;
            inst.base.machines = detail::int_field(doc, "machines");
            inst.base.jobs = detail::int_field(doc, "jobs");
            inst.base.p = detail::row_major(doc, "p", inst.base.machines, inst.base.jobs);
            inst.base.c = detail::row_major(doc, "c", inst.base.machines, inst.base.jobs);
            inst.base.b.assign(static_cast<std::size_t>(inst.base.machines), inst.base.jobs);
            inst.base.cost_budget = detail::num_field(doc, "cost_budget");
            inst.profits = detail::number_array(doc, "profits", static_cast<std::size_t>(inst.base.jobs));
            inst.profit_floor = detail::num_field(doc, "profit_floor");
            if (doc.contains("epsilon")) inst.epsilon = detail::num_field(doc, "epsilon");
            inst.validate();
            out.outlier = std::move(inst);
        } else if (out.kind == "maxmin") {
            MaxMinInstance inst;
            inst.persons = detail::int_field(doc, "persons");
            inst.goods = detail::int_field(doc, "goods");
            inst.u = detail::row_major(doc, "u", inst.persons, inst.goods);
            if (doc.contains("caps"))
                for (double v : detail::number_array(doc, "caps", static_cast<std::size_t>(inst.persons)))
                    inst.caps.push_back(static_cast<long long>(std::llround(v)));
            inst.validate();
            out.maxmin = std::move(inst);
        } else {
            throw ParseError("unknown kind '" + out.kind + "' (expected gap-cap, outlier, or maxmin)");
        }
    } catch (const InvalidInputError& e) {
        throw ParseError(std::string("invalid instance: ") + e.what());
    }
    return out;
}

inline ParsedInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_instance_text(buffer.str());
}

namespace detail {

inline json schedule_json(const Schedule& s) {
    json out;
    out["assign"] = s.assign;
    out["loads"] = s.loads;
    out["makespan"] = s.makespan;
    out["cost"] = s.cost;
    out["iterations"] = s.iterations;
    return out;
}

inline json outlier_schedule_json(const OutlierSchedule& s) {
    json out;
    out["assign"] = s.assign;
    out["loads"] = s.loads;
    out["makespan"] = s.makespan;
    out["cost"] = s.cost;
    out["profit"] = s.profit;
    out["iterations"] = s.iterations;
    out["final_step_used"] = s.final_step_used;
    out["terminal_config"] = config_name(s.terminal_config);
    return out;
}

inline void emit(const Options& opt, const json& doc, std::ostream& out) {
    std::ostream* sink = &out;
    std::ofstream file;
    if (!opt.output.empty()) {
        file.open(opt.output);
        if (!file) throw Error("cannot open output file '" + opt.output + "'");
        sink = &file;
    }
    if (opt.format == "structured") {
        *sink << doc.dump(2) << "\n";
        return;
    }
    // Text format: one key per line, flattening one level of nesting.
    for (auto& [key, value] : doc.items()) {
        if (value.is_object()) {
            for (auto& [k2, v2] : value.items()) *sink << key << "." << k2 << ": " << v2.dump() << "\n";
        } else {
            *sink << key << ": " << value.dump() << "\n";
        }
    }
}

inline json run_solve_gap_cap(const Options& opt, const GapInstance& inst) {
    double T = inst.makespan_target ? *inst.makespan_target
                                    : min_feasible_T(inst, opt.precision);
    GapLp g = build_lp_cap(inst, T);
    LpSolution sol = solve(g.lp);
    if (sol.status != LpStatus::Optimal)
        throw InfeasibleInstanceError("LP-Cap infeasible at the makespan target");
    Schedule s;
    if (opt.randomize) {
        Rng rng(opt.seed);
        s = sched_cap_round(inst, g, sol.values, T, rng);
    } else {
        s = derandomize_cost(inst, g, sol.values, T);
    }
    json out;
    out["command"] = "solve-gap-cap";
    out["lp_makespan_guess"] = T;
    out["schedule"] = schedule_json(s);
    out["fractional_cost"] = [&] {
        double fc = 0.0;
        for (int v = 0; v < g.lp.num_vars; ++v) {
            auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
            fc += inst.c[i][j] * sol.values[static_cast<std::size_t>(v)];
        }
        return fc;
    }();
    return out;
}

inline json run_solve_outlier(const Options& opt, OutlierInstance inst) {
    if (opt.epsilon > 0) inst.epsilon = opt.epsilon;
    OutlierSchedule s;
    if (opt.randomize) {
        Rng rng(opt.seed);
        s = solve_outlier(inst, &rng);
    } else {
        s = solve_outlier(inst);
    }
    json out;
    out["command"] = "solve-outlier";
    out["epsilon"] = inst.epsilon;
    out["profit_floor"] = inst.profit_floor;
    out["cost_budget"] = inst.base.cost_budget;
    out["lp_makespan_guess"] = s.lp_makespan_guess;
    out["schedule"] = outlier_schedule_json(s);
    return out;
}

inline json run_solve_maxmin(const Options& opt, const MaxMinInstance& inst) {
    json out;
    out["command"] = "solve-maxmin";
    Rng rng(opt.seed);
    if (inst.caps.empty()) {
        MaxMinParams params;
        if (opt.lambda > 0) params.lambda = opt.lambda;
        if (opt.eps1 > 0) params.eps1 = opt.eps1;
        MaxMinAllocation a = maxmin_solve(inst, rng, params);
        out["mode"] = "configuration-lp";
        out["threshold"] = a.T;
        out["lambda"] = a.lambda;
        out["eps1"] = a.eps1;
        out["allocation"] = a.goods_of_person;
        out["utility"] = a.utility;
        out["matched"] = a.matched;
        out["min_utility"] = a.min_utility;
        out["ratio_to_threshold"] = a.T > 0 ? a.min_utility / a.T : 1.0;
    } else {
        CapFractional frac = maxmin_cap_fractional(inst, opt.precision > 0 ? opt.precision : 1e-6);
        CapRoundResult r = maxmin_cap_round(inst, frac.x, frac.T, &rng);
        out["mode"] = "capacitated";
        out["threshold"] = frac.T;
        out["allocation"] = r.goods_of_person;
        out["utility"] = r.utility;
        out["counts"] = r.counts;
        out["iterations"] = r.iterations;
        out["min_utility"] = *std::min_element(r.utility.begin(), r.utility.end());
    }
    return out;
}

inline json run_oracle(const ParsedInstance& inst) {
    json out;
    out["command"] = "oracle";
    if (inst.gap) {
        ExactGapResult r = exact_gap_cap(*inst.gap);
        out["optimal_makespan"] = r.makespan;
        out["cost"] = r.cost;
        out["assign"] = r.assign;
    } else if (inst.outlier) {
        auto best = exact_outlier_best_makespan(*inst.outlier);
        if (!best) throw InfeasibleInstanceError("no schedule meets the profit floor within budget");
        out["optimal_makespan"] = *best;
        json frontier = json::array();
        for (const OutlierPoint& f : exact_outlier(*inst.outlier, std::numeric_limits<double>::infinity()))
            frontier.push_back({{"profit", f.profit}, {"cost", f.cost}, {"makespan", f.makespan}});
        out["pareto_frontier_size"] = frontier.size();
    } else {
        ExactMaxMinResult r = exact_maxmin(*inst.maxmin);
        out["optimal_min_utility"] = r.value;
        out["assign"] = r.assign;
    }
    return out;
}

inline json run_montecarlo(const Options& opt, const ParsedInstance& inst) {
    json out;
    out["command"] = "montecarlo";
    out["trials"] = opt.trials;
    const long long n = opt.trials;
    double band = 4.0 * std::sqrt(0.25 / static_cast<double>(n));
    out["band"] = band;
    Rng root(opt.seed);

    if (inst.gap) {
        const GapInstance& g_inst = *inst.gap;
        double T = g_inst.makespan_target ? *g_inst.makespan_target : min_feasible_T(g_inst);
        GapLp g = build_lp_cap(g_inst, T);
        LpSolution sol = solve(g.lp);
        if (sol.status != LpStatus::Optimal) throw InfeasibleInstanceError("LP-Cap infeasible");
        std::vector<double> sums(static_cast<std::size_t>(g.lp.num_vars), 0.0);
        long long capacity_violations = 0, bound_violations = 0;
        for (long long t = 0; t < n; ++t) {
            Rng sub = root.substream(static_cast<std::uint64_t>(t));
            Schedule s = sched_cap_round(g_inst, g, sol.values, T, sub);
            for (int v = 0; v < g.lp.num_vars; ++v) {
                auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
                if (s.assign[static_cast<std::size_t>(j)] == i) sums[static_cast<std::size_t>(v)] += 1.0;
            }
            if (s.makespan >= 2.0 * T) ++bound_violations;
        }
        json edges = json::array();
        double max_dev = 0.0;
        long long outside = 0;
        for (int v = 0; v < g.lp.num_vars; ++v) {
            auto [i, j] = g.edge_of[static_cast<std::size_t>(v)];
            double mean = sums[static_cast<std::size_t>(v)] / static_cast<double>(n);
            double dev = std::fabs(mean - sol.values[static_cast<std::size_t>(v)]);
            max_dev = std::max(max_dev, dev);
            if (dev > band) ++outside;
            edges.push_back({{"machine", i}, {"job", j},
                             {"x_star", sol.values[static_cast<std::size_t>(v)]},
                             {"mean", mean}, {"abs_dev", dev}});
        }
        out["edges"] = edges;
        out["max_abs_dev"] = max_dev;
        out["edges_outside_band"] = outside;
        out["capacity_violations"] = capacity_violations;
        out["makespan_bound_violations"] = bound_violations;
    } else if (inst.outlier) {
        const OutlierInstance& o = *inst.outlier;
        double min_profit = std::numeric_limits<double>::infinity();
        for (long long t = 0; t < n; ++t) {
            Rng sub = root.substream(static_cast<std::uint64_t>(t));
            OutlierSchedule s = solve_outlier(o, &sub);
            min_profit = std::min(min_profit, s.profit);
        }
        out["min_profit_over_trials"] = min_profit;
        out["profit_floor"] = o.profit_floor;
    } else if (inst.maxmin && !inst.maxmin->caps.empty()) {
        // Capacitated variant: per-edge marginals of the rounding walk.
        const MaxMinInstance& mm = *inst.maxmin;
        CapFractional frac = maxmin_cap_fractional(mm);
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(mm.persons),
                                              std::vector<double>(static_cast<std::size_t>(mm.goods), 0.0));
        long long cap_violations = 0;
        for (long long t = 0; t < n; ++t) {
            Rng sub = root.substream(static_cast<std::uint64_t>(t));
            CapRoundResult r = maxmin_cap_round(mm, frac.x, frac.T, &sub);
            for (int i = 0; i < mm.persons; ++i) {
                if (r.counts[static_cast<std::size_t>(i)] > mm.caps[static_cast<std::size_t>(i)]) ++cap_violations;
                for (int j : r.goods_of_person[static_cast<std::size_t>(i)])
                    sums[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += 1.0;
            }
        }
        json edges = json::array();
        double max_dev = 0.0;
        long long outside = 0;
        for (int i = 0; i < mm.persons; ++i)
            for (int j = 0; j < mm.goods; ++j) {
                double x_star = frac.x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                double mean = sums[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / static_cast<double>(n);
                double dev = std::fabs(mean - x_star);
                if (x_star == 0.0 && mean == 0.0) continue;
                max_dev = std::max(max_dev, dev);
                if (dev > band) ++outside;
                edges.push_back({{"person", i}, {"good", j}, {"x_star", x_star}, {"mean", mean}, {"abs_dev", dev}});
            }
        out["threshold"] = frac.T;
        out["edges"] = edges;
        out["max_abs_dev"] = max_dev;
        out["edges_outside_band"] = outside;
        out["cap_violations"] = cap_violations;
    } else {
        const MaxMinInstance& mm = *inst.maxmin;
        MaxMinParams params;
        if (opt.lambda > 0) params.lambda = opt.lambda;
        if (opt.eps1 > 0) params.eps1 = opt.eps1;
        derive_params(mm.persons, params);
        double T = max_feasible_threshold(mm, params.lambda, params.config_budget);
        if (T <= 0) throw InfeasibleInstanceError("configuration LP infeasible at every threshold");
        auto lp = solve_config_lp(mm, T, params.lambda, params.config_budget);
        FlowMatchGraph g = build_flow_match(mm, *lp);
        std::vector<double> person_sat(static_cast<std::size_t>(mm.persons), 0.0);
        std::vector<double> good_sat(static_cast<std::size_t>(mm.goods), 0.0);
        for (long long t = 0; t < n; ++t) {
            Rng sub = root.substream(static_cast<std::uint64_t>(t));
            auto matched = sample_matching(mm, g, sub);
            for (auto& [i, j] : matched) {
                person_sat[static_cast<std::size_t>(i)] += 1.0;
                good_sat[static_cast<std::size_t>(j)] += 1.0;
            }
        }
        json persons = json::array();
        double max_dev = 0.0;
        for (int i = 0; i < mm.persons; ++i) {
            double mean = person_sat[static_cast<std::size_t>(i)] / static_cast<double>(n);
            double dev = std::fabs(mean - g.m_person[static_cast<std::size_t>(i)]);
            max_dev = std::max(max_dev, dev);
            persons.push_back({{"person", i}, {"m_v", g.m_person[static_cast<std::size_t>(i)]}, {"mean", mean}, {"abs_dev", dev}});
        }
        json goods = json::array();
        for (int j = 0; j < mm.goods; ++j) {
            double mean = good_sat[static_cast<std::size_t>(j)] / static_cast<double>(n);
            double dev = std::fabs(mean - g.m_good[static_cast<std::size_t>(j)]);
            max_dev = std::max(max_dev, dev);
            goods.push_back({{"good", j}, {"m_v", g.m_good[static_cast<std::size_t>(j)]}, {"mean", mean}, {"abs_dev", dev}});
        }
        out["threshold"] = T;
        out["persons"] = persons;
        out["goods"] = goods;
        out["max_abs_dev"] = max_dev;
    }
    return out;
}

} // namespace detail

/// Parse argv-style arguments (without the program name).
inline Options parse_args(const std::vector<std::string>& args) {
    Options opt;
    if (args.empty()) throw ParseError("missing command");
    opt.command = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto next = [&]() -> const std::string& {
            if (i + 1 >= args.size()) throw ParseError("flag " + a + " needs a value");
            return args[++i];
        };
        if (a == "--input") opt.input = next();
        else if (a == "--output") opt.output = next();
        else if (a == "--format") opt.format = next();
        else if (a == "--seed") opt.seed = std::stoull(next());
        else if (a == "--trials") opt.trials = std::stoll(next());
        else if (a == "--epsilon") opt.epsilon = std::stod(next());
        else if (a == "--precision") opt.precision = std::stod(next());
        else if (a == "--lambda") opt.lambda = std::stod(next());
        else if (a == "--eps1") opt.eps1 = std::stod(next());
        else if (a == "--randomize") opt.randomize = true;
        else throw ParseError("unknown flag '" + a + "'");
    }
    if (opt.format != "text" && opt.format != "structured")
        throw ParseError("--format must be text or structured");
    return opt;
}

/// Full command dispatch; returns the process exit code and writes the
/// report to `out`, diagnostics to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        Options opt = parse_args(args);
        if (opt.input.empty()) throw ParseError("--input is required");
        ParsedInstance inst = load_instance(opt.input);
        json doc;
        if (opt.command == "solve-gap-cap") {
            if (!inst.gap) throw ParseError("solve-gap-cap needs a gap-cap instance");
            doc = detail::run_solve_gap_cap(opt, *inst.gap);
        } else if (opt.command == "solve-outlier") {
            if (!inst.outlier) throw ParseError("solve-outlier needs an outlier instance");
            doc = detail::run_solve_outlier(opt, *inst.outlier);
        } else if (opt.command == "solve-maxmin") {
            if (!inst.maxmin) throw ParseError("solve-maxmin needs a maxmin instance");
            doc = detail::run_solve_maxmin(opt, *inst.maxmin);
        } else if (opt.command == "oracle") {
            doc = detail::run_oracle(inst);
        } else if (opt.command == "montecarlo") {
            doc = detail::run_montecarlo(opt, inst);
        } else {
            throw ParseError("unknown command '" + opt.command + "'");
        }
        doc["seed"] = opt.seed;
        doc["input"] = opt.input;
        detail::emit(opt, doc, out);
        return kOk;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const InfeasibleInstanceError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const BudgetExceededError& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return kBudgetExceeded;
    } catch (const InternalInvariantError& e) {
        err << "internal invariant violated: " << e.what() << "\n";
        return kInternalInvariant;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    }
}

} // namespace polyround::cli

#endif
