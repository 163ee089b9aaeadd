#ifndef POLYROUND_MAXMIN_HPP
#define POLYROUND_MAXMIN_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "polyround/depround.hpp"
#include "polyround/errors.hpp"
#include "polyround/lp.hpp"
#include "polyround/polytope.hpp"
#include "polyround/rng.hpp"

namespace polyround {

/// Max-min fair allocation: every good goes to at most one person and the
/// least happy person should be as happy as possible. Utilities are
/// nonnegative integers; caps, when present, bound how many goods each
/// person may receive.
struct MaxMinInstance {
    int persons = 0;
    int goods = 0;
    std::vector<std::vector<double>> u; // persons x goods
    std::vector<long long> caps;        // empty means uncapacitated

    void validate() const {
        if (persons <= 0 || goods <= 0) throw InvalidInputError("empty instance");
        if (static_cast<int>(u.size()) != persons) throw InvalidInputError("u: bad row count");
        for (auto& row : u) {
            if (static_cast<int>(row.size()) != goods) throw InvalidInputError("u: bad column count");
            for (double v : row)
                if (!std::isfinite(v) || v < 0 || v != std::floor(v))
                    throw InvalidInputError("utilities must be nonnegative integers");
        }
        if (!caps.empty()) {
            if (static_cast<int>(caps.size()) != persons) throw InvalidInputError("caps: bad length");
            for (long long c : caps)
                if (c < 0) throw InvalidInputError("caps must be nonnegative");
        }
    }

    double max_person_total() const {
        double best = 0.0;
        for (auto& row : u) {
            double s = 0.0;
            for (double v : row) s += v;
            best = std::max(best, s);
        }
        return best;
    }
};

/// All valid configurations of person i at threshold T: big-item singletons
/// (u >= T/lambda) and minimal bundles of small items reaching T.
inline std::vector<std::vector<int>> enumerate_valid_configs(const MaxMinInstance& inst, int person,
                                                             double T, double lambda,
                                                             long long budget = 2'000'000) {
    inst.validate();
    if (!(T > 0) || !(lambda > 1.0)) throw InvalidInputError("need T > 0 and lambda > 1");
    const auto& u = inst.u[static_cast<std::size_t>(person)];
    double big_cut = T / lambda;

    std::vector<std::vector<int>> configs;
    std::vector<int> small;
    for (int j = 0; j < inst.goods; ++j) {
        if (u[static_cast<std::size_t>(j)] >= big_cut && u[static_cast<std::size_t>(j)] > 0)
            configs.push_back({j});
        else if (u[static_cast<std::size_t>(j)] > 0)
            small.push_back(j);
    }

    long long nodes = 0;
    std::vector<int> cur;
    double cur_sum = 0.0;
    auto rec = [&](auto&& self, std::size_t from) -> void {
        if (++nodes > budget) throw BudgetExceededError("config enumeration exceeds the budget");
        for (std::size_t k = from; k < small.size(); ++k) {
            int j = small[k];
            double uj = u[static_cast<std::size_t>(j)];
            cur.push_back(j);
            cur_sum += uj;
            if (cur_sum >= T) {
                // Minimal iff dropping the weakest member falls below T.
                double min_u = uj;
                for (int g : cur) min_u = std::min(min_u, u[static_cast<std::size_t>(g)]);
                if (cur_sum - min_u < T) configs.push_back(cur);
            } else {
                self(self, k + 1);
            }
            cur_sum -= uj;
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return configs;
}

/// A solved configuration LP: one weight per (person, valid bundle) pair.
struct ConfigLp {
    double T = 0.0;
    double lambda = 0.0;
    std::vector<std::vector<std::vector<int>>> configs; // per person
    std::vector<std::vector<double>> x;                 // per person, per config
};

inline std::optional<ConfigLp> solve_config_lp(const MaxMinInstance& inst, double T, double lambda,
                                               long long budget = 2'000'000) {
    ConfigLp out;
    out.T = T;
    out.lambda = lambda;
    out.configs.resize(static_cast<std::size_t>(inst.persons));

    LinearProgram lp;
    std::vector<std::pair<int, int>> var_owner; // (person, config index)
    for (int i = 0; i < inst.persons; ++i) {
        out.configs[static_cast<std::size_t>(i)] = enumerate_valid_configs(inst, i, T, lambda, budget);
        if (out.configs[static_cast<std::size_t>(i)].empty()) return std::nullopt;
        for (std::size_t c = 0; c < out.configs[static_cast<std::size_t>(i)].size(); ++c)
            var_owner.emplace_back(i, static_cast<int>(c));
    }
    lp.num_vars = static_cast<int>(var_owner.size());
    lp.bounds.assign(static_cast<std::size_t>(lp.num_vars), {0.0, 1.0});

    std::vector<Constraint> good_rows(static_cast<std::size_t>(inst.goods));
    for (int j = 0; j < inst.goods; ++j) good_rows[static_cast<std::size_t>(j)] = {{}, Relation::LessEqual, 1.0, Tag::Capacity};
    int v = 0;
    std::vector<Constraint> person_rows(static_cast<std::size_t>(inst.persons));
    for (int i = 0; i < inst.persons; ++i) person_rows[static_cast<std::size_t>(i)] = {{}, Relation::Equal, 1.0, Tag::Assign};
    for (auto [i, c] : var_owner) {
        person_rows[static_cast<std::size_t>(i)].terms.push_back({v, 1.0});
        for (int j : out.configs[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])
            good_rows[static_cast<std::size_t>(j)].terms.push_back({v, 1.0});
        ++v;
    }
    for (auto& row : person_rows) lp.constraints.push_back(std::move(row));
    for (auto& row : good_rows)
        if (!row.terms.empty()) lp.constraints.push_back(std::move(row));

    LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    out.x.resize(static_cast<std::size_t>(inst.persons));
    v = 0;
    for (auto [i, c] : var_owner) {
        (void)c;
        out.x[static_cast<std::size_t>(i)].push_back(std::max(0.0, sol.values[static_cast<std::size_t>(v)]));
        ++v;
    }
    return out;
}

/// Largest integer threshold with a feasible configuration LP, or 0 when
/// even T = 1 fails.
inline double max_feasible_threshold(const MaxMinInstance& inst, double lambda,
                                     long long budget = 2'000'000) {
    long long hi = static_cast<long long>(std::llround(inst.max_person_total()));
    if (hi < 1 || !solve_config_lp(inst, 1.0, lambda, budget)) return 0.0;
    long long lo = 1;
    while (lo < hi) {
        long long mid = lo + (hi - lo + 1) / 2;
        if (solve_config_lp(inst, static_cast<double>(mid), lambda, budget)) lo = mid;
        else hi = mid - 1;
    }
    return static_cast<double>(lo);
}

/// Person-good edge weights induced by a configuration LP solution, split
/// into matching edges (big items) and flow edges (small items).
struct FlowMatchGraph {
    double T = 0.0;
    double lambda = 0.0;
    std::map<std::pair<int, int>, double> w;          // all positive-weight edges
    std::set<std::pair<int, int>> matching_edges;
    std::vector<double> m_person, m_good;             // matching mass per vertex

    double f_person(int i) const { return 1.0 - m_person[static_cast<std::size_t>(i)]; }
    double f_good(int j) const { return 1.0 - m_good[static_cast<std::size_t>(j)]; }
};

inline FlowMatchGraph build_flow_match(const MaxMinInstance& inst, const ConfigLp& lp) {
    FlowMatchGraph g;
    g.T = lp.T;
    g.lambda = lp.lambda;
    g.m_person.assign(static_cast<std::size_t>(inst.persons), 0.0);
    g.m_good.assign(static_cast<std::size_t>(inst.goods), 0.0);
    double big_cut = lp.T / lp.lambda;
    for (int i = 0; i < inst.persons; ++i)
        for (std::size_t c = 0; c < lp.configs[static_cast<std::size_t>(i)].size(); ++c) {
            double weight = lp.x[static_cast<std::size_t>(i)][c];
            if (weight <= 0.0) continue;
            for (int j : lp.configs[static_cast<std::size_t>(i)][c]) g.w[{i, j}] += weight;
        }
    for (auto& [e, weight] : g.w) {
        weight = std::min(weight, 1.0);
        if (inst.u[static_cast<std::size_t>(e.first)][static_cast<std::size_t>(e.second)] >= big_cut) {
            g.matching_edges.insert(e);
            g.m_person[static_cast<std::size_t>(e.first)] += weight;
            g.m_good[static_cast<std::size_t>(e.second)] += weight;
        }
    }
    for (double& v : g.m_person) v = std::min(v, 1.0);
    for (double& v : g.m_good) v = std::min(v, 1.0);
    return g;
}

/// Dependent rounding over the matching edges. Every person or good is
/// saturated with probability exactly equal to its matching mass.
inline std::map<int, int> sample_matching(const MaxMinInstance& inst, const FlowMatchGraph& g,
                                          Rng& rng) {
    BipartiteFractional bf;
    bf.left = inst.persons;
    bf.right = inst.goods;
    for (auto& e : g.matching_edges) bf.edges[e] = g.w.at(e);
    bf = round_all(std::move(bf), rng);
    std::map<int, int> matched;
    for (auto& [e, x] : bf.edges)
        if (x == 1.0) {
            if (matched.count(e.first))
                throw InternalInvariantError("person matched to two big goods");
            matched[e.first] = e.second;
        }
    return matched;
}

/// Bundle claims of the unmatched persons: person i samples one of its small
/// bundles with probability x_{i,C}/f_i, then drops goods that are nearly
/// saturated by matching mass (m_j >= 1 - eps1) and goods taken by the
/// realized matching.
inline std::map<int, std::vector<int>> claim_bundles(const MaxMinInstance& inst, const ConfigLp& lp,
                                                     const FlowMatchGraph& g,
                                                     const std::map<int, int>& matched, double eps1,
                                                     Rng& rng) {
    std::set<int> taken;
    for (auto& [i, j] : matched) taken.insert(j);
    double big_cut = lp.T / lp.lambda;

    std::map<int, std::vector<int>> claims;
    for (int i = 0; i < inst.persons; ++i) {
        if (matched.count(i)) continue;
        // Small-bundle configs and their LP mass.
        std::vector<std::size_t> small_cfg;
        double f_i = 0.0;
        for (std::size_t c = 0; c < lp.configs[static_cast<std::size_t>(i)].size(); ++c) {
            const auto& cfg = lp.configs[static_cast<std::size_t>(i)][c];
            bool big = cfg.size() == 1 &&
                       inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(cfg[0])] >= big_cut;
            if (!big) {
                small_cfg.push_back(c);
                f_i += lp.x[static_cast<std::size_t>(i)][c];
            }
        }
        if (f_i <= 1e-12) {
            claims[i] = {};
            continue;
        }
        double pick = rng.next_double() * f_i;
        std::size_t chosen = small_cfg.back();
        for (std::size_t c : small_cfg) {
            pick -= lp.x[static_cast<std::size_t>(i)][c];
            if (pick <= 0) { chosen = c; break; }
        }
        std::vector<int> claim;
        for (int j : lp.configs[static_cast<std::size_t>(i)][chosen]) {
            if (g.m_good[static_cast<std::size_t>(j)] >= 1.0 - eps1) continue;
            if (taken.count(j)) continue;
            claim.push_back(j);
        }
        claims[i] = std::move(claim);
    }
    return claims;
}

/// The utility-aware walk that settles contested claims. Paths use the
/// expectation-preserving two-sided step; cycles take the deterministic sign
/// that cannot decrease the anchor person's utility. Goods never go to two
/// persons.
struct ContentionResult {
    std::map<int, std::vector<int>> goods_of_person;
    std::map<std::pair<int, int>, double> final_w; // 0/1 per claimed edge
};

inline ContentionResult resolve_contention(const MaxMinInstance& inst,
                                           const std::map<int, std::vector<int>>& claims,
                                           const FlowMatchGraph& g, Rng& rng) {
    // Claimed subgraph with weights w' = w / f_person; zero-utility edges
    // carry nothing and break person pivots, so they are dropped up front.
    std::map<std::pair<int, int>, double> w;
    for (auto& [i, goods] : claims) {
        double f_i = g.f_person(i);
        for (int j : goods) {
            double util = inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (util <= 0.0) continue;
            auto it = g.w.find({i, j});
            if (it == g.w.end()) continue;
            w[{i, j}] = std::min(1.0, it->second / std::max(f_i, 1e-12));
        }
    }

    ContentionResult res;
    auto settle_integrals = [&] {
        // Goods fully claimed by someone are awarded; competing claims on an
        // awarded good die. Ties go to the larger utility, then lower person.
        for (auto& [e, val] : w) {
            if (val != 1.0) continue;
            auto [i, j] = e;
            bool already = false;
            for (auto& [owner, goods] : res.goods_of_person)
                if (std::find(goods.begin(), goods.end(), j) != goods.end()) already = true;
            if (already) continue;
            int best_i = i;
            double best_u = inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            for (auto& [e2, val2] : w)
                if (e2.second == j && val2 == 1.0) {
                    double u2 = inst.u[static_cast<std::size_t>(e2.first)][static_cast<std::size_t>(j)];
                    if (u2 > best_u || (u2 == best_u && e2.first < best_i)) {
                        best_i = e2.first;
                        best_u = u2;
                    }
                }
            res.goods_of_person[best_i].push_back(j);
            for (auto& [e2, val2] : w)
                if (e2.second == j && e2.first != best_i) val2 = 0.0;
        }
    };

    long long guard = 4LL * (static_cast<long long>(w.size()) + 4);
    while (true) {
        settle_integrals();
        BipartiteFractional view;
        view.left = inst.persons;
        view.right = inst.goods;
        for (auto& [e, val] : w)
            if (val > 0.0 && val < 1.0) view.edges[e] = val;
        if (view.edges.empty()) break;
        if (--guard < 0) throw InternalInvariantError("contention walk failed to make progress");

        detail::FracGraph fg = detail::build_frac_graph(view);
        detail::CycleOrPath cp = detail::choose_cycle_or_path(fg);
        std::vector<int> verts = cp.vertices;
        if (cp.is_cycle && verts.front() >= inst.persons) {
            // Rotate so the anchor vertex is a person.
            std::rotate(verts.begin(), verts.begin() + 1, verts.end());
        }
        std::size_t s = verts.size() - (cp.is_cycle ? 0 : 1);

        auto util_at = [&](int person_vertex, int good_vertex) {
            return inst.u[static_cast<std::size_t>(person_vertex)]
                         [static_cast<std::size_t>(good_vertex - inst.persons)];
        };
        // z_t = coef[t] * z_1 along edges e_t = (verts[t-1], verts[t]).
        std::vector<double> coef(s + 1, 0.0);
        coef[1] = 1.0;
        for (std::size_t t = 1; t < s; ++t) {
            int pivot = verts[t % verts.size()];
            if (pivot >= inst.persons) {
                coef[t + 1] = -coef[t]; // item pivot: the good's total is unchanged
            } else {
                int prev = verts[t - 1];
                int next = verts[(t + 1) % verts.size()];
                coef[t + 1] = -coef[t] * util_at(pivot, prev) / util_at(pivot, next);
            }
        }
        auto edge_key = [&](std::size_t t) {
            int a = verts[t - 1], b = verts[t % verts.size()];
            int person = std::min(a, b), good = std::max(a, b) - inst.persons;
            return std::make_pair(person, good);
        };
        double mu = std::numeric_limits<double>::infinity();
        double gamma = std::numeric_limits<double>::infinity();
        for (std::size_t t = 1; t <= s; ++t) {
            double y = w.at(edge_key(t));
            if (coef[t] > 0) {
                mu = std::min(mu, (1.0 - y) / coef[t]);
                gamma = std::min(gamma, y / coef[t]);
            } else {
                mu = std::min(mu, y / -coef[t]);
                gamma = std::min(gamma, (1.0 - y) / -coef[t]);
            }
        }
        double z1;
        if (cp.is_cycle) {
            // Sign chosen so the anchor person's utility cannot decrease.
            int anchor = verts.front();
            double delta_per_z1 = util_at(anchor, verts[1]) * coef[1] +
                                  util_at(anchor, verts[s - 1]) * coef[s];
            z1 = delta_per_z1 >= 0 ? mu : -gamma;
        } else {
            z1 = rng.bernoulli(gamma / (mu + gamma)) ? mu : -gamma;
        }
        for (std::size_t t = 1; t <= s; ++t) {
            double& y = w.at(edge_key(t));
            y += coef[t] * z1;
            if (y < 1e-9) y = 0.0;
            else if (y > 1.0 - 1e-9) y = 1.0;
        }
    }
    for (auto& [e, val] : w) res.final_w[e] = val;
    return res;
}

/// Parameters of the configuration-LP pipeline. Zero means derive from k;
/// the closed forms need log log k > 0, so small instances use the
/// square-root scaling with the log factor clamped to 1.
struct MaxMinParams {
    double lambda = 0.0;
    double eps1 = 0.0;
    long long config_budget = 2'000'000;
};

inline void derive_params(int k, MaxMinParams& p) {
    double logs = 1.0;
    if (k >= 16) logs = std::sqrt(std::log(static_cast<double>(k)) / std::log(std::log(static_cast<double>(k))));
    if (p.lambda <= 0) p.lambda = std::max(1.5, 2.0 * std::sqrt(static_cast<double>(k)) * logs);
    if (p.eps1 <= 0) p.eps1 = std::min(0.5, logs / std::sqrt(static_cast<double>(k)));
}

struct MaxMinAllocation {
    std::vector<std::vector<int>> goods_of_person;
    std::vector<double> utility;
    std::vector<bool> matched;
    double min_utility = 0.0;
    double T = 0.0;
    double lambda = 0.0;
    double eps1 = 0.0;
};

/// Full pipeline: threshold search, configuration LP, random matching,
/// bundle claims, contention resolution.
inline MaxMinAllocation maxmin_solve(const MaxMinInstance& inst, Rng& rng,
                                     MaxMinParams params = {}) {
    inst.validate();
    derive_params(inst.persons, params);

    MaxMinAllocation out;
    out.lambda = params.lambda;
    out.eps1 = params.eps1;
    out.goods_of_person.assign(static_cast<std::size_t>(inst.persons), {});
    out.utility.assign(static_cast<std::size_t>(inst.persons), 0.0);
    out.matched.assign(static_cast<std::size_t>(inst.persons), false);

    out.T = max_feasible_threshold(inst, params.lambda, params.config_budget);
    if (out.T <= 0) {
        out.min_utility = 0.0;
        return out;
    }
    auto lp = solve_config_lp(inst, out.T, params.lambda, params.config_budget);
    if (!lp) throw InternalInvariantError("threshold search returned an infeasible threshold");
    FlowMatchGraph g = build_flow_match(inst, *lp);

    std::map<int, int> matched = sample_matching(inst, g, rng);
    for (auto& [i, j] : matched) {
        out.goods_of_person[static_cast<std::size_t>(i)].push_back(j);
        out.matched[static_cast<std::size_t>(i)] = true;
    }
    auto claims = claim_bundles(inst, *lp, g, matched, params.eps1, rng);
    ContentionResult res = resolve_contention(inst, claims, g, rng);
    for (auto& [i, goods] : res.goods_of_person)
        for (int j : goods) out.goods_of_person[static_cast<std::size_t>(i)].push_back(j);

    for (int i = 0; i < inst.persons; ++i)
        for (int j : out.goods_of_person[static_cast<std::size_t>(i)])
            out.utility[static_cast<std::size_t>(i)] += inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    out.min_utility = *std::min_element(out.utility.begin(), out.utility.end());
    return out;
}

/// Capacitated rounding: the capacity-respecting walk with persons in the
/// machine role. Utility rows act as droppable lower bounds, cap rows are
/// hard, and the degree-2 rewrite brackets the person's good count between
/// the floor and ceiling of its fractional mass at entry.
struct CapRoundResult {
    std::vector<std::vector<int>> goods_of_person;
    std::vector<double> utility;
    std::vector<long long> counts;
    long long iterations = 0;
};

inline CapRoundResult maxmin_cap_round(const MaxMinInstance& inst,
                                       const std::vector<std::vector<double>>& x_star, double T,
                                       Rng* rng = nullptr, double tol = 1e-7) {
    inst.validate();
    std::vector<long long> caps = inst.caps;
    if (caps.empty()) caps.assign(static_cast<std::size_t>(inst.persons), inst.goods);

    const int k = inst.persons, m = inst.goods;
    std::vector<double> x;
    auto vid = [&](int i, int j) { return i * m + j; };
    x.resize(static_cast<std::size_t>(k * m));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) {
            double v = x_star[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!std::isfinite(v) || v < -tol || v > 1 + tol)
                throw InvalidInputError("fractional allocation outside [0,1]");
            x[static_cast<std::size_t>(vid(i, j))] = v < tol ? 0.0 : (v > 1 - tol ? 1.0 : v);
        }

    std::vector<std::optional<long long>> entry_floor(static_cast<std::size_t>(k));
    std::vector<std::optional<long long>> entry_ceil(static_cast<std::size_t>(k));
    CapRoundResult res;
    const long long guard = static_cast<long long>(k + m) + 2LL * k * m;

    Rng fallback(0);
    Rng& gen = rng ? *rng : fallback;

    while (true) {
        std::vector<std::vector<int>> person_vars(static_cast<std::size_t>(k));
        std::vector<std::vector<int>> good_vars(static_cast<std::size_t>(m));
        bool any = false;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < m; ++j) {
                double v = x[static_cast<std::size_t>(vid(i, j))];
                if (v > 0.0 && v < 1.0) {
                    person_vars[static_cast<std::size_t>(i)].push_back(vid(i, j));
                    good_vars[static_cast<std::size_t>(j)].push_back(vid(i, j));
                    any = true;
                }
            }
        if (!any) break;

        Polytope poly;
        poly.num_vars = k * m;
        for (int j = 0; j < m; ++j) {
            auto& vars = good_vars[static_cast<std::size_t>(j)];
            if (vars.empty()) continue;
            double settled = 0.0;
            for (int i = 0; i < k; ++i)
                if (x[static_cast<std::size_t>(vid(i, j))] == 1.0) settled += 1.0;
            Constraint row{{}, Relation::LessEqual, 1.0 - settled, Tag::Assign};
            for (int v : vars) row.terms.push_back({v, 1.0});
            poly.constraints.push_back(std::move(row));
        }
        for (int i = 0; i < k; ++i) {
            auto& vars = person_vars[static_cast<std::size_t>(i)];
            std::size_t deg = vars.size();
            if (deg == 0) continue;
            double settled_cnt = 0.0, settled_util = 0.0;
            for (int j = 0; j < m; ++j)
                if (x[static_cast<std::size_t>(vid(i, j))] == 1.0) {
                    settled_cnt += 1.0;
                    settled_util += inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                }
            double cap_res = static_cast<double>(caps[static_cast<std::size_t>(i)]) - settled_cnt;
            double util_res = T - settled_util;
            double float_sum = 0.0, float_util = 0.0;
            for (int v : vars) {
                float_sum += x[static_cast<std::size_t>(v)];
                float_util += inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(v % m)] *
                              x[static_cast<std::size_t>(v)];
            }
            if (deg == 1) continue;
            if (deg == 2) {
                auto& ef = entry_floor[static_cast<std::size_t>(i)];
                auto& ec = entry_ceil[static_cast<std::size_t>(i)];
                if (!ec) {
                    ec = std::max<long long>(1, static_cast<long long>(std::ceil(float_sum - tol)));
                    ef = static_cast<long long>(std::floor(float_sum + tol));
                }
                Constraint up{{}, Relation::LessEqual, static_cast<double>(*ec), Tag::Capacity};
                for (int v : vars) up.terms.push_back({v, 1.0});
                poly.constraints.push_back(std::move(up));
                if (*ef >= 1) {
                    Constraint down{{}, Relation::GreaterEqual, static_cast<double>(*ef), Tag::Capacity};
                    for (int v : vars) down.terms.push_back({v, 1.0});
                    poly.constraints.push_back(std::move(down));
                }
                continue;
            }
            bool util_tight = std::fabs(float_util - util_res) <= tol * std::max(1.0, util_res);
            bool cap_tight = std::fabs(float_sum - cap_res) <= tol;
            bool drop_util = (deg == 3) && util_tight && cap_tight;
            if (!drop_util) {
                Constraint util{{}, Relation::GreaterEqual, util_res, Tag::Load};
                for (int v : vars) {
                    double coefu = inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(v % m)];
                    if (coefu != 0.0) util.terms.push_back({v, coefu});
                }
                if (!util.terms.empty()) poly.constraints.push_back(std::move(util));
            }
            Constraint cap{{}, Relation::LessEqual, cap_res, Tag::Capacity};
            for (int v : vars) cap.terms.push_back({v, 1.0});
            poly.constraints.push_back(std::move(cap));
        }

        MoveBranches mb;
        try {
            mb = compute_move(poly, x, tol);
        } catch (const AtVertexError&) {
            throw InternalInvariantError("capacitated max-min walk reached a vertex");
        }
        x = gen.bernoulli(mb.prob_up) ? mb.up : mb.down;
        ++res.iterations;
        if (res.iterations > guard)
            throw InternalInvariantError("capacitated max-min walk exceeded the iteration bound");
    }

    res.goods_of_person.assign(static_cast<std::size_t>(k), {});
    res.utility.assign(static_cast<std::size_t>(k), 0.0);
    res.counts.assign(static_cast<std::size_t>(k), 0);
    for (int j = 0; j < m; ++j) {
        int owner = -1;
        for (int i = 0; i < k; ++i)
            if (x[static_cast<std::size_t>(vid(i, j))] == 1.0) {
                if (owner >= 0) throw InternalInvariantError("good allocated twice");
                owner = i;
            }
        if (owner >= 0) {
            res.goods_of_person[static_cast<std::size_t>(owner)].push_back(j);
            res.utility[static_cast<std::size_t>(owner)] +=
                inst.u[static_cast<std::size_t>(owner)][static_cast<std::size_t>(j)];
            ++res.counts[static_cast<std::size_t>(owner)];
        }
    }
    for (int i = 0; i < k; ++i)
        if (res.counts[static_cast<std::size_t>(i)] > caps[static_cast<std::size_t>(i)])
            throw InternalInvariantError("cap violated after rounding");
    return res;
}

/// LP generator for the capacitated pipeline: the largest threshold T with
/// a feasible fractional allocation under the caps, and one such allocation.
struct CapFractional {
    double T = 0.0;
    std::vector<std::vector<double>> x;
};

inline CapFractional maxmin_cap_fractional(const MaxMinInstance& inst, double precision = 1e-6) {
    inst.validate();
    std::vector<long long> caps = inst.caps;
    if (caps.empty()) caps.assign(static_cast<std::size_t>(inst.persons), inst.goods);
    const int k = inst.persons, m = inst.goods;

    auto build = [&](double T) {
        LinearProgram lp;
        lp.num_vars = k * m;
        lp.bounds.assign(static_cast<std::size_t>(k * m), {0.0, 1.0});
        for (int j = 0; j < m; ++j) {
            Constraint row{{}, Relation::LessEqual, 1.0, Tag::Assign};
            for (int i = 0; i < k; ++i) row.terms.push_back({i * m + j, 1.0});
            lp.constraints.push_back(std::move(row));
        }
        for (int i = 0; i < k; ++i) {
            Constraint cap{{}, Relation::LessEqual, static_cast<double>(caps[static_cast<std::size_t>(i)]), Tag::Capacity};
            Constraint util{{}, Relation::GreaterEqual, T, Tag::Load};
            for (int j = 0; j < m; ++j) {
                cap.terms.push_back({i * m + j, 1.0});
                if (inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0.0)
                    util.terms.push_back({i * m + j, inst.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
            }
            lp.constraints.push_back(std::move(cap));
            if (!util.terms.empty() || T > 0) {
                if (util.terms.empty()) util.terms.push_back({i * m, 0.0});
                lp.constraints.push_back(std::move(util));
            }
        }
        return lp;
    };

    double lo = 0.0, hi = std::max(1.0, inst.max_person_total());
    if (solve(build(hi)).status != LpStatus::Optimal) {
        while (hi - lo > precision) {
            double mid = 0.5 * (lo + hi);
            if (solve(build(mid)).status == LpStatus::Optimal) lo = mid;
            else hi = mid;
        }
    } else {
        lo = hi;
    }
    CapFractional out;
    out.T = lo;
    LpSolution sol = solve(build(lo));
    if (sol.status != LpStatus::Optimal) {
        out.T = std::max(0.0, lo - precision);
        sol = solve(build(out.T));
        if (sol.status != LpStatus::Optimal)
            throw InfeasibleInstanceError("no fractional allocation under the caps");
    }
    out.x.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(m), 0.0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j)
            out.x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                std::clamp(sol.values[static_cast<std::size_t>(i * m + j)], 0.0, 1.0);
    return out;
}

} // namespace polyround

#endif
