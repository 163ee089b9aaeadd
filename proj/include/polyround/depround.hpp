#ifndef POLYROUND_DEPROUND_HPP
#define POLYROUND_DEPROUND_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "polyround/errors.hpp"
#include "polyround/rng.hpp"

namespace polyround {

/// Edge-weighted bipartite graph with values in [0,1]. Values at exactly
/// 0 or 1 are settled; the working graph in each step consists of the
/// strictly fractional edges only.
struct BipartiteFractional {
    int left = 0;
    int right = 0;
    std::map<std::pair<int, int>, double> edges; // (u, v) -> value

    void validate() const {
        for (auto& [e, x] : edges) {
            if (e.first < 0 || e.first >= left || e.second < 0 || e.second >= right)
                throw InvalidInputError("edge endpoint out of range");
            if (!std::isfinite(x) || x < 0.0 || x > 1.0)
                throw InvalidInputError("edge value outside [0,1]");
        }
    }

    double fractional_degree(bool on_left, int v) const {
        double d = 0.0;
        for (auto& [e, x] : edges)
            if ((on_left ? e.first : e.second) == v) d += x;
        return d;
    }

    int integral_degree(bool on_left, int v) const {
        int d = 0;
        for (auto& [e, x] : edges)
            if ((on_left ? e.first : e.second) == v && x == 1.0) ++d;
        return d;
    }
};

namespace detail {

// Vertices are numbered left 0..L-1 then right L..L+R-1 so "lowest-numbered
// fractional vertex" is well defined across the two sides.
struct FracGraph {
    int left;
    std::vector<std::vector<int>> adj;                    // vertex -> sorted neighbor vertices
    std::map<std::pair<int, int>, double*> value;         // normalized (min,max) vertex key

    static std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }
};

inline FracGraph build_frac_graph(BipartiteFractional& g) {
    FracGraph fg;
    fg.left = g.left;
    fg.adj.assign(static_cast<std::size_t>(g.left + g.right), {});
    for (auto& [e, x] : g.edges) {
        if (x <= 0.0 || x >= 1.0) continue;
        int a = e.first, b = g.left + e.second;
        fg.adj[static_cast<std::size_t>(a)].push_back(b);
        fg.adj[static_cast<std::size_t>(b)].push_back(a);
        fg.value[FracGraph::key(a, b)] = &x;
    }
    for (auto& nb : fg.adj) std::sort(nb.begin(), nb.end());
    return fg;
}

/// Walk greedily from `from` taking the lowest-numbered fractional neighbor
/// not stepping straight back, until a dead end or a vertex already seen.
/// Appends visited vertices to `out`; returns the repeated vertex or -1.
inline int walk(const FracGraph& fg, std::vector<int>& out, std::vector<int>& pos_of, int from,
                int came_from) {
    int cur = from, prev = came_from;
    while (true) {
        int next = -1;
        for (int nb : fg.adj[static_cast<std::size_t>(cur)])
            if (nb != prev) { next = nb; break; }
        if (next < 0) return -1;
        if (pos_of[static_cast<std::size_t>(next)] >= 0) return next;
        pos_of[static_cast<std::size_t>(next)] = static_cast<int>(out.size());
        out.push_back(next);
        prev = cur;
        cur = next;
    }
}

/// Even cycle if one is reachable by the walk, else a maximal path. The
/// result is the vertex sequence; consecutive pairs are the chosen edges.
struct CycleOrPath {
    std::vector<int> vertices;
    bool is_cycle = false;
};

inline CycleOrPath choose_cycle_or_path(const FracGraph& fg) {
    int start = -1;
    for (std::size_t v = 0; v < fg.adj.size(); ++v)
        if (!fg.adj[v].empty()) { start = static_cast<int>(v); break; }
    if (start < 0) throw NothingToRoundError("no fractional edges");

    std::vector<int> pos_of(fg.adj.size(), -1);
    std::vector<int> seq{start};
    pos_of[static_cast<std::size_t>(start)] = 0;

    int hit = walk(fg, seq, pos_of, start, -1);
    if (hit >= 0) {
        // Cycle is the tail of the walk from the first occurrence of `hit`.
        CycleOrPath r;
        std::size_t from = static_cast<std::size_t>(pos_of[static_cast<std::size_t>(hit)]);
        r.vertices.assign(seq.begin() + static_cast<long>(from), seq.end());
        r.is_cycle = true;
        return r;
    }
    // Forward walk dead-ended; extend backwards from the start along its
    // next-lowest unused edge so the path is maximal at both ends.
    int second = seq.size() > 1 ? seq[1] : -1;
    int back_first = -1;
    for (int nb : fg.adj[static_cast<std::size_t>(start)])
        if (nb != second) { back_first = nb; break; }
    if (back_first >= 0) {
        if (pos_of[static_cast<std::size_t>(back_first)] >= 0) {
            // Closing edge back into the walk: the prefix plus it is a cycle.
            CycleOrPath r;
            std::size_t upto = static_cast<std::size_t>(pos_of[static_cast<std::size_t>(back_first)]);
            r.vertices.assign(seq.begin(), seq.begin() + static_cast<long>(upto) + 1);
            std::reverse(r.vertices.begin(), r.vertices.end());
            r.is_cycle = true;
            return r;
        }
        std::vector<int> back{back_first};
        pos_of[static_cast<std::size_t>(back_first)] = static_cast<int>(seq.size());
        int hit2 = walk(fg, back, pos_of, back_first, start);
        std::reverse(back.begin(), back.end());
        back.insert(back.end(), seq.begin(), seq.end());
        seq = std::move(back);
        if (hit2 >= 0) {
            CycleOrPath r;
            auto it = std::find(seq.begin(), seq.end(), hit2);
            r.vertices.assign(seq.begin(), it + 1);
            r.is_cycle = true;
            return r;
        }
    }
    CycleOrPath r;
    r.vertices = std::move(seq);
    r.is_cycle = false;
    return r;
}

inline void snap_edges(BipartiteFractional& g) {
    for (auto& [e, x] : g.edges) {
        if (std::fabs(x) < 1e-9) x = 0.0;
        else if (std::fabs(x - 1.0) < 1e-9) x = 1.0;
    }
}

} // namespace detail

/// One dependent-rounding step: pick an even cycle or a maximal path,
/// split its edges into the two alternating matchings, and move by the
/// exact alpha/beta amounts. At least one edge settles at 0 or 1 and every
/// edge keeps its expectation.
inline BipartiteFractional round_step(BipartiteFractional g, Rng& rng) {
    g.validate();
    detail::FracGraph fg = detail::build_frac_graph(g);
    detail::CycleOrPath cp = detail::choose_cycle_or_path(fg);

    std::vector<double*> m1, m2;
    std::size_t edge_count = cp.vertices.size() - (cp.is_cycle ? 0 : 1);
    for (std::size_t i = 0; i < edge_count; ++i) {
        int a = cp.vertices[i];
        int b = cp.vertices[(i + 1) % cp.vertices.size()];
        double* x = fg.value.at(detail::FracGraph::key(a, b));
        (i % 2 == 0 ? m1 : m2).push_back(x);
    }

    double alpha = 2.0, beta = 2.0;
    for (double* x : m1) {
        alpha = std::min(alpha, 1.0 - *x);
        beta = std::min(beta, *x);
    }
    for (double* x : m2) {
        alpha = std::min(alpha, *x);
        beta = std::min(beta, 1.0 - *x);
    }

    if (rng.bernoulli(beta / (alpha + beta))) {
        for (double* x : m1) *x += alpha;
        for (double* x : m2) *x -= alpha;
    } else {
        for (double* x : m1) *x -= beta;
        for (double* x : m2) *x += beta;
    }
    detail::snap_edges(g);
    return g;
}

/// Round every edge to {0,1}. Each vertex ends with degree in
/// {floor, ceil} of its fractional degree; per-edge marginals are preserved.
inline BipartiteFractional round_all(BipartiteFractional g, Rng& rng) {
    g.validate();
    detail::snap_edges(g);
    auto has_fractional = [&] {
        for (auto& [e, x] : g.edges)
            if (x > 0.0 && x < 1.0) return true;
        return false;
    };
    while (has_fractional()) g = round_step(std::move(g), rng);
    return g;
}

} // namespace polyround

#endif
