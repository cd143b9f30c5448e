#pragma once

// Independent brute-force reference implementations used only by tests.
// These deliberately avoid the library's own algorithms: components come
// from a plain recursive DFS, matchings from single-source Kuhn search
// with a fresh visited set per source.

#include <cstddef>
#include <vector>

#include "robnet/graph.hpp"

namespace oracle {

inline void dfs_mark(const robnet::Graph& g, robnet::NodeId v, std::vector<int>& comp, int label) {
    comp[v] = label;
    for (robnet::NodeId w : g.neighbors_out(v))
        if (comp[w] < 0) dfs_mark(g, w, comp, label);
    for (robnet::NodeId w : g.neighbors_in(v))
        if (comp[w] < 0) dfs_mark(g, w, comp, label);
}

/// Weakly connected component sizes over live nodes.
inline std::vector<std::size_t> component_sizes(const robnet::Graph& g) {
    std::vector<int> comp(g.n_initial(), -2);
    for (robnet::NodeId v = 0; v < g.n_initial(); ++v)
        if (g.alive(v)) comp[v] = -1;
    int label = 0;
    for (robnet::NodeId v = 0; v < g.n_initial(); ++v)
        if (comp[v] == -1) dfs_mark(g, v, comp, label++);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(label), 0);
    for (robnet::NodeId v = 0; v < g.n_initial(); ++v)
        if (comp[v] >= 0) ++sizes[static_cast<std::size_t>(comp[v])];
    return sizes;
}

inline std::size_t largest_component(const robnet::Graph& g) {
    std::size_t best = 0;
    for (std::size_t s : component_sizes(g)) best = std::max(best, s);
    return best;
}

inline bool kuhn_try(const robnet::Graph& g, robnet::NodeId u, std::vector<char>& used,
                     std::vector<int>& match_right) {
    for (robnet::NodeId w : g.neighbors_out(u)) {
        if (used[w]) continue;
        used[w] = 1;
        if (match_right[w] < 0 ||
            kuhn_try(g, static_cast<robnet::NodeId>(match_right[w]), used, match_right)) {
            match_right[w] = static_cast<int>(u);
            return true;
        }
    }
    return false;
}

/// Maximum matching in the out-copy/in-copy bipartite graph of a directed
/// graph, computed from scratch.
inline std::size_t max_matching(const robnet::Graph& g) {
    std::vector<int> match_right(g.n_initial(), -1);
    std::size_t matched = 0;
    for (robnet::NodeId u = 0; u < g.n_initial(); ++u) {
        if (!g.alive(u)) continue;
        std::vector<char> used(g.n_initial(), 0);
        if (kuhn_try(g, u, used, match_right)) ++matched;
    }
    return matched;
}

inline std::size_t driver_count_matching(const robnet::Graph& g) {
    return std::max<std::size_t>(1, g.n_alive() - max_matching(g));
}

} // namespace oracle
