#include "robnet/netgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace robnet {

namespace {

// Scratch adjacency used while a construction is being assembled.
// Undirected workspaces keep lists symmetric; directed ones track
// out-neighbors only.
struct Workspace {
    Workspace(std::size_t n, bool directed) : directed(directed), out(n) {}

    bool directed;
    std::vector<std::vector<NodeId>> out;
    std::size_t edges = 0;

    static bool list_contains(const std::vector<NodeId>& v, NodeId x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        return it != v.end() && *it == x;
    }
    static bool list_insert(std::vector<NodeId>& v, NodeId x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it != v.end() && *it == x) return false;
        v.insert(it, x);
        return true;
    }
    static void list_erase(std::vector<NodeId>& v, NodeId x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it != v.end() && *it == x) v.erase(it);
    }

    bool contains(NodeId u, NodeId v) const { return list_contains(out[u], v); }

    bool insert(NodeId u, NodeId v) {
        if (!list_insert(out[u], v)) return false;
        if (!directed) list_insert(out[v], u);
        ++edges;
        return true;
    }

    void erase(NodeId u, NodeId v) {
        list_erase(out[u], v);
        if (!directed) list_erase(out[v], u);
        --edges;
    }

    std::size_t degree(NodeId v) const { return out[v].size(); }
};

std::size_t edge_budget(std::size_t n, double k_avg, bool directed) {
    double raw = directed ? static_cast<double>(n) * k_avg : static_cast<double>(n) * k_avg / 2.0;
    return static_cast<std::size_t>(std::llround(raw));
}

std::size_t pair_capacity(std::size_t n) { return n * (n - 1) / 2; }

[[noreturn]] void infeasible(const std::string& why) {
    throw std::invalid_argument("infeasible generator config: " + why);
}

// Decode r into (a, b) with a >= 1, b in [0, a), pairs ordered by a then b.
std::pair<std::size_t, std::size_t> triangle_decode(std::size_t r) {
    auto a = static_cast<std::size_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(r))) / 2.0);
    while (a * (a - 1) / 2 > r) --a;
    while ((a + 1) * a / 2 <= r) ++a;
    return {a, r - a * (a - 1) / 2};
}

// Sample `count` distinct values from [0, total) deterministically.
std::vector<std::size_t> sample_distinct(std::size_t count, std::size_t total, Rng& rng) {
    std::vector<std::size_t> picked;
    picked.reserve(count);
    if (count * 2 >= total) {
        std::vector<std::size_t> all(total);
        std::iota(all.begin(), all.end(), std::size_t{0});
        rng.shuffle(all);
        picked.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
        return picked;
    }
    std::vector<std::uint8_t> seen(total, 0);
    while (picked.size() < count) {
        std::size_t r = rng.below(total);
        if (!seen[r]) {
            seen[r] = 1;
            picked.push_back(r);
        }
    }
    return picked;
}

// --- constructions -------------------------------------------------------

Workspace build_er(std::size_t n, std::size_t m, Rng& rng) {
    if (m > pair_capacity(n)) infeasible("edge budget exceeds simple-graph capacity");
    Workspace ws(n, false);
    for (const auto& [u, v] : detail::er_skeleton(n, m, rng)) ws.insert(u, v);
    return ws;
}

Workspace build_ba(const GeneratorConfig& cfg, std::size_t m_target, Rng& rng) {
    const std::size_t n = cfg.n;
    std::size_t m0;
    std::vector<std::size_t> attach; // edges contributed by each arriving node

    if (cfg.params.ba_m) {
        if (*cfg.params.ba_m < 1) infeasible("ba_m must be >= 1");
        auto m = static_cast<std::size_t>(*cfg.params.ba_m);
        m0 = m;
        if (n <= m0) infeasible("n too small for the attachment parameter");
        attach.assign(n - m0, m);
    } else {
        double per_node = cfg.directed ? cfg.k_avg : cfg.k_avg / 2.0;
        m0 = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(per_node)));
        while (m0 > 2 && m0 * (m0 - 1) / 2 > m_target) --m0;
        if (n <= m0) infeasible("n too small for BA seed clique");
        std::size_t clique = m0 * (m0 - 1) / 2;
        std::size_t rem = m_target > clique ? m_target - clique : 0;
        // Spread `rem` edges over the arrivals, mixing the two nearest
        // integer counts so the total is hit exactly.
        std::size_t arrivals = n - m0;
        std::size_t lo = rem / arrivals;
        std::size_t extra = rem % arrivals; // this many arrivals attach lo+1
        attach.assign(arrivals, lo);
        std::size_t acc = 0;
        for (std::size_t i = 0; i < arrivals; ++i) {
            acc += extra;
            if (acc >= arrivals) {
                acc -= arrivals;
                attach[i] = lo + 1;
            }
        }
    }

    Workspace ws(n, false);
    std::vector<std::size_t> deg(n, 0);
    for (NodeId u = 0; u < m0; ++u)
        for (NodeId v = u + 1; v < m0; ++v)
            if (ws.insert(u, v)) {
                ++deg[u];
                ++deg[v];
            }

    std::vector<std::uint8_t> chosen(n, 0);
    for (std::size_t idx = 0; idx < attach.size(); ++idx) {
        NodeId node = static_cast<NodeId>(m0 + idx);
        std::size_t want = std::min<std::size_t>(attach[idx], node);
        std::vector<NodeId> targets;
        targets.reserve(want);
        for (std::size_t t = 0; t < want; ++t) {
            std::uint64_t total = 0;
            for (NodeId j = 0; j < node; ++j)
                if (!chosen[j]) total += deg[j];
            NodeId pick = 0;
            if (total == 0) {
                // degenerate start: all candidates isolated
                std::size_t free_count = 0;
                for (NodeId j = 0; j < node; ++j)
                    if (!chosen[j]) ++free_count;
                std::size_t skip = rng.below(free_count);
                for (NodeId j = 0; j < node; ++j) {
                    if (chosen[j]) continue;
                    if (skip == 0) {
                        pick = j;
                        break;
                    }
                    --skip;
                }
            } else {
                std::uint64_t r = rng.below(total);
                for (NodeId j = 0; j < node; ++j) {
                    if (chosen[j]) continue;
                    if (r < deg[j]) {
                        pick = j;
                        break;
                    }
                    r -= deg[j];
                }
            }
            chosen[pick] = 1;
            targets.push_back(pick);
        }
        for (NodeId t : targets) {
            chosen[t] = 0;
            if (ws.insert(node, t)) {
                ++deg[node];
                ++deg[t];
            }
        }
    }
    return ws;
}

Workspace build_sf(const GeneratorConfig& cfg, std::size_t m_target, Rng& rng) {
    const std::size_t n = cfg.n;
    if (m_target > pair_capacity(n)) infeasible("edge budget exceeds simple-graph capacity");
    double sigma = cfg.params.sf_sigma ? *cfg.params.sf_sigma : rng.real();
    double theta = cfg.params.sf_theta.value_or(5.0);
    if (sigma < 0.0 || sigma >= 1.0) infeasible("sf_sigma must lie in [0,1)");

    std::vector<double> cum(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::pow(static_cast<double>(i) + theta, -sigma);
        cum[i] = acc;
    }
    auto pick = [&]() -> NodeId {
        double r = rng.real() * acc;
        auto it = std::upper_bound(cum.begin(), cum.end(), r);
        if (it == cum.end()) --it;
        return static_cast<NodeId>(it - cum.begin());
    };

    Workspace ws(n, false);
    std::size_t attempts = 0;
    const std::size_t cap = 500 * m_target + 1000;
    while (ws.edges < m_target) {
        if (++attempts > cap)
            throw std::runtime_error("SF generation did not converge within the attempt budget");
        NodeId i = pick();
        NodeId j = pick();
        if (i == j) continue;
        ws.insert(i, j);
    }
    return ws;
}

Workspace build_eh(const GeneratorConfig& cfg, std::size_t m_target, Rng& rng) {
    Workspace ws = build_er(cfg.n, m_target, rng);
    const std::size_t n = cfg.n;
    const std::size_t max_iter = 50 * std::max<std::size_t>(m_target, 1);

    std::vector<NodeId> ties;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        std::size_t dmin = n, dmax = 0;
        for (std::size_t v = 0; v < n; ++v) {
            dmin = std::min(dmin, ws.degree(static_cast<NodeId>(v)));
            dmax = std::max(dmax, ws.degree(static_cast<NodeId>(v)));
        }
        if (dmax <= dmin + 1 || dmax == 0) break;

        ties.clear();
        for (std::size_t v = 0; v < n; ++v)
            if (ws.degree(static_cast<NodeId>(v)) == dmax) ties.push_back(static_cast<NodeId>(v));
        NodeId u = ties[rng.below(ties.size())];
        NodeId v = ws.out[u][rng.below(ws.degree(u))];

        // poorest node not already adjacent to v becomes the new endpoint
        std::size_t best = n;
        ties.clear();
        for (std::size_t w = 0; w < n; ++w) {
            NodeId wid = static_cast<NodeId>(w);
            if (wid == v || ws.contains(v, wid)) continue;
            std::size_t d = ws.degree(wid);
            if (d < best) {
                best = d;
                ties.clear();
            }
            if (d == best) ties.push_back(wid);
        }
        if (ties.empty()) continue;
        NodeId w = ties[rng.below(ties.size())];
        ws.erase(u, v);
        ws.insert(v, w);
    }
    return ws;
}

Workspace build_cycles(const GeneratorConfig& cfg, std::size_t cycle_len, std::size_t m_target,
                       Rng& rng) {
    const std::size_t n = cfg.n;
    if (n < cycle_len) infeasible("n below the cycle length");
    if (m_target > pair_capacity(n)) infeasible("edge budget exceeds simple-graph capacity");

    Workspace ws(n, false);
    NodeId picks[6];
    std::size_t attempts = 0;
    const std::size_t cap = 200 * std::max<std::size_t>(m_target, 1) + 10000;
    while (ws.edges < m_target) {
        if (++attempts > cap)
            throw std::runtime_error("cycle generation did not converge within the attempt budget");
        for (std::size_t k = 0; k < cycle_len; ++k) {
            for (;;) {
                NodeId c = static_cast<NodeId>(rng.below(n));
                bool dup = false;
                for (std::size_t t = 0; t < k; ++t)
                    if (picks[t] == c) dup = true;
                if (!dup) {
                    picks[k] = c;
                    break;
                }
            }
        }
        for (std::size_t k = 0; k < cycle_len; ++k)
            ws.insert(picks[k], picks[(k + 1) % cycle_len]);
    }
    return ws;
}

Workspace build_qs(const GeneratorConfig& cfg, std::size_t m_target, Rng& rng) {
    const std::size_t n = cfg.n;
    Workspace ws(n, cfg.directed);
    if (m_target < n - 1) infeasible("edge budget below the backbone chain");
    for (NodeId i = 0; i + 1 < n; ++i) ws.insert(i, i + 1);

    // Snapback candidates i->j with j < i; the undirected variant skips
    // j == i-1, which would collide with a backbone edge.
    if (cfg.params.qs_q) {
        double q = *cfg.params.qs_q;
        for (NodeId i = 1; i < n; ++i)
            for (NodeId j = 0; j < i; ++j) {
                if (!cfg.directed && j + 1 == i) continue;
                if (rng.bernoulli(q)) ws.insert(i, j);
            }
        return ws;
    }

    std::size_t want = m_target - (n - 1);
    std::size_t total = cfg.directed ? n * (n - 1) / 2 : (n - 1) * (n - 2) / 2;
    if (want > total) infeasible("snapback budget exceeds candidate pairs");
    for (std::size_t r : sample_distinct(want, total, rng)) {
        auto [a, b] = triangle_decode(r);
        NodeId i = cfg.directed ? static_cast<NodeId>(a) : static_cast<NodeId>(a + 1);
        NodeId j = static_cast<NodeId>(b);
        ws.insert(i, j);
    }
    return ws;
}

Workspace build_sw(const GeneratorConfig& cfg, std::size_t m_target, Rng& rng) {
    const std::size_t n = cfg.n;
    const bool nw = cfg.model == NetModel::SW_NW;
    Workspace ws(n, cfg.directed);

    // ring at distance d; `limit` caps how many start nodes participate
    auto add_ring = [&](std::size_t d, std::size_t limit) {
        for (std::size_t i = 0; i < limit; ++i)
            ws.insert(static_cast<NodeId>(i), static_cast<NodeId>((i + d) % n));
    };

    std::vector<std::pair<NodeId, NodeId>> lattice;
    auto record_ring = [&](std::size_t d, std::size_t limit) {
        for (std::size_t i = 0; i < limit; ++i)
            lattice.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>((i + d) % n));
    };

    std::size_t max_dist;
    if (cfg.params.sw_k) {
        auto k = static_cast<std::size_t>(*cfg.params.sw_k);
        if (k < 1) infeasible("sw_k must be >= 1");
        if (n < 2 * k + 1) infeasible("n must be at least 2K+1 for the ring lattice");
        for (std::size_t d = 1; d <= k; ++d) {
            add_ring(d, n);
            record_ring(d, n);
        }
        max_dist = k;
    } else if (nw) {
        if (n < 5) infeasible("n must be at least 2K+1 for the ring lattice");
        for (std::size_t d = 1; d <= 2; ++d) add_ring(d, n);
        if (m_target < ws.edges) infeasible("edge budget below the K=2 ring lattice");
        max_dist = 2;
    } else {
        // The rewiring variant has no shortcut phase, so the lattice itself
        // carries the budget: full rings plus one partial ring.
        std::size_t full = m_target / n;
        std::size_t partial = m_target % n;
        max_dist = full + (partial ? 1 : 0);
        if (max_dist < 1) infeasible("edge budget below one ring");
        if (!cfg.directed && max_dist > (n - 1) / 2)
            infeasible("ring lattice would exceed distinct-neighbor capacity");
        if (cfg.directed && max_dist > n - 1) infeasible("ring lattice deeper than the ring");
        for (std::size_t d = 1; d <= full; ++d) {
            add_ring(d, n);
            record_ring(d, n);
        }
        if (partial) {
            add_ring(full + 1, partial);
            record_ring(full + 1, partial);
        }
    }

    if (nw) {
        // shortcuts on top of the lattice, never removing existing edges
        std::size_t attempts = 0;
        const std::size_t cap = 500 * std::max<std::size_t>(m_target, 1) + 1000;
        while (ws.edges < m_target) {
            if (++attempts > cap)
                throw std::runtime_error("SW-NW shortcut placement did not converge");
            NodeId u = static_cast<NodeId>(rng.below(n));
            NodeId v = static_cast<NodeId>(rng.below(n));
            if (u == v) continue;
            ws.insert(u, v);
        }
        return ws;
    }

    double p = cfg.params.ws_rewire_p.value_or(0.3);
    for (const auto& [u, v] : lattice) {
        if (!rng.bernoulli(p)) continue;
        // re-target the edge from u to a uniformly chosen non-neighbor
        std::size_t eligible = n - 1 - ws.degree(u);
        if (eligible == 0) continue;
        std::size_t skip = rng.below(eligible);
        NodeId w = u;
        for (std::size_t cand = 0; cand < n; ++cand) {
            NodeId c = static_cast<NodeId>(cand);
            if (c == u || ws.contains(u, c)) continue;
            if (skip == 0) {
                w = c;
                break;
            }
            --skip;
        }
        if (w == u) continue;
        ws.erase(u, v);
        ws.insert(u, w);
    }
    return ws;
}

Graph assemble_native(const Workspace& ws, std::size_t n, bool directed) {
    Graph g(n, directed);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : ws.out[u]) {
            if (!directed && v < u) continue;
            g.add_edge(u, v);
        }
    return g;
}

Graph assemble_oriented(const Workspace& ws, std::size_t n, bool directed, Rng& rng) {
    Graph g(n, directed);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : ws.out[u]) {
            if (v < u) continue;
            if (!directed) {
                g.add_edge(u, v);
            } else if (rng.bernoulli(0.5)) {
                g.add_edge(u, v);
            } else {
                g.add_edge(v, u);
            }
        }
    return g;
}

} // namespace

namespace detail {

std::vector<std::pair<NodeId, NodeId>> er_skeleton(std::size_t n, std::size_t m, Rng& rng) {
    if (m > pair_capacity(n)) infeasible("edge budget exceeds simple-graph capacity");
    Workspace ws(n, false);
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(m);
    while (ws.edges < m) {
        NodeId u = static_cast<NodeId>(rng.below(n));
        NodeId v = static_cast<NodeId>(rng.below(n));
        if (u == v) continue;
        if (ws.insert(u, v)) edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    return edges;
}

} // namespace detail

std::string model_tag(NetModel m) {
    switch (m) {
    case NetModel::BA: return "BA";
    case NetModel::EH: return "EH";
    case NetModel::ER: return "ER";
    case NetModel::QS: return "QS";
    case NetModel::RH: return "RH";
    case NetModel::RT: return "RT";
    case NetModel::SF: return "SF";
    case NetModel::SW_NW: return "SW-NW";
    case NetModel::SW_WS: return "SW-WS";
    }
    throw std::logic_error("unknown model enum");
}

NetModel parse_model(const std::string& tag) {
    std::string t;
    for (char c : tag) t.push_back(c == '_' ? '-' : static_cast<char>(std::toupper(c)));
    if (t == "BA") return NetModel::BA;
    if (t == "EH") return NetModel::EH;
    if (t == "ER") return NetModel::ER;
    if (t == "QS") return NetModel::QS;
    if (t == "RH") return NetModel::RH;
    if (t == "RT") return NetModel::RT;
    if (t == "SF") return NetModel::SF;
    if (t == "SW-NW" || t == "SWNW") return NetModel::SW_NW;
    if (t == "SW-WS" || t == "SWWS") return NetModel::SW_WS;
    throw std::invalid_argument("unknown network model: " + tag);
}

std::vector<NetModel> model_set(const std::string& name) {
    if (name == "S1" || name == "s1")
        return {NetModel::BA, NetModel::EH, NetModel::ER,    NetModel::QS,   NetModel::RH,
                NetModel::RT, NetModel::SF, NetModel::SW_NW, NetModel::SW_WS};
    if (name == "S2" || name == "s2") return {NetModel::ER, NetModel::QS, NetModel::SF, NetModel::SW_NW};
    if (name == "S3" || name == "s3")
        return {NetModel::BA, NetModel::EH, NetModel::RH, NetModel::RT, NetModel::SW_WS};
    throw std::invalid_argument("unknown model set: " + name);
}

DegreeRange degree_range(NetModel model, bool directed) {
    DegreeRange r;
    switch (model) {
    case NetModel::SW_NW:
    case NetModel::SW_WS: r = {2.5, 5.0}; break;
    case NetModel::RH: r = {2.0, 4.0}; break;
    case NetModel::RT: r = {1.5, 3.0}; break;
    default: r = {3.0, 6.0}; break;
    }
    if (!directed) {
        r.lo *= 2.0;
        r.hi *= 2.0;
    }
    return r;
}

GeneratorConfig sample_config(NetModel model, bool directed, SizeRange sizes, Rng& rng) {
    if (sizes.lo < 1 || sizes.hi < sizes.lo) throw std::invalid_argument("bad size range");
    GeneratorConfig cfg;
    cfg.model = model;
    cfg.directed = directed;
    cfg.n = static_cast<std::size_t>(
        rng.range(static_cast<std::int64_t>(sizes.lo), static_cast<std::int64_t>(sizes.hi)));
    DegreeRange kr = degree_range(model, directed);
    cfg.k_avg = rng.real(kr.lo, kr.hi);
    cfg.seed = rng.next();
    if (model == NetModel::SF) {
        cfg.params.sf_sigma = rng.real();
        cfg.params.sf_theta = 5.0;
    }
    return cfg;
}

Graph generate(const GeneratorConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("n must be >= 1");
    if (cfg.k_avg <= 0.0) throw std::invalid_argument("k_avg must be positive");
    Rng rng(cfg.seed);
    const std::size_t m_target = edge_budget(cfg.n, cfg.k_avg, cfg.directed);

    switch (cfg.model) {
    case NetModel::ER: {
        Workspace ws = build_er(cfg.n, m_target, rng);
        return assemble_oriented(ws, cfg.n, cfg.directed, rng);
    }
    case NetModel::BA: {
        Workspace ws = build_ba(cfg, m_target, rng);
        return assemble_oriented(ws, cfg.n, cfg.directed, rng);
    }
    case NetModel::SF: {
        Workspace ws = build_sf(cfg, m_target, rng);
        return assemble_oriented(ws, cfg.n, cfg.directed, rng);
    }
    case NetModel::EH: {
        Workspace ws = build_eh(cfg, m_target, rng);
        return assemble_oriented(ws, cfg.n, cfg.directed, rng);
    }
    case NetModel::RT: {
        if (cfg.n < 3) infeasible("RT needs n >= 3");
        Workspace ws = build_cycles(cfg, 3, m_target, rng);
        return assemble_oriented(ws, cfg.n, cfg.directed, rng);
    }
    case NetModel::RH: {
        if (cfg.n < 6) infeasible("RH needs n >= 6");
        Workspace ws = build_cycles(cfg, 6, m_target, rng);
        return assemble_oriented(ws, cfg.n, cfg.directed, rng);
    }
    case NetModel::QS: {
        Workspace ws = build_qs(cfg, m_target, rng);
        return assemble_native(ws, cfg.n, cfg.directed);
    }
    case NetModel::SW_NW:
    case NetModel::SW_WS: {
        Workspace ws = build_sw(cfg, m_target, rng);
        return assemble_native(ws, cfg.n, cfg.directed);
    }
    }
    throw std::logic_error("unknown model enum");
}

double average_degree(const Graph& g) {
    double e = static_cast<double>(g.edge_count());
    double n = static_cast<double>(g.n_alive());
    return g.directed() ? e / n : 2.0 * e / n;
}

} // namespace robnet
