#include "robnet/robustness.hpp"

#include <algorithm>
#include <stdexcept>

#include "robnet/exact_rank.hpp"
#include "robnet/matching.hpp"

namespace robnet {

namespace {

void check_permutation(const Graph& g, const std::vector<NodeId>& seq) {
    if (seq.size() != g.n_alive())
        throw std::invalid_argument("attack sequence must cover every live node exactly once");
    std::vector<std::uint8_t> seen(g.n_initial(), 0);
    for (NodeId v : seq) {
        if (v >= g.n_initial() || !g.alive(v) || seen[v])
            throw std::invalid_argument("attack sequence is not a permutation of the live nodes");
        seen[v] = 1;
    }
}

// Rank of the adjacency over live nodes, writing into a reusable scratch
// buffer to keep the per-step simulation allocation-free.
std::size_t live_rank(const Graph& g, std::vector<std::uint64_t>& scratch,
                      std::vector<std::uint32_t>& index) {
    const std::size_t n = g.n_alive();
    index.assign(g.n_initial(), 0);
    std::uint32_t next = 0;
    for (NodeId v = 0; v < g.n_initial(); ++v)
        if (g.alive(v)) index[v] = next++;

    scratch.assign(n * n, 0);
    for (NodeId v = 0; v < g.n_initial(); ++v) {
        if (!g.alive(v)) continue;
        for (NodeId w : g.neighbors_out(v)) {
            scratch[index[v] * n + index[w]] = 1;
            if (!g.directed()) scratch[index[w] * n + index[v]] = 1;
        }
    }
    return gf_rank_inplace(n, n, scratch);
}

} // namespace

std::string attack_tag(AttackKind k) {
    switch (k) {
    case AttackKind::MaxDegree: return "degree";
    case AttackKind::MaxDegreeInitial: return "degree-initial";
    case AttackKind::Random: return "random";
    }
    throw std::logic_error("unknown attack kind");
}

AttackKind parse_attack(const std::string& tag) {
    if (tag == "degree") return AttackKind::MaxDegree;
    if (tag == "degree-initial") return AttackKind::MaxDegreeInitial;
    if (tag == "random") return AttackKind::Random;
    throw std::invalid_argument("unknown attack kind: " + tag);
}

std::string measure_tag(Measure m) {
    return m == Measure::Connectivity ? "connectivity" : "controllability";
}

Measure parse_measure(const std::string& tag) {
    if (tag == "connectivity") return Measure::Connectivity;
    if (tag == "controllability") return Measure::Controllability;
    throw std::invalid_argument("unknown measure: " + tag);
}

std::string theorem_tag(RankTheorem t) {
    switch (t) {
    case RankTheorem::MIT: return "mit";
    case RankTheorem::ECT: return "ect";
    case RankTheorem::Auto: return "auto";
    }
    throw std::logic_error("unknown theorem");
}

RankTheorem parse_theorem(const std::string& tag) {
    if (tag == "mit") return RankTheorem::MIT;
    if (tag == "ect") return RankTheorem::ECT;
    if (tag == "auto") return RankTheorem::Auto;
    throw std::invalid_argument("unknown theorem: " + tag);
}

double robustness_scalar(const RobustnessCurve& curve) {
    return robustness_sum(curve) / static_cast<double>(curve.values.size());
}

double robustness_sum(const RobustnessCurve& curve) {
    if (curve.values.empty()) throw std::invalid_argument("empty robustness curve");
    double acc = 0.0;
    for (double v : curve.values) acc += v;
    return acc;
}

std::vector<NodeId> attack_sequence(const Graph& g, const AttackStrategy& strategy) {
    if (g.n_alive() == 0) throw std::invalid_argument("attack_sequence on empty graph");
    Rng rng(strategy.seed);
    std::vector<NodeId> live = g.live_nodes();

    switch (strategy.kind) {
    case AttackKind::Random: {
        rng.shuffle(live);
        return live;
    }
    case AttackKind::MaxDegreeInitial: {
        rng.shuffle(live); // randomizes tie order under the stable sort
        std::stable_sort(live.begin(), live.end(), [&](NodeId a, NodeId b) {
            return g.total_degree(a) > g.total_degree(b);
        });
        return live;
    }
    case AttackKind::MaxDegree: {
        Graph work = g;
        std::vector<NodeId> seq;
        seq.reserve(live.size());
        std::vector<NodeId> ties;
        while (work.n_alive() > 0) {
            std::size_t best = 0;
            ties.clear();
            for (NodeId v = 0; v < work.n_initial(); ++v) {
                if (!work.alive(v)) continue;
                std::size_t d = work.total_degree(v);
                if (d > best) {
                    best = d;
                    ties.clear();
                }
                if (d == best) ties.push_back(v);
            }
            NodeId pick = ties[rng.below(ties.size())];
            seq.push_back(pick);
            work.remove_node(pick);
        }
        return seq;
    }
    }
    throw std::logic_error("unknown attack kind");
}

RobustnessCurve connectivity_curve(const Graph& g, const std::vector<NodeId>& seq) {
    check_permutation(g, seq);
    const std::size_t n = g.n_alive();
    Graph work = g;
    RobustnessCurve curve;
    curve.measure = Measure::Connectivity;
    curve.n = n;
    curve.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double remaining = static_cast<double>(n - i);
        curve.values.push_back(static_cast<double>(work.largest_component_size()) / remaining);
        if (i + 1 < n) work.remove_node(seq[i]);
    }
    return curve;
}

std::size_t driver_count_mit(const Graph& g) {
    if (g.n_alive() == 0) throw std::invalid_argument("driver count on empty graph");
    BipartiteMatcher matcher(g);
    return std::max<std::size_t>(1, g.n_alive() - matcher.size());
}

std::size_t driver_count_ect(const Graph& g) {
    if (g.n_alive() == 0) throw std::invalid_argument("driver count on empty graph");
    std::vector<std::uint64_t> scratch;
    std::vector<std::uint32_t> index;
    return std::max<std::size_t>(1, g.n_alive() - live_rank(g, scratch, index));
}

RobustnessCurve controllability_curve(const Graph& g, const std::vector<NodeId>& seq,
                                      RankTheorem theorem) {
    check_permutation(g, seq);
    if (theorem == RankTheorem::Auto)
        theorem = g.directed() ? RankTheorem::MIT : RankTheorem::ECT;
    if (theorem == RankTheorem::MIT && !g.directed())
        throw std::invalid_argument("the matching-based driver count requires a directed graph");

    const std::size_t n = g.n_alive();
    Graph work = g;
    RobustnessCurve curve;
    curve.measure = Measure::Controllability;
    curve.n = n;
    curve.values.reserve(n);

    if (theorem == RankTheorem::MIT) {
        BipartiteMatcher matcher(work);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t nd = std::max<std::size_t>(1, work.n_alive() - matcher.size());
            curve.values.push_back(static_cast<double>(nd) / static_cast<double>(n - i));
            if (i + 1 < n) {
                work.remove_node(seq[i]);
                matcher.on_node_removed(work, seq[i]);
            }
        }
    } else {
        std::vector<std::uint64_t> scratch;
        std::vector<std::uint32_t> index;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t nd = std::max<std::size_t>(1, work.n_alive() - live_rank(work, scratch, index));
            curve.values.push_back(static_cast<double>(nd) / static_cast<double>(n - i));
            if (i + 1 < n) work.remove_node(seq[i]);
        }
    }
    return curve;
}

RobustnessCurve ground_truth(const Graph& g, Measure measure, AttackKind attack, std::size_t reps,
                             Rng& rng, RankTheorem theorem) {
    if (reps < 1) throw std::invalid_argument("ground_truth needs at least one repetition");
    const std::size_t n = g.n_alive();
    std::vector<double> acc(n, 0.0);
    RobustnessCurve curve;
    for (std::size_t t = 0; t < reps; ++t) {
        AttackStrategy strategy{attack, rng.next()};
        std::vector<NodeId> seq = attack_sequence(g, strategy);
        curve = measure == Measure::Connectivity ? connectivity_curve(g, seq)
                                                 : controllability_curve(g, seq, theorem);
        for (std::size_t i = 0; i < n; ++i) acc[i] += curve.values[i];
    }
    for (std::size_t i = 0; i < n; ++i) curve.values[i] = acc[i] / static_cast<double>(reps);
    return curve;
}

} // namespace robnet
