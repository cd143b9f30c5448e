#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robnet/graph.hpp"
#include "robnet/rng.hpp"

namespace robnet {

enum class AttackKind {
    MaxDegree,        // recompute degrees on the residual graph (adaptive)
    MaxDegreeInitial, // rank once by intact-graph degree
    Random,
};

enum class Measure { Connectivity, Controllability };

/// Which driver-node formula backs the controllability measure.
/// Auto resolves to MIT for directed graphs and ECT otherwise.
enum class RankTheorem { MIT, ECT, Auto };

std::string attack_tag(AttackKind k);
AttackKind parse_attack(const std::string& tag);
std::string measure_tag(Measure m);
Measure parse_measure(const std::string& tag);
std::string theorem_tag(RankTheorem t);
RankTheorem parse_theorem(const std::string& tag);

struct AttackStrategy {
    AttackKind kind = AttackKind::MaxDegree;
    std::uint64_t seed = 0;
};

/// Sequence r(0..N-1) of per-step functionality densities.
struct RobustnessCurve {
    Measure measure = Measure::Connectivity;
    std::size_t n = 0;          // original node count
    std::vector<double> values; // length n, each in (0,1]
};

/// Mean of the curve values, in (0,1].
double robustness_scalar(const RobustnessCurve& curve);
/// Plain sum of the curve values (no 1/N normalization).
double robustness_sum(const RobustnessCurve& curve);

/// Removal order for every node of g. Ties in the degree-based attacks
/// break uniformly at random from the strategy seed.
std::vector<NodeId> attack_sequence(const Graph& g, const AttackStrategy& strategy);

/// r(i) = |LCC| / (N - i) after removing the first i nodes of seq.
RobustnessCurve connectivity_curve(const Graph& g, const std::vector<NodeId>& seq);

/// Driver nodes via maximum matching (directed graphs only).
std::size_t driver_count_mit(const Graph& g);
/// Driver nodes via exact adjacency rank (directed or undirected).
std::size_t driver_count_ect(const Graph& g);

/// r(i) = N_D / (N - i) after removing the first i nodes of seq.
RobustnessCurve controllability_curve(const Graph& g, const std::vector<NodeId>& seq,
                                      RankTheorem theorem = RankTheorem::Auto);

/// Element-wise mean of `reps` curves from independent attack sequences.
RobustnessCurve ground_truth(const Graph& g, Measure measure, AttackKind attack, std::size_t reps,
                             Rng& rng, RankTheorem theorem = RankTheorem::Auto);

} // namespace robnet
