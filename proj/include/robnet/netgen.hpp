#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robnet/graph.hpp"
#include "robnet/rng.hpp"

namespace robnet {

enum class NetModel { BA, EH, ER, QS, RH, RT, SF, SW_NW, SW_WS };

std::string model_tag(NetModel m);
NetModel parse_model(const std::string& tag);

/// Named model sets used by dataset recipes.
std::vector<NetModel> model_set(const std::string& name); // "S1" | "S2" | "S3"

/// Per-model construction knobs. Anything left unset is derived from
/// k_avg or falls back to the documented default.
struct ModelParams {
    std::optional<int> ba_m;           // preferential-attachment edges per new node
    std::optional<double> sf_sigma;    // weight exponent, in [0,1)
    std::optional<double> sf_theta;    // weight offset (default 5)
    std::optional<double> qs_q;        // per-pair snapback probability
    std::optional<int> sw_k;           // lattice neighbors per side
    std::optional<double> ws_rewire_p; // rewiring probability (default 0.3)
};

struct GeneratorConfig {
    NetModel model = NetModel::ER;
    std::size_t n = 0;
    bool directed = false;
    double k_avg = 0.0;
    std::uint64_t seed = 0;
    ModelParams params;
};

struct SizeRange {
    std::size_t lo = 0;
    std::size_t hi = 0;
};

inline constexpr SizeRange kSizeRangeA{700, 1300};
inline constexpr SizeRange kSizeRangeB{300, 700};
inline constexpr SizeRange kSizeRangeC{1300, 1700};

/// Average-degree sampling range for a model. Directed graphs count
/// arcs per node; undirected ranges are doubled.
struct DegreeRange {
    double lo = 0.0;
    double hi = 0.0;
};
DegreeRange degree_range(NetModel model, bool directed);

/// Draw a config with n uniform in the size range and k_avg uniform in
/// the model's degree range.
GeneratorConfig sample_config(NetModel model, bool directed, SizeRange sizes, Rng& rng);

/// Build the network described by the config. Deterministic in the
/// config (including seed).
Graph generate(const GeneratorConfig& config);

/// Realized average degree: 2E/n undirected, arcs/n directed.
double average_degree(const Graph& g);

namespace detail {
/// The Erdos-Renyi G(n, M) edge skeleton, exposed so the homogenized
/// variant can be compared against its own starting point in tests.
std::vector<std::pair<NodeId, NodeId>> er_skeleton(std::size_t n, std::size_t m, Rng& rng);
} // namespace detail

} // namespace robnet
