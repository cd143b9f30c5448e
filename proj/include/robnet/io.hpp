#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robnet/graph.hpp"
#include "robnet/netgen.hpp"
#include "robnet/robustness.hpp"

namespace robnet {

// --- edge-list text format ------------------------------------------------
// line 1:  # robnet v1 directed=<0|1> n=<N>
// then one `<u> <v>` pair per line, 0-based decimal ids, LF endings.

enum class DupPolicy { Strict, WarnDedup };

std::string edge_list_text(const Graph& g);
void write_edge_list(const std::string& path, const Graph& g);

Graph parse_edge_list_text(const std::string& text, DupPolicy policy = DupPolicy::Strict,
                           std::vector<std::string>* warnings = nullptr);
Graph parse_edge_list(const std::string& path, DupPolicy policy = DupPolicy::Strict,
                      std::vector<std::string>* warnings = nullptr);

// --- curve CSV --------------------------------------------------------------
// header `i,r_true[,r_pred]`, one row per step, %.9g formatting.

struct CurveCsv {
    std::vector<double> r_true;
    std::optional<std::vector<double>> r_pred;
};

std::string curve_csv_text(const std::vector<double>& r_true, const std::vector<double>* r_pred);
void write_curve_csv(const std::string& path, const std::vector<double>& r_true,
                     const std::vector<double>* r_pred = nullptr);
CurveCsv parse_curve_csv(const std::string& path);

// --- dataset recipes and manifests -----------------------------------------

struct DatasetRecipe {
    std::vector<NetModel> models;
    bool directed = false;
    SizeRange sizes = kSizeRangeB;
    std::size_t count = 0;
    Measure measure = Measure::Connectivity;
    AttackKind attack = AttackKind::MaxDegree;
    RankTheorem theorem = RankTheorem::Auto;
    std::size_t reps = 10;
    std::uint64_t seed = 0;
};

std::string recipe_to_json(const DatasetRecipe& recipe);
DatasetRecipe recipe_from_json(const std::string& text);
/// FNV-1a hash of the canonical recipe JSON, as 16 hex digits.
std::string recipe_fingerprint(const DatasetRecipe& recipe);

struct ManifestEntry {
    std::string id;
    NetModel model = NetModel::ER;
    bool directed = false;
    std::size_t n = 0;
    double k_avg = 0.0;
    std::uint64_t seed = 0;
    Measure measure = Measure::Connectivity;
    AttackKind attack = AttackKind::MaxDegree;
    std::size_t reps = 1;
    std::string edge_file;  // relative to the manifest directory
    std::string curve_file; // relative to the manifest directory
};

struct DatasetManifest {
    std::uint32_t format_version = 1;
    std::string fingerprint;
    DatasetRecipe recipe;
    std::vector<ManifestEntry> entries;
    std::string dir; // directory the manifest was loaded from / built into
};

/// Generate, simulate, and persist `recipe.count` instances under
/// `out_dir` (edge lists and ground-truth curves in out_dir/instances,
/// manifest.json at the top). Instances are distributed round-robin over
/// the recipe's models and built in parallel; per-instance seeds derive
/// from (recipe seed, index), so the result is scheduling-independent.
DatasetManifest build_dataset(const DatasetRecipe& recipe, const std::string& out_dir);

void save_manifest(const DatasetManifest& manifest);
/// Loads manifest.json from `dir` and validates it (files exist, ids unique).
DatasetManifest load_manifest(const std::string& dir);

Graph load_entry_graph(const DatasetManifest& manifest, const ManifestEntry& entry);
std::vector<double> load_entry_curve(const DatasetManifest& manifest, const ManifestEntry& entry);

// --- real-world node-pair ingestion ----------------------------------------

struct IngestStats {
    std::size_t lines = 0;
    std::size_t duplicate_edges = 0;
    std::size_t self_loops = 0;
    std::size_t nodes_before_filter = 0;
};

/// Whitespace-separated id pairs with arbitrary string ids, re-indexed
/// densely in first-appearance order. Lines starting with '#' or '%' are
/// skipped. Optionally keeps only the largest weakly connected component.
Graph ingest_pairs(const std::string& path, bool directed, bool largest_component_only,
                   IngestStats* stats = nullptr);

// --- SVG curve plot ---------------------------------------------------------

/// Standalone SVG with the true curve and, when given, the predicted one;
/// x axis is i/(N-1) in [0,1], y axis fixed to [0,1].
std::string curve_svg(const std::vector<double>& r_true, const std::vector<double>* r_pred);
void write_curve_svg(const std::string& path, const std::vector<double>& r_true,
                     const std::vector<double>* r_pred = nullptr);

} // namespace robnet
