#include "robnet/io.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "gemm.hpp" // worker_count
#include "json.hpp"

namespace fs = std::filesystem;

namespace robnet {

namespace {

std::string fmt_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

// --- edge lists -------------------------------------------------------------

std::string edge_list_text(const Graph& g) {
    std::ostringstream out;
    out << "# robnet v1 directed=" << (g.directed() ? 1 : 0) << " n=" << g.n_initial() << "\n";
    for (NodeId u = 0; u < g.n_initial(); ++u) {
        if (!g.alive(u)) continue;
        for (NodeId v : g.neighbors_out(u)) {
            if (!g.directed() && v < u) continue;
            out << u << " " << v << "\n";
        }
    }
    return out.str();
}

void write_edge_list(const std::string& path, const Graph& g) {
    write_file(path, edge_list_text(g));
}

namespace {

Graph parse_edge_list_impl(const std::string& text, const std::string& path, DupPolicy policy,
                           std::vector<std::string>* warnings) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) parse_fail(path, 1, "empty file, expected header");

    unsigned directed_flag = 2;
    unsigned long long n = 0;
    if (std::sscanf(line.c_str(), "# robnet v1 directed=%u n=%llu", &directed_flag, &n) != 2 ||
        directed_flag > 1)
        parse_fail(path, 1, "malformed header, expected '# robnet v1 directed=<0|1> n=<N>'");
    if (n == 0) parse_fail(path, 1, "node count must be >= 1");

    Graph g(static_cast<std::size_t>(n), directed_flag == 1);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) parse_fail(path, lineno, "blank line");
        unsigned long long u = 0, v = 0;
        char trailing;
        int got = std::sscanf(line.c_str(), "%llu %llu %c", &u, &v, &trailing);
        if (got != 2) parse_fail(path, lineno, "expected '<u> <v>'");
        if (u >= n || v >= n)
            parse_fail(path, lineno, "node id " + std::to_string(std::max(u, v)) +
                                         " out of range [0, " + std::to_string(n) + ")");
        if (u == v) parse_fail(path, lineno, "self-loop on node " + std::to_string(u));
        bool fresh = g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
        if (!fresh) {
            if (policy == DupPolicy::Strict)
                parse_fail(path, lineno,
                           "duplicate edge " + std::to_string(u) + " " + std::to_string(v));
            if (warnings)
                warnings->push_back(path + ":" + std::to_string(lineno) + ": duplicate edge " +
                                    std::to_string(u) + " " + std::to_string(v) + " (dropped)");
        }
    }
    return g;
}

} // namespace

Graph parse_edge_list_text(const std::string& text, DupPolicy policy,
                           std::vector<std::string>* warnings) {
    return parse_edge_list_impl(text, "<string>", policy, warnings);
}

Graph parse_edge_list(const std::string& path, DupPolicy policy, std::vector<std::string>* warnings) {
    return parse_edge_list_impl(read_file(path), path, policy, warnings);
}

// --- curve CSV ----------------------------------------------------------------

std::string curve_csv_text(const std::vector<double>& r_true, const std::vector<double>* r_pred) {
    if (r_pred && r_pred->size() != r_true.size())
        throw std::invalid_argument("curve CSV needs equal-length true and predicted curves");
    std::ostringstream out;
    out << (r_pred ? "i,r_true,r_pred\n" : "i,r_true\n");
    for (std::size_t i = 0; i < r_true.size(); ++i) {
        out << i << "," << fmt_g9(r_true[i]);
        if (r_pred) out << "," << fmt_g9((*r_pred)[i]);
        out << "\n";
    }
    return out.str();
}

void write_curve_csv(const std::string& path, const std::vector<double>& r_true,
                     const std::vector<double>* r_pred) {
    write_file(path, curve_csv_text(r_true, r_pred));
}

CurveCsv parse_curve_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) parse_fail(path, 1, "empty curve file");
    bool has_pred;
    if (line == "i,r_true")
        has_pred = false;
    else if (line == "i,r_true,r_pred")
        has_pred = true;
    else
        parse_fail(path, 1, "malformed header, expected 'i,r_true[,r_pred]'");

    CurveCsv csv;
    if (has_pred) csv.r_pred.emplace();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) parse_fail(path, lineno, "blank line");
        unsigned long long idx;
        double t, p = 0.0;
        int got = has_pred ? std::sscanf(line.c_str(), "%llu,%lf,%lf", &idx, &t, &p)
                           : std::sscanf(line.c_str(), "%llu,%lf", &idx, &t);
        if (got != (has_pred ? 3 : 2)) parse_fail(path, lineno, "malformed row");
        if (idx != csv.r_true.size()) parse_fail(path, lineno, "row index out of order");
        csv.r_true.push_back(t);
        if (has_pred) csv.r_pred->push_back(p);
    }
    if (csv.r_true.empty()) parse_fail(path, lineno, "curve has no rows");
    return csv;
}

// --- recipes and manifests ------------------------------------------------------

std::string recipe_to_json(const DatasetRecipe& recipe) {
    nlohmann::json j;
    j["models"] = nlohmann::json::array();
    for (NetModel m : recipe.models) j["models"].push_back(model_tag(m));
    j["directed"] = recipe.directed;
    j["size_range"] = {recipe.sizes.lo, recipe.sizes.hi};
    j["count"] = recipe.count;
    j["measure"] = measure_tag(recipe.measure);
    j["attack"] = attack_tag(recipe.attack);
    j["theorem"] = theorem_tag(recipe.theorem);
    j["reps"] = recipe.reps;
    j["seed"] = recipe.seed;
    return j.dump();
}

DatasetRecipe recipe_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DatasetRecipe r;
    if (j.contains("set")) {
        r.models = model_set(j.at("set").get<std::string>());
    } else {
        for (const auto& tag : j.at("models")) r.models.push_back(parse_model(tag.get<std::string>()));
    }
    r.directed = j.at("directed").get<bool>();
    r.sizes.lo = j.at("size_range").at(0).get<std::size_t>();
    r.sizes.hi = j.at("size_range").at(1).get<std::size_t>();
    r.count = j.at("count").get<std::size_t>();
    r.measure = parse_measure(j.at("measure").get<std::string>());
    r.attack = parse_attack(j.at("attack").get<std::string>());
    r.theorem = j.contains("theorem") ? parse_theorem(j.at("theorem").get<std::string>())
                                      : RankTheorem::Auto;
    r.reps = j.at("reps").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (r.models.empty()) throw std::invalid_argument("recipe has no models");
    if (r.count == 0) throw std::invalid_argument("recipe count must be >= 1");
    return r;
}

std::string recipe_fingerprint(const DatasetRecipe& recipe) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(recipe_to_json(recipe))));
    return buf;
}

namespace {

nlohmann::json entry_to_json(const ManifestEntry& e) {
    nlohmann::json j;
    j["id"] = e.id;
    j["model"] = model_tag(e.model);
    j["directed"] = e.directed;
    j["n"] = e.n;
    j["k_avg"] = e.k_avg;
    j["seed"] = e.seed;
    j["measure"] = measure_tag(e.measure);
    j["attack"] = attack_tag(e.attack);
    j["reps"] = e.reps;
    j["edge_file"] = e.edge_file;
    j["curve_file"] = e.curve_file;
    return j;
}

ManifestEntry entry_from_json(const nlohmann::json& j) {
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    e.model = parse_model(j.at("model").get<std::string>());
    e.directed = j.at("directed").get<bool>();
    e.n = j.at("n").get<std::size_t>();
    e.k_avg = j.at("k_avg").get<double>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.measure = parse_measure(j.at("measure").get<std::string>());
    e.attack = parse_attack(j.at("attack").get<std::string>());
    e.reps = j.at("reps").get<std::size_t>();
    e.edge_file = j.at("edge_file").get<std::string>();
    e.curve_file = j.at("curve_file").get<std::string>();
    return e;
}

} // namespace

void save_manifest(const DatasetManifest& manifest) {
    nlohmann::json j;
    j["format_version"] = manifest.format_version;
    j["fingerprint"] = manifest.fingerprint;
    j["recipe"] = nlohmann::json::parse(recipe_to_json(manifest.recipe));
    j["entries"] = nlohmann::json::array();
    for (const auto& e : manifest.entries) j["entries"].push_back(entry_to_json(e));
    write_file((fs::path(manifest.dir) / "manifest.json").string(), j.dump(2) + "\n");
}

DatasetManifest load_manifest(const std::string& dir) {
    const std::string path = (fs::path(dir) / "manifest.json").string();
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    DatasetManifest m;
    m.dir = dir;
    m.format_version = j.at("format_version").get<std::uint32_t>();
    if (m.format_version != 1)
        throw std::runtime_error(path + ": unsupported manifest format version " +
                                 std::to_string(m.format_version));
    m.fingerprint = j.at("fingerprint").get<std::string>();
    m.recipe = recipe_from_json(j.at("recipe").dump());
    std::unordered_set<std::string> ids;
    for (const auto& je : j.at("entries")) {
        ManifestEntry e = entry_from_json(je);
        if (!ids.insert(e.id).second)
            throw std::runtime_error(path + ": duplicate instance id " + e.id);
        for (const std::string& rel : {e.edge_file, e.curve_file})
            if (!fs::exists(fs::path(dir) / rel))
                throw std::runtime_error(path + ": referenced file missing: " + rel);
        m.entries.push_back(std::move(e));
    }
    return m;
}

Graph load_entry_graph(const DatasetManifest& manifest, const ManifestEntry& entry) {
    return parse_edge_list((fs::path(manifest.dir) / entry.edge_file).string());
}

std::vector<double> load_entry_curve(const DatasetManifest& manifest, const ManifestEntry& entry) {
    return parse_curve_csv((fs::path(manifest.dir) / entry.curve_file).string()).r_true;
}

DatasetManifest build_dataset(const DatasetRecipe& recipe, const std::string& out_dir) {
    if (recipe.models.empty()) throw std::invalid_argument("recipe has no models");
    if (recipe.count == 0) throw std::invalid_argument("recipe count must be >= 1");
    fs::create_directories(fs::path(out_dir) / "instances");

    DatasetManifest manifest;
    manifest.dir = out_dir;
    manifest.fingerprint = recipe_fingerprint(recipe);
    manifest.recipe = recipe;
    manifest.entries.resize(recipe.count);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= recipe.count) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error.empty()) return;
            }
            NetModel model = recipe.models[i % recipe.models.size()];
            // entry.seed reproduces everything: substream 0 drives the
            // generator config, substream 1 the ground-truth attacks
            const std::uint64_t inst_seed = derive_seed(recipe.seed, i);
            GeneratorConfig cfg;
            try {
                Rng cfg_rng(derive_seed(inst_seed, 0));
                cfg = sample_config(model, recipe.directed, recipe.sizes, cfg_rng);
                Graph g = generate(cfg);
                Rng gt_rng(derive_seed(inst_seed, 1));
                RobustnessCurve truth =
                    ground_truth(g, recipe.measure, recipe.attack, recipe.reps, gt_rng, recipe.theorem);

                char idbuf[32];
                std::snprintf(idbuf, sizeof(idbuf), "%06zu-%s", i, lower(model_tag(model)).c_str());
                ManifestEntry e;
                e.id = idbuf;
                e.model = model;
                e.directed = recipe.directed;
                e.n = cfg.n;
                e.k_avg = cfg.k_avg;
                e.seed = inst_seed;
                e.measure = recipe.measure;
                e.attack = recipe.attack;
                e.reps = recipe.reps;
                e.edge_file = std::string("instances/") + idbuf + ".edges";
                e.curve_file = std::string("instances/") + idbuf + ".curve.csv";
                write_edge_list((fs::path(out_dir) / e.edge_file).string(), g);
                write_curve_csv((fs::path(out_dir) / e.curve_file).string(), truth.values);
                manifest.entries[i] = std::move(e);
            } catch (const std::exception& ex) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty())
                    first_error = "instance " + std::to_string(i) + " (model " + model_tag(model) +
                                  ", config seed " + std::to_string(cfg.seed) + "): " + ex.what();
                return;
            }
        }
    };

    const std::size_t workers = std::min(detail::worker_count(), recipe.count);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (!first_error.empty()) throw std::runtime_error(first_error);

    save_manifest(manifest);
    return manifest;
}

// --- ingestion --------------------------------------------------------------

Graph ingest_pairs(const std::string& path, bool directed, bool largest_component_only,
                   IngestStats* stats) {
    std::istringstream in(read_file(path));
    std::string line;
    std::unordered_map<std::string, NodeId> index;
    std::vector<std::pair<NodeId, NodeId>> pairs;
    IngestStats local;

    auto id_of = [&](const std::string& token) {
        auto [it, fresh] = index.emplace(token, static_cast<NodeId>(index.size()));
        (void)fresh;
        return it->second;
    };

    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        ++local.lines;
        if (line.empty() || line[0] == '#' || line[0] == '%') continue;
        std::istringstream row(line);
        std::string a, b;
        if (!(row >> a >> b)) parse_fail(path, lineno, "expected two whitespace-separated ids");
        NodeId u = id_of(a), v = id_of(b);
        if (u == v) {
            ++local.self_loops;
            continue;
        }
        pairs.emplace_back(u, v);
    }
    if (index.empty()) throw std::runtime_error(path + ": no edges found");
    local.nodes_before_filter = index.size();

    Graph g(index.size(), directed);
    for (auto [u, v] : pairs)
        if (!g.add_edge(u, v)) ++local.duplicate_edges;

    if (largest_component_only && g.largest_component_size() < g.n_alive()) {
        ComponentPartition part = g.components();
        std::size_t best = 0;
        for (std::size_t c = 0; c < part.sizes.size(); ++c)
            if (part.sizes[c] > part.sizes[best]) best = c;
        std::vector<NodeId> dense(g.n_initial(), 0);
        NodeId kept = 0;
        for (NodeId v = 0; v < g.n_initial(); ++v)
            if (part.component_id[v] == static_cast<std::int32_t>(best)) dense[v] = kept++;
        Graph filtered(kept, directed);
        for (NodeId u = 0; u < g.n_initial(); ++u) {
            if (part.component_id[u] != static_cast<std::int32_t>(best)) continue;
            for (NodeId v : g.neighbors_out(u)) {
                if (!directed && v < u) continue;
                filtered.add_edge(dense[u], dense[v]);
            }
        }
        g = std::move(filtered);
    }

    if (stats) *stats = local;
    return g;
}

// --- SVG plotting -------------------------------------------------------------

namespace {

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string polyline(const std::vector<double>& values, double x0, double y0, double w, double h,
                     const char* style) {
    std::ostringstream out;
    out << "  <polyline fill=\"none\" " << style << " points=\"";
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
        const double x = x0 + t * w;
        const double y = y0 + (1.0 - std::clamp(values[i], 0.0, 1.0)) * h;
        if (i) out << " ";
        out << fmt_coord(x) << "," << fmt_coord(y);
    }
    out << "\"/>\n";
    return out.str();
}

} // namespace

std::string curve_svg(const std::vector<double>& r_true, const std::vector<double>* r_pred) {
    if (r_true.empty()) throw std::invalid_argument("cannot plot an empty curve");
    if (r_pred && r_pred->size() != r_true.size())
        throw std::invalid_argument("curves must have equal length");

    const double W = 640, H = 440, L = 60, T = 20, R = 20, B = 50;
    const double pw = W - L - R, ph = H - T - B;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "  <rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (int tick = 0; tick <= 5; ++tick) {
        const double f = tick / 5.0;
        const double x = L + f * pw;
        const double y = T + (1.0 - f) * ph;
        out << "  <line x1=\"" << fmt_coord(x) << "\" y1=\"" << T + ph << "\" x2=\"" << fmt_coord(x)
            << "\" y2=\"" << T + ph + 5 << "\" stroke=\"#333\"/>\n";
        out << "  <text x=\"" << fmt_coord(x) << "\" y=\"" << T + ph + 20
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_coord(f) << "</text>\n";
        out << "  <line x1=\"" << L - 5 << "\" y1=\"" << fmt_coord(y) << "\" x2=\"" << L
            << "\" y2=\"" << fmt_coord(y) << "\" stroke=\"#333\"/>\n";
        out << "  <text x=\"" << L - 10 << "\" y=\"" << fmt_coord(y + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_coord(f) << "</text>\n";
    }
    out << "  <text x=\"" << L + pw / 2 << "\" y=\"" << H - 12
        << "\" font-size=\"13\" text-anchor=\"middle\">removal fraction i/(N-1)</text>\n";
    out << "  <text x=\"16\" y=\"" << T + ph / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fmt_coord(T + ph / 2) << ")\">r(i)</text>\n";

    out << polyline(r_true, L, T, pw, ph, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");
    out << "  <line x1=\"" << L + pw - 150 << "\" y1=\"" << T + 14 << "\" x2=\"" << L + pw - 120
        << "\" y2=\"" << T + 14 << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    out << "  <text x=\"" << L + pw - 114 << "\" y=\"" << T + 18 << "\" font-size=\"12\">true</text>\n";
    if (r_pred) {
        out << polyline(*r_pred, L, T, pw, ph,
                        "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,3\"");
        out << "  <line x1=\"" << L + pw - 150 << "\" y1=\"" << T + 32 << "\" x2=\"" << L + pw - 120
            << "\" y2=\"" << T + 32
            << "\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,3\"/>\n";
        out << "  <text x=\"" << L + pw - 114 << "\" y=\"" << T + 36
            << "\" font-size=\"12\">predicted</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_curve_svg(const std::string& path, const std::vector<double>& r_true,
                     const std::vector<double>* r_pred) {
    write_file(path, curve_svg(r_true, r_pred));
}

} // namespace robnet
