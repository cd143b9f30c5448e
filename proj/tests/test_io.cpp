#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "robnet/io.hpp"
#include "robnet/model.hpp"

namespace fs = std::filesystem;
using namespace robnet;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Graph k3() {
    Graph g(3, false);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    return g;
}

} // namespace

TEST_CASE("edge list round trip") {
    Graph g = k3();
    Graph back = parse_edge_list_text(edge_list_text(g));
    CHECK(back.adjacency_matrix() == g.adjacency_matrix());
    CHECK_FALSE(back.directed());

    Graph chain(4, true);
    chain.add_edge(0, 1);
    chain.add_edge(1, 2);
    chain.add_edge(2, 3);
    Graph dback = parse_edge_list_text(edge_list_text(chain));
    CHECK(dback.directed());
    CHECK(dback.adjacency_matrix() == chain.adjacency_matrix());

    // canonical output: parse(write(g)) re-serializes byte-identically
    CHECK(edge_list_text(back) == edge_list_text(g));
}

TEST_CASE("edge list errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_edge_list_text("garbage\n"), doctest::Contains(":1:"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_edge_list_text("# robnet v1 directed=0 n=3\n0 7\n"),
                         doctest::Contains(":2:"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_edge_list_text("# robnet v1 directed=0 n=3\n1 1\n"),
                         doctest::Contains("self-loop"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_edge_list_text("# robnet v1 directed=0 n=3\n0 1\n0 1\n"),
                         doctest::Contains("duplicate"), std::runtime_error);

    std::vector<std::string> warnings;
    Graph g = parse_edge_list_text("# robnet v1 directed=0 n=3\n0 1\n0 1\n", DupPolicy::WarnDedup,
                                   &warnings);
    CHECK(g.edge_count() == 1);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("duplicate") != std::string::npos);
}

TEST_CASE("curve csv round trip") {
    std::vector<double> truth{1.0, 0.25, 1.0 / 3.0, 0.5, 1.0};
    std::vector<double> pred{0.9, 0.3, 0.35, 0.45, 1.0};
    TempDir dir("robnet_io_csv");
    std::string path = (dir.path / "c.csv").string();

    write_curve_csv(path, truth, &pred);
    CurveCsv back = parse_curve_csv(path);
    REQUIRE(back.r_pred.has_value());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        CHECK(back.r_true[i] == doctest::Approx(truth[i]).epsilon(1e-9));
        CHECK((*back.r_pred)[i] == doctest::Approx(pred[i]).epsilon(1e-9));
    }

    write_curve_csv(path, truth);
    CHECK_FALSE(parse_curve_csv(path).r_pred.has_value());

    std::ofstream(path) << "i,r_true\n1,0.5\n";
    CHECK_THROWS_WITH_AS(parse_curve_csv(path), doctest::Contains("out of order"),
                         std::runtime_error);
}

TEST_CASE("recipe json and fingerprint") {
    DatasetRecipe r;
    r.models = model_set("S2");
    r.directed = false;
    r.sizes = {50, 80};
    r.count = 8;
    r.measure = Measure::Connectivity;
    r.attack = AttackKind::MaxDegree;
    r.reps = 2;
    r.seed = 99;

    DatasetRecipe back = recipe_from_json(recipe_to_json(r));
    CHECK(back.models == r.models);
    CHECK(back.sizes.lo == r.sizes.lo);
    CHECK(recipe_fingerprint(back) == recipe_fingerprint(r));

    DatasetRecipe named = recipe_from_json(
        R"({"set":"S2","directed":false,"size_range":[50,80],"count":8,
            "measure":"connectivity","attack":"degree","reps":2,"seed":99})");
    CHECK(named.models == r.models);

    DatasetRecipe other = r;
    other.seed = 100;
    CHECK(recipe_fingerprint(other) != recipe_fingerprint(r));
}

TEST_CASE("build_dataset is deterministic and self-contained") {
    DatasetRecipe r;
    r.models = {NetModel::ER, NetModel::BA};
    r.directed = false;
    r.sizes = {30, 50};
    r.count = 6;
    r.measure = Measure::Connectivity;
    r.attack = AttackKind::MaxDegree;
    r.reps = 2;
    r.seed = 1234;

    TempDir d1("robnet_io_ds1"), d2("robnet_io_ds2");
    DatasetManifest m1 = build_dataset(r, d1.str());
    DatasetManifest m2 = build_dataset(r, d2.str());

    REQUIRE(m1.entries.size() == 6);
    CHECK(m1.fingerprint == recipe_fingerprint(r));
    CHECK(slurp(d1.path / "manifest.json") == slurp(d2.path / "manifest.json"));
    for (std::size_t i = 0; i < m1.entries.size(); ++i) {
        CHECK(slurp(d1.path / m1.entries[i].edge_file) == slurp(d2.path / m2.entries[i].edge_file));
        CHECK(slurp(d1.path / m1.entries[i].curve_file) ==
              slurp(d2.path / m2.entries[i].curve_file));
    }

    // round-robin model assignment and size range
    CHECK(m1.entries[0].model == NetModel::ER);
    CHECK(m1.entries[1].model == NetModel::BA);
    CHECK(m1.entries[2].model == NetModel::ER);
    for (const auto& e : m1.entries) {
        CHECK(e.n >= 30);
        CHECK(e.n <= 50);
    }

    // a fresh process can rebuild any curve from the stored edge list and seed
    DatasetManifest loaded = load_manifest(d1.str());
    for (const auto& e : loaded.entries) {
        Graph g = load_entry_graph(loaded, e);
        Rng gt_rng(derive_seed(e.seed, 1));
        RobustnessCurve again = ground_truth(g, e.measure, e.attack, e.reps, gt_rng);
        std::vector<double> stored = load_entry_curve(loaded, e);
        REQUIRE(again.values.size() == stored.size());
        for (std::size_t i = 0; i < stored.size(); ++i)
            CHECK(again.values[i] == doctest::Approx(stored[i]).epsilon(1e-9));
    }

    // validation catches a missing file
    fs::remove(d1.path / m1.entries[0].curve_file);
    CHECK_THROWS_WITH_AS(load_manifest(d1.str()), doctest::Contains("missing"),
                         std::runtime_error);
}

TEST_CASE("ingest re-indexes arbitrary ids") {
    TempDir dir("robnet_io_ingest");
    std::string path = (dir.path / "pairs.txt").string();
    std::ofstream(path) << "# comment\n"
                        << "alice bob\n"
                        << "bob carol\n"
                        << "alice bob\n" // duplicate
                        << "dave dave\n" // self-loop
                        << "erin frank\n";
    IngestStats stats;
    Graph g = ingest_pairs(path, false, false, &stats);
    CHECK(g.n_initial() == 6);
    CHECK(g.edge_count() == 3);
    CHECK(stats.duplicate_edges == 1);
    CHECK(stats.self_loops == 1);

    Graph lcc = ingest_pairs(path, false, true);
    CHECK(lcc.n_initial() == 3); // alice-bob-carol
    CHECK(lcc.edge_count() == 2);
}

TEST_CASE("curve svg") {
    std::vector<double> flat{0.5, 0.5, 0.5};
    std::string svg = curve_svg(flat, nullptr);
    CHECK(svg == curve_svg(flat, nullptr)); // deterministic bytes
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);

    // a constant curve renders as one horizontal polyline
    auto pos = svg.find("points=\"");
    REQUIRE(pos != std::string::npos);
    auto end = svg.find('"', pos + 8);
    std::istringstream pts(svg.substr(pos + 8, end - pos - 8));
    std::string pair;
    std::vector<double> ys;
    while (pts >> pair) ys.push_back(std::stod(pair.substr(pair.find(',') + 1)));
    REQUIRE(ys.size() == 3);
    CHECK(ys[0] == ys[1]);
    CHECK(ys[1] == ys[2]);

    std::vector<double> pred{0.4, 0.6, 0.5};
    std::string both = curve_svg(flat, &pred);
    CHECK(both.find("predicted") != std::string::npos);
    CHECK_THROWS_AS(curve_svg({}, nullptr), std::invalid_argument);
}
