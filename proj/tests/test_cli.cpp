// End-to-end exercises of the command-line surface via the built binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "robnet/io.hpp"

namespace fs = std::filesystem;
using namespace robnet;

namespace {

const std::string cli = ROBNET_CLI_PATH;

int run(const std::string& args, const std::string& log = "/tmp/robnet_cli_log.txt") {
    std::string cmd = cli + " " + args + " >" + log + " 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run("definitely-not-a-subcommand") == 2);
    CHECK(run("simulate --no-such-flag") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("domain errors exit with 1") {
    CHECK(run("simulate /nonexistent/file.edges") == 1);
    std::string log = slurp("/tmp/robnet_cli_log.txt");
    CHECK(log.find("error:") != std::string::npos);
}

TEST_CASE("simulate emits the K3 curve") {
    TempDir dir("robnet_cli_sim");
    std::string edges = (dir.path / "k3.edges").string();
    std::ofstream(edges) << "# robnet v1 directed=0 n=3\n0 1\n0 2\n1 2\n";
    std::string log = (dir.path / "out.txt").string();
    CHECK(run("simulate " + edges + " --measure connectivity --attack degree --seed 7", log) == 0);
    std::string out = slurp(log);
    CHECK(out.find("0,1\n") != std::string::npos);
    CHECK(out.find("1,1\n") != std::string::npos);
    CHECK(out.find("2,1\n") != std::string::npos);
}

TEST_CASE("gen, predict, eval, bench, plot pipeline") {
    TempDir dir("robnet_cli_pipe");
    std::string ds = (dir.path / "ds").string();
    std::string log = (dir.path / "log.txt").string();

    CHECK(run("gen --out " + ds +
                  " --models er,ba --count 4 --min-n 24 --max-n 32 --measure connectivity"
                  " --attack degree --reps 2 --seed 5",
              log) == 0);
    CHECK(fs::exists(fs::path(ds) / "manifest.json"));

    // tiny training run just to exercise the command path
    std::string ckpt = (dir.path / "m.sppc").string();
    CHECK(run("train --manifest " + ds + " --out " + ckpt +
                  " --config reduced --output-len 32 --epochs 2 --accumulate 2 --seed 3"
                  " --val-fraction 0.25",
              log) == 0);
    CHECK(fs::exists(ckpt));

    std::string preds = (dir.path / "preds").string();
    CHECK(run("predict --checkpoint " + ckpt + " --manifest " + ds + " --out " + preds, log) == 0);

    std::string report = (dir.path / "eval.csv").string();
    CHECK(run("eval --a " + preds + " --b " + preds + " --out " + report, log) == 0);
    std::string out = slurp(log);
    CHECK(out.find("sign(a vs b)=~") != std::string::npos); // identical sets tie

    // the per-instance report written by predict is also a valid eval input
    std::string report2 = (dir.path / "eval2.csv").string();
    CHECK(run("eval --a " + (fs::path(preds) / "report.csv").string() + " --out " + report2,
              log) == 0);
    CHECK(slurp(report2).find("method,id,model") != std::string::npos);
    CHECK(fs::exists(report2 + ".summary.csv"));

    std::string bench = (dir.path / "bench.csv").string();
    CHECK(run("bench --manifest " + ds + " --checkpoint " + ckpt + " --reps 1 --warmups 0 --out " +
                  bench,
              log) == 0);
    CHECK(slurp(bench).find("id,model,n,measure") != std::string::npos);

    // plot one of the prediction files
    std::string first_curve;
    for (const auto& e : fs::directory_iterator(preds)) {
        first_curve = e.path().string();
        break;
    }
    std::string svg = (dir.path / "c.svg").string();
    CHECK(run("plot --curve " + first_curve + " --out " + svg, log) == 0);
    CHECK(slurp(svg).find("<svg") != std::string::npos);
}

TEST_CASE("gen is deterministic for identical command lines") {
    TempDir dir("robnet_cli_det");
    std::string log = (dir.path / "log.txt").string();
    for (const char* sub : {"d1", "d2"}) {
        CHECK(run("gen --out " + (dir.path / sub).string() +
                      " --models er --count 2 --min-n 20 --max-n 25 --reps 1 --seed 77",
                  log) == 0);
    }
    CHECK(slurp((dir.path / "d1" / "manifest.json").string()) ==
          slurp((dir.path / "d2" / "manifest.json").string()));
}

TEST_CASE("ingest command") {
    TempDir dir("robnet_cli_ing");
    std::string raw = (dir.path / "raw.txt").string();
    std::ofstream(raw) << "a b\nb c\nc a\nx y\n";
    std::string out = (dir.path / "g.edges").string();
    std::string log = (dir.path / "log.txt").string();
    CHECK(run("ingest --in " + raw + " --out " + out + " --largest-component", log) == 0);
    Graph g = parse_edge_list(out);
    CHECK(g.n_initial() == 3);
    CHECK(g.edge_count() == 3);
}
