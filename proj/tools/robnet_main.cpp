// robnet command-line tool: generate datasets, simulate robustness curves,
// train/evaluate the curve predictor, and benchmark prediction against
// simulation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

#include "CLI11.hpp"

#include "robnet/checkpoint.hpp"
#include "robnet/io.hpp"
#include "robnet/model.hpp"
#include "robnet/netgen.hpp"
#include "robnet/robustness.hpp"
#include "robnet/stats.hpp"

namespace fs = std::filesystem;
using namespace robnet;

namespace {

struct GenArgs {
    std::string out;
    std::string set;
    std::vector<std::string> models;
    std::string recipe_file;
    bool directed = false;
    std::string range = "b";
    std::size_t min_n = 0, max_n = 0;
    std::size_t count = 10;
    std::string measure = "connectivity";
    std::string attack = "degree";
    std::string theorem = "auto";
    std::size_t reps = 10;
    std::uint64_t seed = 1;
};

SizeRange named_range(const std::string& r) {
    if (r == "a") return kSizeRangeA;
    if (r == "b") return kSizeRangeB;
    if (r == "c") return kSizeRangeC;
    throw std::invalid_argument("unknown size range '" + r + "' (expected a, b, or c)");
}

DatasetRecipe recipe_from_args(const GenArgs& a) {
    if (!a.recipe_file.empty()) {
        std::ifstream in(a.recipe_file);
        if (!in) throw std::runtime_error("cannot open recipe file: " + a.recipe_file);
        std::ostringstream ss;
        ss << in.rdbuf();
        return recipe_from_json(ss.str());
    }
    DatasetRecipe r;
    if (!a.set.empty())
        r.models = model_set(a.set);
    else if (!a.models.empty())
        for (const auto& tag : a.models) r.models.push_back(parse_model(tag));
    else
        r.models = model_set("S1");
    r.directed = a.directed;
    r.sizes = a.min_n > 0 && a.max_n > 0 ? SizeRange{a.min_n, a.max_n} : named_range(a.range);
    r.count = a.count;
    r.measure = parse_measure(a.measure);
    r.attack = parse_attack(a.attack);
    r.theorem = parse_theorem(a.theorem);
    r.reps = a.reps;
    r.seed = a.seed;
    return r;
}

ModelConfig config_by_name(const std::string& name, std::size_t output_len) {
    ModelConfig cfg;
    if (name == "standard")
        cfg = ModelConfig::standard();
    else if (name == "reduced")
        cfg = ModelConfig::reduced();
    else
        throw std::invalid_argument("unknown model config '" + name + "' (standard or reduced)");
    if (output_len > 0) cfg.output_len = output_len;
    return cfg;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// stable per-path stream id so multi-file simulate runs stay reproducible
std::uint64_t fnv_hash_path(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

int cmd_gen(const GenArgs& args) {
    DatasetRecipe recipe = recipe_from_args(args);
    DatasetManifest manifest = build_dataset(recipe, args.out);
    std::printf("wrote %zu instances to %s (fingerprint %s)\n", manifest.entries.size(),
                args.out.c_str(), manifest.fingerprint.c_str());
    return 0;
}

struct SimulateArgs {
    std::vector<std::string> inputs;
    std::string measure = "connectivity";
    std::string attack = "degree";
    std::string theorem = "auto";
    std::size_t reps = 1;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_simulate(const SimulateArgs& args) {
    Measure measure = parse_measure(args.measure);
    AttackKind attack = parse_attack(args.attack);
    RankTheorem theorem = parse_theorem(args.theorem);
    if (!args.out.empty()) fs::create_directories(args.out);
    for (const std::string& path : args.inputs) {
        Graph g = parse_edge_list(path);
        Rng rng(derive_seed(args.seed, fnv_hash_path(path)));
        RobustnessCurve curve = ground_truth(g, measure, attack, args.reps, rng, theorem);
        std::string text = curve_csv_text(curve.values, nullptr);
        if (args.out.empty()) {
            std::printf("# %s (scalar %.9g)\n%s", path.c_str(), robustness_scalar(curve),
                        text.c_str());
        } else {
            std::string dst = (fs::path(args.out) / (stem_of(path) + ".curve.csv")).string();
            std::ofstream(dst, std::ios::binary) << text;
            std::printf("%s -> %s (scalar %.9g)\n", path.c_str(), dst.c_str(),
                        robustness_scalar(curve));
        }
    }
    return 0;
}

struct TrainArgs {
    std::string manifest_dir;
    std::string out = "model.sppc";
    std::string config = "reduced";
    std::size_t output_len = 0;
    std::size_t epochs = 100;
    double lr = 1e-4;
    std::size_t accumulate = 8;
    std::uint64_t seed = 1;
    double val_fraction = 0.1;
    std::size_t patience = 0;
};

int cmd_train(const TrainArgs& args) {
    DatasetManifest manifest = load_manifest(args.manifest_dir);
    ModelConfig cfg = config_by_name(args.config, args.output_len);

    Rng init_rng(derive_seed(args.seed, 0x6d6f64656cull));
    SppCnn model(cfg, init_rng);
    std::printf("config %s: %zu parameters, min input %zu\n", args.config.c_str(),
                model.parameter_count(), model.min_input_size());

    std::vector<CurveSample> samples;
    samples.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries) {
        Graph g = load_entry_graph(manifest, entry);
        if (g.n_alive() < model.min_input_size())
            throw std::runtime_error("instance " + entry.id + " (n=" + std::to_string(g.n_alive()) +
                                     ") is below the model's minimum input size " +
                                     std::to_string(model.min_input_size()));
        RobustnessCurve truth;
        truth.n = g.n_alive();
        truth.values = load_entry_curve(manifest, entry);
        samples.push_back(make_sample(g, truth, cfg.output_len));
    }

    // deterministic tail split for validation
    std::size_t val_count = static_cast<std::size_t>(static_cast<double>(samples.size()) *
                                                     args.val_fraction);
    if (val_count >= samples.size()) val_count = samples.size() - 1;
    std::vector<CurveSample> train_set(samples.begin(), samples.end() - static_cast<std::ptrdiff_t>(val_count));
    std::vector<CurveSample> val_set(samples.end() - static_cast<std::ptrdiff_t>(val_count), samples.end());

    TrainConfig tc;
    tc.adam.lr = static_cast<float>(args.lr);
    tc.epochs = args.epochs;
    tc.accumulate = args.accumulate;
    tc.seed = args.seed;
    tc.patience = args.patience;

    TrainResult result = train(model, train_set, val_set, tc);
    for (const auto& s : result.history)
        if (s.epoch == 1 || s.epoch % 10 == 0 || s.epoch == result.history.size())
            std::printf("epoch %zu: train mse %.6g, train xi %.6g, val xi %.6g\n", s.epoch,
                        s.train_mse, s.train_xi, s.val_xi);

    TrainMeta meta;
    meta.epochs_run = result.history.size();
    meta.final_train_mse = result.history.empty() ? 0.0 : result.history.back().train_mse;
    meta.final_val_xi = result.best_val_xi;
    meta.dataset_fingerprint = manifest.fingerprint;
    save_checkpoint(args.out, model, meta);
    std::printf("saved checkpoint %s (best epoch %zu, xi %.6g)\n", args.out.c_str(),
                result.best_epoch, result.best_val_xi);
    return 0;
}

struct PredictArgs {
    std::string checkpoint;
    std::vector<std::string> inputs;
    std::string manifest_dir;
    std::string out = "predictions";
    std::string measure = "connectivity";
};

int cmd_predict(const PredictArgs& args) {
    SppCnn model = load_checkpoint(args.checkpoint);
    fs::create_directories(args.out);

    if (!args.manifest_dir.empty()) {
        DatasetManifest manifest = load_manifest(args.manifest_dir);
        std::ofstream report(fs::path(args.out) / "report.csv", std::ios::binary);
        if (!report) throw std::runtime_error("cannot write report.csv in " + args.out);
        report << "id,model,directed,n,measure,xi,predict_s\n";
        double xi_sum = 0.0;
        for (const auto& entry : manifest.entries) {
            Graph g = load_entry_graph(manifest, entry);
            std::vector<double> truth = load_entry_curve(manifest, entry);
            BenchResult timing = bench_runtime(
                [&] { predict_curve(model, g, entry.measure); }, 0, 1);
            RobustnessCurve pred = predict_curve(model, g, entry.measure);
            write_curve_csv((fs::path(args.out) / (entry.id + ".curve.csv")).string(), truth,
                            &pred.values);
            double xi = prediction_error(truth, pred.values);
            xi_sum += xi;
            char row[160];
            std::snprintf(row, sizeof(row), "%s,%s,%d,%zu,%s,%.9g,%.9g\n", entry.id.c_str(),
                          model_tag(entry.model).c_str(), entry.directed ? 1 : 0, entry.n,
                          measure_tag(entry.measure).c_str(), xi, timing.median_s);
            report << row;
        }
        std::printf("predicted %zu instances, mean xi %.6g (report.csv written)\n",
                    manifest.entries.size(),
                    xi_sum / static_cast<double>(manifest.entries.size()));
        return 0;
    }

    Measure measure = parse_measure(args.measure);
    for (const std::string& path : args.inputs) {
        Graph g = parse_edge_list(path);
        RobustnessCurve pred = predict_curve(model, g, measure);
        std::string dst = (fs::path(args.out) / (stem_of(path) + ".pred.csv")).string();
        write_curve_csv(dst, pred.values, nullptr);
        std::printf("%s -> %s (scalar %.9g)\n", path.c_str(), dst.c_str(),
                    robustness_scalar(pred));
    }
    return 0;
}

struct EvalArgs {
    std::vector<std::string> a_files;
    std::vector<std::string> b_files;
    std::string out = "eval.csv";
    double alpha = 0.05;
};

struct EvalRow {
    std::string id = "-";
    std::string model = "-";
    int directed = 0;
    std::size_t n = 0;
    std::string measure = "-";
    double xi = 0.0;
    double runtime_s = 0.0;
};

// an input is either a predict-generated report.csv or a directory of
// curve CSVs with r_true,r_pred columns
std::vector<EvalRow> load_eval_rows(const std::vector<std::string>& inputs) {
    std::vector<EvalRow> rows;
    for (const std::string& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<std::string> files;
            for (const auto& e : fs::directory_iterator(in))
                if (e.path().extension() == ".csv" && e.path().filename() != "report.csv")
                    files.push_back(e.path().string());
            std::sort(files.begin(), files.end());
            for (const std::string& f : files) {
                CurveCsv csv = parse_curve_csv(f);
                if (!csv.r_pred)
                    throw std::runtime_error(f + ": no r_pred column; run `robnet predict` first");
                EvalRow row;
                row.id = fs::path(f).stem().string();
                row.n = csv.r_true.size();
                row.xi = prediction_error(csv.r_true, *csv.r_pred);
                rows.push_back(std::move(row));
            }
        } else {
            std::ifstream file(in);
            if (!file) throw std::runtime_error("cannot open " + in);
            std::string line;
            if (!std::getline(file, line) || line != "id,model,directed,n,measure,xi,predict_s")
                throw std::runtime_error(in + ": not a predict report (expected the report.csv header)");
            std::size_t lineno = 1;
            while (std::getline(file, line)) {
                ++lineno;
                EvalRow row;
                char id[64], model[16], measure[32];
                unsigned long long n;
                if (std::sscanf(line.c_str(), "%63[^,],%15[^,],%d,%llu,%31[^,],%lf,%lf", id, model,
                                &row.directed, &n, measure, &row.xi, &row.runtime_s) != 7)
                    throw std::runtime_error(in + ":" + std::to_string(lineno) + ": malformed row");
                row.id = id;
                row.model = model;
                row.measure = measure;
                row.n = static_cast<std::size_t>(n);
                rows.push_back(std::move(row));
            }
        }
    }
    if (rows.empty()) throw std::runtime_error("no prediction results found");
    return rows;
}

double mean_xi(const std::vector<EvalRow>& rows) {
    double acc = 0.0;
    for (const auto& r : rows) acc += r.xi;
    return acc / static_cast<double>(rows.size());
}

int cmd_eval(const EvalArgs& args) {
    std::vector<EvalRow> a = load_eval_rows(args.a_files);
    std::vector<EvalRow> b;
    if (!args.b_files.empty()) b = load_eval_rows(args.b_files);

    std::ofstream report(args.out, std::ios::binary);
    if (!report) throw std::runtime_error("cannot open report file: " + args.out);
    report << "method,id,model,directed,n,measure,xi,runtime_s\n";
    char buf[200];
    auto dump = [&](const char* method, const std::vector<EvalRow>& rows) {
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,%zu,%s,%.9g,%.9g\n", method,
                          r.id.c_str(), r.model.c_str(), r.directed, r.n, r.measure.c_str(), r.xi,
                          r.runtime_s);
            report << buf;
        }
    };
    dump("a", a);
    dump("b", b);

    // summary grouped by (model, measure, directedness, method)
    std::string summary_path = args.out + ".summary.csv";
    std::ofstream summary(summary_path, std::ios::binary);
    summary << "method,model,measure,directed,count,mean_xi\n";
    auto summarize = [&](const char* method, const std::vector<EvalRow>& rows) {
        std::map<std::tuple<std::string, std::string, int>, std::pair<std::size_t, double>> acc;
        for (const auto& r : rows) {
            auto& slot = acc[{r.model, r.measure, r.directed}];
            slot.first += 1;
            slot.second += r.xi;
        }
        for (const auto& [key, val] : acc) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,%zu,%.9g\n", method,
                          std::get<0>(key).c_str(), std::get<1>(key).c_str(), std::get<2>(key),
                          val.first, val.second / static_cast<double>(val.first));
            summary << buf;
        }
    };
    summarize("a", a);
    if (!b.empty()) summarize("b", b);

    std::printf("set a: %zu instances, mean xi %.6g\n", a.size(), mean_xi(a));
    if (!b.empty()) {
        std::vector<double> xi_a, xi_b;
        for (const auto& r : a) xi_a.push_back(r.xi);
        for (const auto& r : b) xi_b.push_back(r.xi);
        KruskalWallisResult kw = kruskal_wallis({xi_a, xi_b});
        SignificanceSign sign = significance_sign(xi_a, xi_b, args.alpha);
        std::printf("set b: %zu instances, mean xi %.6g\n", b.size(), mean_xi(b));
        std::printf("kruskal-wallis: H=%.6g p=%.6g sign(a vs b)=%s\n", kw.h, kw.p,
                    sign_str(sign).c_str());
    }
    std::printf("report written to %s (summary: %s)\n", args.out.c_str(), summary_path.c_str());
    return 0;
}

struct BenchArgs {
    std::string manifest_dir;
    std::string checkpoint;
    std::size_t reps = 3;
    std::size_t warmups = 1;
    std::string out = "bench.csv";
};

int cmd_bench(const BenchArgs& args) {
    DatasetManifest manifest = load_manifest(args.manifest_dir);
    SppCnn model = load_checkpoint(args.checkpoint);

    std::ofstream report(args.out, std::ios::binary);
    if (!report) throw std::runtime_error("cannot open report file: " + args.out);
    report << "id,model,n,measure,simulate_s,predict_s,ratio\n";

    std::vector<double> sim_medians, pred_medians;
    for (const auto& entry : manifest.entries) {
        Graph g = load_entry_graph(manifest, entry);
        BenchResult sim = bench_runtime(
            [&] {
                Rng rng(entry.seed);
                ground_truth(g, entry.measure, entry.attack, 1, rng, manifest.recipe.theorem);
            },
            args.warmups, args.reps);
        BenchResult pred = bench_runtime([&] { predict_curve(model, g, entry.measure); },
                                         args.warmups, args.reps);
        sim_medians.push_back(sim.median_s);
        pred_medians.push_back(pred.median_s);
        report << entry.id << "," << model_tag(entry.model) << "," << entry.n << ","
               << measure_tag(entry.measure) << "," << sim.median_s << "," << pred.median_s << ","
               << pred.median_s / sim.median_s << "\n";
    }
    std::sort(sim_medians.begin(), sim_medians.end());
    std::sort(pred_medians.begin(), pred_medians.end());
    double sim_med = sim_medians[sim_medians.size() / 2];
    double pred_med = pred_medians[pred_medians.size() / 2];
    std::printf("median simulate %.6g s, median predict %.6g s, ratio %.4g\n", sim_med, pred_med,
                pred_med / sim_med);
    std::printf("report written to %s\n", args.out.c_str());
    return 0;
}

struct PlotArgs {
    std::string curve;
    std::string out = "curve.svg";
};

int cmd_plot(const PlotArgs& args) {
    CurveCsv csv = parse_curve_csv(args.curve);
    write_curve_svg(args.out, csv.r_true, csv.r_pred ? &*csv.r_pred : nullptr);
    std::printf("wrote %s\n", args.out.c_str());
    return 0;
}

struct IngestArgs {
    std::string in;
    std::string out;
    bool directed = false;
    bool largest_component = false;
};

int cmd_ingest(const IngestArgs& args) {
    IngestStats stats;
    Graph g = ingest_pairs(args.in, args.directed, args.largest_component, &stats);
    write_edge_list(args.out, g);
    std::printf("%s: %zu nodes, %zu edges (dropped %zu duplicates, %zu self-loops)\n",
                args.out.c_str(), g.n_alive(), g.edge_count(), stats.duplicate_edges,
                stats.self_loops);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"network robustness simulation and prediction toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* cgen = app.add_subcommand("gen", "generate a dataset from a recipe");
    cgen->add_option("--out", gen.out, "output directory")->required();
    cgen->add_option("--set", gen.set, "named model set (S1, S2, S3)");
    cgen->add_option("--models", gen.models, "comma-separated model tags")->delimiter(',');
    cgen->add_option("--recipe", gen.recipe_file, "recipe JSON file (overrides other flags)");
    cgen->add_flag("--directed", gen.directed, "generate directed instances");
    cgen->add_option("--range", gen.range, "size range: a=[700,1300] b=[300,700] c=[1300,1700]");
    cgen->add_option("--min-n", gen.min_n, "custom minimum size");
    cgen->add_option("--max-n", gen.max_n, "custom maximum size");
    cgen->add_option("--count", gen.count, "number of instances");
    cgen->add_option("--measure", gen.measure, "connectivity or controllability");
    cgen->add_option("--attack", gen.attack, "degree, degree-initial, or random");
    cgen->add_option("--theorem", gen.theorem, "mit, ect, or auto");
    cgen->add_option("--reps", gen.reps, "ground-truth repetitions T");
    cgen->add_option("--seed", gen.seed, "recipe seed");

    SimulateArgs sim;
    auto* csim = app.add_subcommand("simulate", "robustness curves for edge-list files");
    csim->add_option("inputs", sim.inputs, "edge-list files")->required();
    csim->add_option("--measure", sim.measure, "connectivity or controllability");
    csim->add_option("--attack", sim.attack, "degree, degree-initial, or random");
    csim->add_option("--theorem", sim.theorem, "mit, ect, or auto");
    csim->add_option("--reps", sim.reps, "repetitions T");
    csim->add_option("--seed", sim.seed, "attack seed");
    csim->add_option("--out", sim.out, "output directory (default: stdout)");

    TrainArgs tr;
    auto* ctrain = app.add_subcommand("train", "train a predictor from a dataset manifest");
    ctrain->add_option("--manifest", tr.manifest_dir, "dataset directory")->required();
    ctrain->add_option("--out", tr.out, "checkpoint path");
    ctrain->add_option("--config", tr.config, "standard or reduced");
    ctrain->add_option("--output-len", tr.output_len, "override curve embedding length");
    ctrain->add_option("--epochs", tr.epochs, "training epochs");
    ctrain->add_option("--lr", tr.lr, "learning rate");
    ctrain->add_option("--accumulate", tr.accumulate, "samples per optimizer step");
    ctrain->add_option("--seed", tr.seed, "training seed");
    ctrain->add_option("--val-fraction", tr.val_fraction, "tail fraction held out for validation");
    ctrain->add_option("--patience", tr.patience, "early-stop patience (0 = off)");

    PredictArgs pr;
    auto* cpred = app.add_subcommand("predict", "predict curves with a checkpoint");
    cpred->add_option("--checkpoint", pr.checkpoint, "checkpoint path")->required();
    cpred->add_option("inputs", pr.inputs, "edge-list files");
    cpred->add_option("--manifest", pr.manifest_dir,
                      "predict a whole dataset (writes r_true,r_pred files)");
    cpred->add_option("--out", pr.out, "output directory");
    cpred->add_option("--measure", pr.measure, "measure tag for plain edge-list inputs");

    EvalArgs ev;
    auto* ceval = app.add_subcommand("eval", "prediction errors and significance comparison");
    ceval->add_option("--a", ev.a_files, "curve CSVs (or directories) for method A")->required();
    ceval->add_option("--b", ev.b_files, "curve CSVs (or directories) for method B");
    ceval->add_option("--out", ev.out, "report CSV path");
    ceval->add_option("--alpha", ev.alpha, "significance level");

    BenchArgs be;
    auto* cbench = app.add_subcommand("bench", "time predict vs simulate over a dataset");
    cbench->add_option("--manifest", be.manifest_dir, "dataset directory")->required();
    cbench->add_option("--checkpoint", be.checkpoint, "checkpoint path")->required();
    cbench->add_option("--reps", be.reps, "timing repetitions per instance");
    cbench->add_option("--warmups", be.warmups, "warmup runs per instance");
    cbench->add_option("--out", be.out, "report CSV path");

    PlotArgs pl;
    auto* cplot = app.add_subcommand("plot", "render a curve CSV to SVG");
    cplot->add_option("--curve", pl.curve, "curve CSV path")->required();
    cplot->add_option("--out", pl.out, "SVG output path");

    IngestArgs ing;
    auto* cing = app.add_subcommand("ingest", "convert a raw node-pair file to an edge list");
    cing->add_option("--in", ing.in, "node-pair file")->required();
    cing->add_option("--out", ing.out, "edge-list output path")->required();
    cing->add_flag("--directed", ing.directed, "treat pairs as arcs");
    cing->add_flag("--largest-component", ing.largest_component,
                   "keep only the largest weakly connected component");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cgen->parsed()) return cmd_gen(gen);
        if (csim->parsed()) return cmd_simulate(sim);
        if (ctrain->parsed()) return cmd_train(tr);
        if (cpred->parsed()) return cmd_predict(pr);
        if (ceval->parsed()) return cmd_eval(ev);
        if (cbench->parsed()) return cmd_bench(be);
        if (cplot->parsed()) return cmd_plot(pl);
        if (cing->parsed()) return cmd_ingest(ing);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
