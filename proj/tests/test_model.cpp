#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "grad_check.hpp"
#include "robnet/checkpoint.hpp"
#include "robnet/model.hpp"
#include "robnet/netgen.hpp"

using namespace robnet;

namespace {

ModelConfig tiny_config() {
    ModelConfig c;
    c.conv_groups = {{3, 4}, {3, 8}};
    c.spp_levels = {1, 2, 4};
    c.fc_hidden = {24};
    c.output_len = 16;
    return c;
}

Graph er_graph(std::size_t n, double k, std::uint64_t seed) {
    GeneratorConfig cfg;
    cfg.model = NetModel::ER;
    cfg.n = n;
    cfg.directed = false;
    cfg.k_avg = k;
    cfg.seed = seed;
    return generate(cfg);
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    REQUIRE(in);
    std::vector<char> data(static_cast<std::size_t>(in.tellg()));
    in.seekg(0);
    in.read(data.data(), static_cast<std::streamsize>(data.size()));
    return data;
}

} // namespace

TEST_CASE("config widths") {
    ModelConfig std_cfg = ModelConfig::standard();
    CHECK(std_cfg.pyramid_bins() == 21);
    CHECK(std_cfg.last_channels() == 256);
    CHECK(std_cfg.spp_width() == 5376); // first dense input
    CHECK(std_cfg.min_input() == 64);

    ModelConfig red = ModelConfig::reduced();
    CHECK(red.spp_width() == 21 * 64);
    CHECK(red.min_input() == 16);

    ModelConfig bad = tiny_config();
    bad.conv_groups[0].kernel = 4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config json round-trip") {
    ModelConfig cfg = ModelConfig::reduced();
    ModelConfig back = config_from_json(config_to_json(cfg));
    CHECK(back == cfg);
}

TEST_CASE("builds are deterministic in the seed") {
    Rng a(12), b(12), c(13);
    SppCnn m1(tiny_config(), a);
    SppCnn m2(tiny_config(), b);
    SppCnn m3(tiny_config(), c);
    auto p1 = m1.parameters(), p2 = m2.parameters(), p3 = m3.parameters();
    bool all_equal = true, any_diff = false;
    for (std::size_t i = 0; i < p1.size(); ++i) {
        for (std::size_t j = 0; j < p1[i].size(); ++j) {
            if (p1[i].values()[j] != p2[i].values()[j]) all_equal = false;
            if (p1[i].values()[j] != p3[i].values()[j]) any_diff = true;
        }
    }
    CHECK(all_equal);
    CHECK(any_diff);
    CHECK(m1.parameter_count() > 0);
}

TEST_CASE("forward emits a fixed-length vector in [0,1] for any input size") {
    Rng rng(7);
    SppCnn model(tiny_config(), rng);
    for (std::size_t n : {4u, 9u, 17u, 33u}) {
        Graph g = er_graph(n, 3.0, n);
        Tensor out = model.forward_graph(nullptr, g);
        CHECK(out.shape() == Shape{1, 16});
        for (float v : out.values()) {
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
        }
    }
    // determinism: same adjacency, same output
    Graph g = er_graph(20, 4.0, 99);
    Tensor a = model.forward_graph(nullptr, g);
    Tensor b = model.forward_graph(nullptr, g);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values()[i] == b.values()[i]);

    Graph small = er_graph(3, 1.0, 1);
    CHECK_THROWS_AS(model.forward_graph(nullptr, small), std::invalid_argument);
}

TEST_CASE("one checkpoint emits the same length for widely different sizes") {
    Rng rng(2025);
    SppCnn model(ModelConfig::reduced(), rng);
    const std::size_t m = model.config().output_len;
    for (std::size_t n : {64u, 100u, 257u, 511u}) {
        Graph g = er_graph(n, 6.0, n);
        Tensor out = model.forward_graph(nullptr, g);
        CHECK(out.shape() == Shape{1, m});
    }
}

TEST_CASE("resample_curve") {
    std::vector<double> same{0.2, 0.4, 0.9};
    CHECK(resample_curve(same, 3) == same);

    std::vector<double> constant(5, 0.7);
    for (double v : resample_curve(constant, 9)) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));

    std::vector<double> ramp{0.0, 0.25, 0.5, 0.75, 1.0};
    auto up = resample_curve(ramp, 9);
    for (std::size_t i = 0; i < 9; ++i)
        CHECK(std::abs(up[i] - static_cast<double>(i) / 8.0) < 1e-12);
    CHECK(up.front() == 0.0);
    CHECK(up.back() == 1.0);

    CHECK_THROWS_AS(resample_curve({1.0}, 5), std::invalid_argument);
    CHECK_THROWS_AS(resample_curve(ramp, 1), std::invalid_argument);
}

TEST_CASE("loss decreases on a single-sample dataset") {
    Rng rng(21);
    SppCnn model(tiny_config(), rng);
    Graph g = er_graph(20, 4.0, 5);
    Rng gt_rng(17);
    auto truth = ground_truth(g, Measure::Connectivity, AttackKind::MaxDegree, 2, gt_rng);
    std::vector<CurveSample> data{make_sample(g, truth, model.config().output_len)};

    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.accumulate = 1;
    cfg.seed = 1;
    TrainResult result = train(model, data, {}, cfg);
    REQUIRE(result.history.size() == 10);
    for (std::size_t i = 1; i < result.history.size(); ++i)
        CHECK(result.history[i].train_mse < result.history[i - 1].train_mse);
}

TEST_CASE("zero-epoch training leaves parameters at initialization") {
    Rng rng(3), rng2(3);
    SppCnn model(tiny_config(), rng);
    SppCnn fresh(tiny_config(), rng2);
    Graph g = er_graph(18, 3.0, 2);
    Rng gt_rng(1);
    auto truth = ground_truth(g, Measure::Connectivity, AttackKind::Random, 1, gt_rng);
    std::vector<CurveSample> data{make_sample(g, truth, model.config().output_len)};
    TrainConfig cfg;
    cfg.epochs = 0;
    train(model, data, {}, cfg);
    auto pa = model.parameters(), pb = fresh.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pa[i].size(); ++j) CHECK(pa[i].values()[j] == pb[i].values()[j]);
}

TEST_CASE("training is deterministic in the seed") {
    auto run = [] {
        Rng rng(77);
        SppCnn model(tiny_config(), rng);
        std::vector<CurveSample> data;
        for (std::uint64_t s = 0; s < 4; ++s) {
            Graph g = er_graph(16 + 2 * s, 3.5, s);
            Rng gt_rng(s);
            auto truth = ground_truth(g, Measure::Connectivity, AttackKind::MaxDegree, 1, gt_rng);
            data.push_back(make_sample(g, truth, model.config().output_len));
        }
        TrainConfig cfg;
        cfg.epochs = 4;
        cfg.accumulate = 3;
        cfg.seed = 9;
        return train(model, data, {data[0]}, cfg);
    };
    TrainResult a = run();
    TrainResult b = run();
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].train_mse == b.history[i].train_mse);
        CHECK(a.history[i].val_xi == b.history[i].val_xi);
    }
}

TEST_CASE("predict_curve resamples to the graph size") {
    Rng rng(41);
    SppCnn model(tiny_config(), rng);
    for (std::size_t n : {5u, 16u, 40u}) {
        Graph g = er_graph(n, 3.0, n + 1);
        auto curve = predict_curve(model, g, Measure::Connectivity);
        CHECK(curve.values.size() == n);
        for (double v : curve.values) {
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
        double scalar = robustness_scalar(curve);
        CHECK(scalar > 0.0);
        CHECK(scalar <= 1.0);
        auto again = predict_curve(model, g, Measure::Connectivity);
        CHECK(again.values == curve.values);
    }
}

TEST_CASE("resize_adjacency") {
    Rng rng(6);
    Graph g = er_graph(10, 3.0, 4);
    auto a = g.adjacency_matrix();

    auto same = resize_adjacency(a, 10, rng);
    CHECK(same.delta == 0.0);
    CHECK(same.matrix == a);

    auto shrunk = resize_adjacency(a, 7, rng);
    CHECK(shrunk.matrix.n == 7);
    CHECK(shrunk.delta == doctest::Approx(3.0 / 10.0).epsilon(1e-15));

    auto grown = resize_adjacency(a, 15, rng);
    CHECK(grown.matrix.n == 15);
    CHECK(grown.delta == doctest::Approx(0.5).epsilon(1e-15));
    // exactly 5 inserted zero rows and columns
    std::size_t zero_rows = 0;
    for (std::size_t i = 0; i < 15; ++i) {
        bool allz = true;
        for (std::size_t j = 0; j < 15; ++j)
            if (grown.matrix.at(i, j)) allz = false;
        if (allz) ++zero_rows;
    }
    std::size_t orig_zero_rows = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        bool allz = true;
        for (std::size_t j = 0; j < 10; ++j)
            if (a.at(i, j)) allz = false;
        if (allz) ++orig_zero_rows;
    }
    CHECK(zero_rows == 5 + orig_zero_rows);
}

TEST_CASE("resize distorts degrees; the size-true path does not") {
    Rng rng(123);
    Graph g = er_graph(30, 5.0, 9);
    auto a = g.adjacency_matrix();

    auto degree_multiset = [](const AdjacencyMatrix& m) {
        std::vector<std::size_t> deg(m.n, 0);
        for (std::size_t i = 0; i < m.n; ++i)
            for (std::size_t j = 0; j < m.n; ++j)
                if (m.at(i, j)) ++deg[i];
        std::sort(deg.begin(), deg.end());
        return deg;
    };

    // the size-true model input is exactly the adjacency matrix
    Tensor img = adjacency_image(g);
    REQUIRE(img.size() == a.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        CHECK(img.values()[i] == static_cast<float>(a.cells[i]));

    // deleting rows/columns of a graph with edges changes the degrees
    bool changed = false;
    for (int trial = 0; trial < 5; ++trial) {
        auto shrunk = resize_adjacency(a, 20, rng);
        if (degree_multiset(shrunk.matrix) != degree_multiset(a)) changed = true;
    }
    CHECK(changed);
}

TEST_CASE("checkpoint round trip is byte-identical") {
    Rng rng(55);
    SppCnn model(tiny_config(), rng);
    TrainMeta meta;
    meta.epochs_run = 12;
    meta.final_train_mse = 0.0123;
    meta.final_val_xi = 0.045;
    meta.dataset_fingerprint = "deadbeef";

    std::string p1 = "/tmp/robnet_ckpt_a.bin", p2 = "/tmp/robnet_ckpt_b.bin";
    save_checkpoint(p1, model, meta);
    TrainMeta back;
    SppCnn loaded = load_checkpoint(p1, &back);
    CHECK(back.epochs_run == 12);
    CHECK(back.dataset_fingerprint == "deadbeef");
    CHECK(loaded.config() == model.config());
    save_checkpoint(p2, loaded, back);
    CHECK(slurp(p1) == slurp(p2));

    auto pa = model.parameters(), pb = loaded.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pa[i].size(); ++j) CHECK(pa[i].values()[j] == pb[i].values()[j]);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("checkpoint rejects damage") {
    Rng rng(66);
    SppCnn model(tiny_config(), rng);
    std::string path = "/tmp/robnet_ckpt_dmg.bin";
    save_checkpoint(path, model, {});
    auto data = slurp(path);

    { // truncation
        std::ofstream out(path, std::ios::binary);
        out.write(data.data(), static_cast<std::streamsize>(data.size() / 2));
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(load_checkpoint(path)),
                         doctest::Contains("checksum"), std::runtime_error);

    { // future format version (and a fixed-up CRC would still be needed)
        auto bad = data;
        bad[4] = 9;
        std::ofstream out(path, std::ios::binary);
        out.write(bad.data(), static_cast<std::streamsize>(bad.size()));
    }
    CHECK_THROWS_AS(static_cast<void>(load_checkpoint(path)), std::runtime_error);

    { // flipped payload byte
        auto bad = data;
        bad[20] = static_cast<char>(bad[20] ^ 0x40);
        std::ofstream out(path, std::ios::binary);
        out.write(bad.data(), static_cast<std::streamsize>(bad.size()));
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(load_checkpoint(path)),
                         doctest::Contains("checksum"), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("end-to-end gradient check on the reduced preset") {
    Rng rng(83);
    SppCnn model(ModelConfig::reduced(), rng);
    Graph g = er_graph(16, 4.0, 12);
    Tensor image = adjacency_image(g);
    Tensor target = Tensor::zeros({1, model.config().output_len});
    for (float& v : target.values()) v = static_cast<float>(rng.real(0.2, 0.9));

    Tape tape;
    Tensor loss = mse_loss(&tape, model.forward(&tape, image), target);
    tape.backward(loss);
    auto forward = [&]() -> double {
        return mse_loss(nullptr, model.forward(nullptr, image), target).scalar();
    };
    auto params = model.parameters();
    Rng pick(9);
    for (int t = 0; t < 10; ++t) {
        auto& p = params[pick.below(params.size())];
        CHECK(gradcheck::check_param(p, forward, pick, 1) < 1e-2);
    }
}
