#include "robnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace robnet {

ModelConfig ModelConfig::standard() {
    ModelConfig c;
    c.conv_groups = {{7, 64}, {5, 64}, {3, 128}, {3, 128}, {3, 256}, {3, 256}};
    c.spp_levels = {1, 2, 4};
    c.fc_hidden = {1024, 1024};
    c.output_len = 256;
    return c;
}

ModelConfig ModelConfig::reduced() {
    ModelConfig c;
    c.conv_groups = {{7, 16}, {5, 32}, {3, 64}, {3, 64}};
    c.spp_levels = {1, 2, 4};
    c.fc_hidden = {256, 256};
    c.output_len = 128;
    return c;
}

std::size_t ModelConfig::pyramid_bins() const {
    std::size_t p = 0;
    for (std::size_t l : spp_levels) p += l * l;
    return p;
}

std::size_t ModelConfig::last_channels() const {
    return conv_groups.empty() ? 0 : conv_groups.back().channels;
}

std::size_t ModelConfig::spp_width() const { return pyramid_bins() * last_channels(); }

std::size_t ModelConfig::min_input() const { return std::size_t{1} << conv_groups.size(); }

void ModelConfig::validate() const {
    if (conv_groups.empty()) throw std::invalid_argument("model needs at least one conv group");
    if (spp_levels.empty()) throw std::invalid_argument("model needs at least one pyramid level");
    for (std::size_t l : spp_levels)
        if (l < 1) throw std::invalid_argument("pyramid level must be >= 1");
    for (const auto& g : conv_groups) {
        if (g.kernel < 1 || g.kernel % 2 == 0)
            throw std::invalid_argument("conv kernels must be odd for same-padding");
        if (g.channels < 1) throw std::invalid_argument("conv group needs at least one channel");
    }
    if (output_len < 2) throw std::invalid_argument("output length must be >= 2");
}

std::string config_to_json(const ModelConfig& config) {
    nlohmann::json j;
    j["conv_groups"] = nlohmann::json::array();
    for (const auto& g : config.conv_groups) j["conv_groups"].push_back({g.kernel, g.channels});
    j["spp_levels"] = config.spp_levels;
    j["fc_hidden"] = config.fc_hidden;
    j["output_len"] = config.output_len;
    return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ModelConfig c;
    c.conv_groups.clear();
    for (const auto& g : j.at("conv_groups"))
        c.conv_groups.push_back({g.at(0).get<std::size_t>(), g.at(1).get<std::size_t>()});
    c.spp_levels = j.at("spp_levels").get<std::vector<std::size_t>>();
    c.fc_hidden = j.at("fc_hidden").get<std::vector<std::size_t>>();
    c.output_len = j.at("output_len").get<std::size_t>();
    c.validate();
    return c;
}

Tensor adjacency_image(const Graph& g) { return matrix_image(g.adjacency_matrix()); }

Tensor matrix_image(const AdjacencyMatrix& a) {
    Tensor t = Tensor::zeros({1, 1, a.n, a.n});
    auto vals = t.values();
    for (std::size_t i = 0; i < a.cells.size(); ++i) vals[i] = static_cast<float>(a.cells[i]);
    return t;
}

SppCnn::SppCnn(ModelConfig config, Rng& rng) : config_(std::move(config)) {
    config_.validate();
    std::size_t cin = 1;
    for (const auto& g : config_.conv_groups) {
        conv_w_.push_back(
            Tensor::he_uniform({g.channels, cin, g.kernel, g.kernel}, cin * g.kernel * g.kernel, rng));
        conv_b_.push_back(Tensor::zeros({g.channels}, true));
        cin = g.channels;
    }
    std::size_t width = config_.spp_width();
    for (std::size_t h : config_.fc_hidden) {
        fc_w_.push_back(Tensor::he_uniform({width, h}, width, rng));
        fc_b_.push_back(Tensor::zeros({h}, true));
        width = h;
    }
    fc_w_.push_back(Tensor::he_uniform({width, config_.output_len}, width, rng));
    fc_b_.push_back(Tensor::zeros({config_.output_len}, true));
}

std::size_t SppCnn::parameter_count() const {
    std::size_t total = 0;
    for (const auto& t : conv_w_) total += t.size();
    for (const auto& t : conv_b_) total += t.size();
    for (const auto& t : fc_w_) total += t.size();
    for (const auto& t : fc_b_) total += t.size();
    return total;
}

std::vector<Tensor> SppCnn::parameters() {
    std::vector<Tensor> out;
    for (auto& [name, t] : named_parameters()) out.push_back(t);
    return out;
}

std::vector<std::pair<std::string, Tensor>> SppCnn::named_parameters() {
    std::vector<std::pair<std::string, Tensor>> out;
    for (std::size_t i = 0; i < conv_w_.size(); ++i) {
        out.emplace_back("conv" + std::to_string(i + 1) + ".weight", conv_w_[i]);
        out.emplace_back("conv" + std::to_string(i + 1) + ".bias", conv_b_[i]);
    }
    for (std::size_t i = 0; i < fc_w_.size(); ++i) {
        out.emplace_back("fc" + std::to_string(i + 1) + ".weight", fc_w_[i]);
        out.emplace_back("fc" + std::to_string(i + 1) + ".bias", fc_b_[i]);
    }
    return out;
}

Tensor SppCnn::forward(Tape* tape, const Tensor& image) const {
    if (image.shape().size() != 4 || image.shape()[0] != 1 || image.shape()[1] != 1)
        throw std::invalid_argument("model input must be a [1,1,n,n] image");
    const std::size_t n = image.shape()[2];
    if (image.shape()[3] != n) throw std::invalid_argument("model input must be square");
    if (n < config_.min_input())
        throw std::invalid_argument("input size " + std::to_string(n) + " below the minimum " +
                                    std::to_string(config_.min_input()) + " for this architecture");

    Tensor x = image;
    for (std::size_t i = 0; i < conv_w_.size(); ++i) {
        x = conv2d(tape, x, conv_w_[i], conv_b_[i], Padding::Same);
        x = relu(tape, x);
        x = maxpool2d(tape, x);
    }
    x = spp(tape, x, config_.spp_levels);
    for (std::size_t i = 0; i + 1 < fc_w_.size(); ++i) {
        x = dense(tape, x, fc_w_[i], fc_b_[i]);
        x = relu(tape, x);
    }
    x = dense(tape, x, fc_w_.back(), fc_b_.back());
    return hard_sigmoid(tape, x);
}

Tensor SppCnn::forward_graph(Tape* tape, const Graph& g) const {
    return forward(tape, adjacency_image(g));
}

std::vector<double> resample_curve(const std::vector<double>& values, std::size_t target) {
    if (values.size() < 2 || target < 2)
        throw std::invalid_argument("resample_curve needs source and target lengths >= 2");
    if (values.size() == target) return values;
    std::vector<double> out(target);
    const double scale = static_cast<double>(values.size() - 1) / static_cast<double>(target - 1);
    for (std::size_t i = 0; i < target; ++i) {
        const double s = static_cast<double>(i) * scale;
        std::size_t lo = std::min(static_cast<std::size_t>(s), values.size() - 2);
        const double f = s - static_cast<double>(lo);
        out[i] = (1.0 - f) * values[lo] + f * values[lo + 1];
    }
    out.back() = values.back();
    out.front() = values.front();
    return out;
}

CurveSample make_sample(const Graph& g, const RobustnessCurve& truth, std::size_t output_len) {
    CurveSample s;
    s.image = adjacency_image(g);
    s.n = g.n_alive();
    std::vector<double> resampled = resample_curve(truth.values, output_len);
    std::vector<float> target(resampled.begin(), resampled.end());
    s.target = Tensor::from({1, output_len}, std::move(target));
    return s;
}

namespace {

double mean_abs_error(const Tensor& a, const Tensor& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::abs(static_cast<double>(a.values()[i]) - static_cast<double>(b.values()[i]));
    return acc / static_cast<double>(a.size());
}

std::vector<std::vector<float>> snapshot(std::vector<Tensor>& params) {
    std::vector<std::vector<float>> out;
    out.reserve(params.size());
    for (Tensor& p : params) out.emplace_back(p.values().begin(), p.values().end());
    return out;
}

void restore(std::vector<Tensor>& params, const std::vector<std::vector<float>>& snap) {
    for (std::size_t i = 0; i < params.size(); ++i)
        std::copy(snap[i].begin(), snap[i].end(), params[i].values().begin());
}

} // namespace

TrainResult train(SppCnn& model, const std::vector<CurveSample>& train_set,
                  const std::vector<CurveSample>& val_set, const TrainConfig& config) {
    if (train_set.empty()) throw std::invalid_argument("training set is empty");
    if (config.accumulate < 1) throw std::invalid_argument("accumulate must be >= 1");

    std::vector<Tensor> params = model.parameters();
    Adam opt(params, config.adam);
    Rng rng(derive_seed(config.seed, 0x7261696eull));

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult result;
    result.best_val_xi = std::numeric_limits<double>::infinity();
    std::vector<std::vector<float>> best;
    std::size_t stale = 0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        opt.zero_grad();
        std::size_t pending = 0;
        double mse_sum = 0.0;
        double xi_sum = 0.0;

        auto flush = [&]() {
            if (pending == 0) return;
            const float inv = 1.0f / static_cast<float>(pending);
            for (Tensor& p : params)
                for (float& g : p.grad()) g *= inv;
            opt.step();
            opt.zero_grad();
            pending = 0;
        };

        for (std::size_t idx : order) {
            const CurveSample& sample = train_set[idx];
            Tape tape;
            Tensor out = model.forward(&tape, sample.image);
            Tensor loss = mse_loss(&tape, out, sample.target);
            const double l = loss.scalar();
            if (!std::isfinite(l))
                throw std::runtime_error("training diverged (non-finite loss) at epoch " +
                                         std::to_string(epoch) + ", sample " + std::to_string(idx));
            mse_sum += l;
            xi_sum += mean_abs_error(out, sample.target);
            tape.backward(loss);
            if (++pending == config.accumulate) flush();
        }
        flush();

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = mse_sum / static_cast<double>(train_set.size());
        stats.train_xi = xi_sum / static_cast<double>(train_set.size());
        stats.val_xi = std::numeric_limits<double>::quiet_NaN();

        if (!val_set.empty()) {
            double acc = 0.0;
            for (const CurveSample& sample : val_set) {
                Tensor out = model.forward(nullptr, sample.image);
                acc += mean_abs_error(out, sample.target);
            }
            stats.val_xi = acc / static_cast<double>(val_set.size());
            if (stats.val_xi < result.best_val_xi) {
                result.best_val_xi = stats.val_xi;
                result.best_epoch = epoch;
                best = snapshot(params);
                stale = 0;
            } else {
                ++stale;
            }
        } else if (stats.train_xi < result.best_val_xi) {
            result.best_val_xi = stats.train_xi;
            result.best_epoch = epoch;
        }

        result.history.push_back(stats);
        if (config.patience > 0 && !val_set.empty() && stale >= config.patience) break;
        if (config.stop_below_train_xi > 0.0 && stats.train_xi < config.stop_below_train_xi) break;
    }

    if (!best.empty()) restore(params, best);
    return result;
}

RobustnessCurve predict_curve(const SppCnn& model, const Graph& g, Measure measure) {
    Tensor out = model.forward_graph(nullptr, g);
    std::vector<double> embedded(out.values().begin(), out.values().end());
    RobustnessCurve curve;
    curve.measure = measure;
    curve.n = g.n_alive();
    curve.values = resample_curve(embedded, curve.n);
    for (double& v : curve.values) v = std::clamp(v, 1e-6, 1.0);
    return curve;
}

ResizedAdjacency resize_adjacency(const AdjacencyMatrix& a, std::size_t w, Rng& rng) {
    if (a.n < 1 || w < 1) throw std::invalid_argument("resize_adjacency needs n >= 1 and W >= 1");
    ResizedAdjacency out;
    out.delta = std::abs(static_cast<double>(a.n) - static_cast<double>(w)) / static_cast<double>(a.n);
    out.matrix.n = w;
    out.matrix.cells.assign(w * w, 0);

    if (a.n == w) {
        out.matrix.cells = a.cells;
        return out;
    }

    if (a.n > w) {
        // keep a uniformly chosen size-w subset of indices, in order
        std::vector<std::uint32_t> keep(a.n);
        for (std::size_t i = 0; i < a.n; ++i) keep[i] = static_cast<std::uint32_t>(i);
        for (std::size_t drop = a.n; drop > w; --drop) {
            std::size_t j = rng.below(drop);
            keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(j));
        }
        for (std::size_t i = 0; i < w; ++i)
            for (std::size_t j = 0; j < w; ++j) out.matrix.cells[i * w + j] = a.at(keep[i], keep[j]);
        return out;
    }

    // insert w-n zero rows/columns at uniformly chosen positions
    std::vector<std::uint8_t> is_new(w, 0);
    std::size_t to_add = w - a.n;
    while (to_add > 0) {
        std::size_t pos = rng.below(w);
        if (!is_new[pos]) {
            is_new[pos] = 1;
            --to_add;
        }
    }
    std::vector<std::size_t> src(w, 0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < w; ++i)
        if (!is_new[i]) src[i] = next++;
    for (std::size_t i = 0; i < w; ++i) {
        if (is_new[i]) continue;
        for (std::size_t j = 0; j < w; ++j) {
            if (is_new[j]) continue;
            out.matrix.cells[i * w + j] = a.at(src[i], src[j]);
        }
    }
    return out;
}

} // namespace robnet
