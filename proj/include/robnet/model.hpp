#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robnet/graph.hpp"
#include "robnet/nn_ops.hpp"
#include "robnet/optim.hpp"
#include "robnet/rng.hpp"
#include "robnet/robustness.hpp"
#include "robnet/tensor.hpp"

namespace robnet {

struct ConvGroupSpec {
    std::size_t kernel = 3;
    std::size_t channels = 64;
    bool operator==(const ConvGroupSpec&) const = default;
};

/// Architecture description: conv groups (each conv -> relu -> 2x2 max
/// pool), pyramid levels, fully-connected widths, and the fixed output
/// length the curves are regressed onto.
struct ModelConfig {
    std::vector<ConvGroupSpec> conv_groups;
    std::vector<std::size_t> spp_levels{1, 2, 4};
    std::vector<std::size_t> fc_hidden{1024, 1024};
    std::size_t output_len = 256;

    static ModelConfig standard(); // 6 groups, 256 filters at the top
    static ModelConfig reduced();  // 4 groups, 64 filters, desk-scale tests

    std::size_t pyramid_bins() const;  // sum of level^2
    std::size_t last_channels() const; // filters in the last conv group
    std::size_t spp_width() const;     // pyramid_bins * last_channels
    /// Smallest n the pooling chain can accept (one halving per group).
    std::size_t min_input() const;
    void validate() const;

    bool operator==(const ModelConfig&) const = default;
};

std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const std::string& text);

/// Adjacency matrix of the live subgraph as a 1-channel float image.
Tensor adjacency_image(const Graph& g);

class SppCnn {
public:
    SppCnn(ModelConfig config, Rng& rng);

    const ModelConfig& config() const { return config_; }
    std::size_t min_input_size() const { return config_.min_input(); }
    std::size_t parameter_count() const;

    /// Parameters in a fixed enumeration order (conv groups, then FCs).
    std::vector<Tensor> parameters();
    std::vector<std::pair<std::string, Tensor>> named_parameters();

    /// image [1,1,n,n] -> curve embedding [1, output_len], values in [0,1].
    Tensor forward(Tape* tape, const Tensor& image) const;
    Tensor forward_graph(Tape* tape, const Graph& g) const;

private:
    ModelConfig config_;
    std::vector<Tensor> conv_w_, conv_b_;
    std::vector<Tensor> fc_w_, fc_b_;
};

/// Linear interpolation over the normalized index; endpoints preserved.
std::vector<double> resample_curve(const std::vector<double>& values, std::size_t target);

struct CurveSample {
    Tensor image;  // [1,1,n,n]
    Tensor target; // [1,M] ground-truth curve resampled to the model output
    std::size_t n = 0;
};

CurveSample make_sample(const Graph& g, const RobustnessCurve& truth, std::size_t output_len);

struct TrainConfig {
    AdamConfig adam;
    std::size_t epochs = 100;
    std::size_t accumulate = 8; // samples per optimizer step
    std::uint64_t seed = 0;
    std::size_t patience = 0; // epochs without val improvement before stopping; 0 = off
    double stop_below_train_xi = 0.0; // finish early once train xi drops below; 0 = off
};

struct EpochStats {
    std::size_t epoch = 0;
    double train_mse = 0.0;
    double train_xi = 0.0;
    double val_xi = 0.0; // NaN when there is no validation set
};

struct TrainResult {
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;
    double best_val_xi = 0.0;
};

/// Per-sample forward/backward with gradient accumulation; deterministic
/// for a fixed seed. With a validation set, the parameters are restored
/// to the best-val-xi epoch at the end.
TrainResult train(SppCnn& model, const std::vector<CurveSample>& train_set,
                  const std::vector<CurveSample>& val_set, const TrainConfig& config);

/// Forward, resample to the graph's size, clamp into (0,1].
RobustnessCurve predict_curve(const SppCnn& model, const Graph& g, Measure measure);

struct ResizedAdjacency {
    AdjacencyMatrix matrix;
    double delta = 0.0; // |n - W| / n
};

/// Fixed-input baseline: delete or zero-pad uniformly chosen rows/columns
/// (the same index set on both axes) to force the matrix to W x W.
ResizedAdjacency resize_adjacency(const AdjacencyMatrix& a, std::size_t w, Rng& rng);

Tensor matrix_image(const AdjacencyMatrix& a);

} // namespace robnet
