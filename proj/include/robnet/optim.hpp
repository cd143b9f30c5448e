#pragma once

#include <cstdint>
#include <vector>

#include "robnet/tensor.hpp"

namespace robnet {

struct AdamConfig {
    float lr = 1e-4f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

class Adam {
public:
    explicit Adam(std::vector<Tensor> params, AdamConfig config = {});

    /// One update from the gradients currently stored on the parameters.
    void step();
    void zero_grad();

    const AdamConfig& config() const { return config_; }

private:
    std::vector<Tensor> params_;
    std::vector<std::vector<float>> m_;
    std::vector<std::vector<float>> v_;
    AdamConfig config_;
    std::int64_t t_ = 0;
};

} // namespace robnet
