#include "robnet/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace robnet {

Adam::Adam(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Tensor& p : params_) {
        if (!p.requires_grad()) throw std::invalid_argument("optimizer parameter is not tracked");
        m_.emplace_back(p.size(), 0.0f);
        v_.emplace_back(p.size(), 0.0f);
    }
}

void Adam::step() {
    ++t_;
    const float b1t = 1.0f - std::pow(config_.beta1, static_cast<float>(t_));
    const float b2t = 1.0f - std::pow(config_.beta2, static_cast<float>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto vals = params_[i].values();
        auto grad = params_[i].grad();
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < vals.size(); ++j) {
            const float g = grad[j];
            m[j] = config_.beta1 * m[j] + (1.0f - config_.beta1) * g;
            v[j] = config_.beta2 * v[j] + (1.0f - config_.beta2) * g * g;
            const float mhat = m[j] / b1t;
            const float vhat = v[j] / b2t;
            vals[j] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
        }
    }
}

void Adam::zero_grad() {
    for (Tensor& p : params_) p.zero_grad();
}

} // namespace robnet
