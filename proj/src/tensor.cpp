#include "robnet/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace robnet {

std::size_t shape_size(const Shape& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    auto impl = std::make_shared<detail::TensorImpl>();
    impl->shape = std::move(shape);
    impl->values.assign(shape_size(impl->shape), 0.0f);
    Tensor t(std::move(impl));
    t.set_requires_grad(requires_grad);
    return t;
}

Tensor Tensor::full(Shape shape, float value, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    for (float& v : t.values()) v = value;
    return t;
}

Tensor Tensor::from(Shape shape, std::vector<float> values, bool requires_grad) {
    if (shape_size(shape) != values.size())
        throw std::invalid_argument("tensor data length does not match shape " + shape_str(shape));
    auto impl = std::make_shared<detail::TensorImpl>();
    impl->shape = std::move(shape);
    impl->values = std::move(values);
    Tensor t(std::move(impl));
    t.set_requires_grad(requires_grad);
    return t;
}

Tensor Tensor::he_uniform(Shape shape, std::size_t fan_in, Rng& rng, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (float& v : t.values()) v = static_cast<float>(rng.real(-limit, limit));
    return t;
}

float Tensor::scalar() const {
    if (size() != 1) throw std::invalid_argument("scalar() on tensor of shape " + shape_str(shape()));
    return impl_->values[0];
}

void Tensor::set_requires_grad(bool on) {
    impl_->requires_grad = on;
    if (on && impl_->grad.size() != impl_->values.size())
        impl_->grad.assign(impl_->values.size(), 0.0f);
    if (!on) impl_->grad.clear();
}

std::span<float> Tensor::grad() {
    if (!requires_grad()) throw std::logic_error("grad() on an untracked tensor");
    return impl_->grad;
}

std::span<const float> Tensor::grad() const {
    if (!requires_grad()) throw std::logic_error("grad() on an untracked tensor");
    return impl_->grad;
}

void Tensor::zero_grad() {
    if (requires_grad()) std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0f);
}

void Tape::backward(Tensor& loss) {
    if (rules_.empty())
        throw std::logic_error("backward on an empty tape (no forward pass recorded, or called twice)");
    if (loss.size() != 1)
        throw std::invalid_argument("backward needs a scalar loss, got " + shape_str(loss.shape()));
    if (!loss.requires_grad())
        throw std::invalid_argument("loss does not depend on any tracked tensor");
    loss.grad()[0] = 1.0f;
    for (auto it = rules_.rbegin(); it != rules_.rend(); ++it) (*it)();
    rules_.clear();
}

} // namespace robnet
