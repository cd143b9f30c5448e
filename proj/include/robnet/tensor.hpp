#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "robnet/rng.hpp"

namespace robnet {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& s);
std::string shape_str(const Shape& s);

namespace detail {
struct TensorImpl {
    Shape shape;
    std::vector<float> values;
    std::vector<float> grad; // allocated iff the tensor is tracked
    bool requires_grad = false;
};
} // namespace detail

/// Dense float32 tensor with shared-buffer value semantics: copies alias
/// the same storage, which is what lets tape closures see later gradient
/// writes.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, float value, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<float> values, bool requires_grad = false);
    /// He-uniform initialization: uniform in +-sqrt(6 / fan_in).
    static Tensor he_uniform(Shape shape, std::size_t fan_in, Rng& rng, bool requires_grad = true);

    bool defined() const { return impl_ != nullptr; }
    const Shape& shape() const { return impl_->shape; }
    std::size_t size() const { return impl_->values.size(); }

    std::span<float> values() { return impl_->values; }
    std::span<const float> values() const { return impl_->values; }
    float scalar() const;

    bool requires_grad() const { return impl_ && impl_->requires_grad; }
    void set_requires_grad(bool on);
    std::span<float> grad();
    std::span<const float> grad() const;
    void zero_grad();

    /// Identity comparison (same storage), used by optimizers.
    bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

    detail::TensorImpl* impl() const { return impl_.get(); }

private:
    explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<detail::TensorImpl> impl_;
};

/// Ordered record of backward rules for one forward pass. Ops append their
/// rule when a tape is supplied; backward() replays them in reverse and
/// clears the tape.
class Tape {
public:
    void record(std::function<void()> rule) { rules_.push_back(std::move(rule)); }
    std::size_t size() const { return rules_.size(); }

    /// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
    /// tracked tensor that participated. The tape is cleared; calling
    /// again without a new forward pass throws.
    void backward(Tensor& loss);

private:
    std::vector<std::function<void()>> rules_;
};

} // namespace robnet
