#pragma once

// Central-finite-difference gradient oracle. The forward callback reruns the
// computation without a tape and returns the scalar loss; the check compares
// the taped gradient of each sampled element against (f(x+e)-f(x-e))/2e.

#include <cmath>
#include <functional>

#include "robnet/rng.hpp"
#include "robnet/tensor.hpp"

namespace gradcheck {

inline double central_diff(robnet::Tensor& param, std::size_t idx, double eps,
                           const std::function<double()>& forward) {
    float orig = param.values()[idx];
    param.values()[idx] = static_cast<float>(orig + eps);
    double hi = forward();
    param.values()[idx] = static_cast<float>(orig - eps);
    double lo = forward();
    param.values()[idx] = orig;
    return (hi - lo) / (2.0 * eps);
}

/// Relative error with a unit floor so near-zero gradients are compared
/// absolutely (f32 forward noise makes a pure ratio meaningless there).
inline double rel_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Checks up to `samples` random elements of `param` against the oracle.
/// Returns the worst relative error observed.
inline double check_param(robnet::Tensor& param, const std::function<double()>& forward,
                          robnet::Rng& rng, std::size_t samples = 8, double eps = 1e-3) {
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t idx = rng.below(param.size());
        double fd = central_diff(param, idx, eps, forward);
        double ad = static_cast<double>(param.grad()[idx]);
        worst = std::max(worst, rel_error(ad, fd));
    }
    return worst;
}

/// Random values in [lo, hi] kept at least `margin` away from every point
/// in `kinks` (for activations whose derivative jumps there).
inline robnet::Tensor away_from_kinks(robnet::Shape shape, robnet::Rng& rng, double lo, double hi,
                                      std::initializer_list<double> kinks, double margin,
                                      bool requires_grad = true) {
    robnet::Tensor t = robnet::Tensor::zeros(shape, requires_grad);
    for (float& v : t.values()) {
        for (;;) {
            double x = rng.real(lo, hi);
            bool ok = true;
            for (double k : kinks)
                if (std::abs(x - k) < margin) ok = false;
            if (ok) {
                v = static_cast<float>(x);
                break;
            }
        }
    }
    return t;
}

} // namespace gradcheck
