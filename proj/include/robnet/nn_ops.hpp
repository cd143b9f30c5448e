#pragma once

#include <vector>

#include "robnet/tensor.hpp"

namespace robnet {

enum class Padding { Valid, Same };

/// Cross-correlation with per-channel bias, stride 1.
/// input [B,Cin,H,W], kernel [Cout,Cin,k,k], bias [Cout].
Tensor conv2d(Tape* tape, const Tensor& input, const Tensor& kernel, const Tensor& bias,
              Padding padding = Padding::Valid);

/// 2x2 window max, stride 2; trailing odd row/column dropped.
Tensor maxpool2d(Tape* tape, const Tensor& input);

/// Max over an n x n grid of spatial bins that jointly cover the map;
/// works for any H,W >= 1 (bins may overlap when the map is small).
Tensor adaptive_max_pool(Tape* tape, const Tensor& input, std::size_t bins);

/// Pyramid pooling: adaptive max pools at the given levels, flattened
/// level-major, then channel, then row-major bin. Output [B, C * sum(l^2)].
Tensor spp(Tape* tape, const Tensor& input, const std::vector<std::size_t>& levels = {1, 2, 4});

/// Affine map: input [B,F] * weight [F,G] + bias [G].
Tensor dense(Tape* tape, const Tensor& input, const Tensor& weight, const Tensor& bias);

Tensor relu(Tape* tape, const Tensor& x);

/// clamp(0.2 x + 0.5, 0, 1)
Tensor hard_sigmoid(Tape* tape, const Tensor& x);

/// Mean over all elements of the squared difference.
Tensor mse_loss(Tape* tape, const Tensor& pred, const Tensor& target);

/// Scalar sum of all elements.
Tensor sum_all(Tape* tape, const Tensor& x);

} // namespace robnet
