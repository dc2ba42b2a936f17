#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mp/rng.hpp"
#include "mp/tensor.hpp"

namespace mp {

enum class Padding { kSame, kValid };

// Square convolution kernels, unit stride.
struct ConvLayerParams {
  Tensor kernels;            // [out_maps, in_maps, r, r]
  std::vector<double> bias;  // [out_maps]

  std::size_t out_maps() const { return kernels.dim(0); }
  std::size_t in_maps() const { return kernels.dim(1); }
  std::size_t kernel_size() const { return kernels.dim(2); }
  void validate() const;
};

// output[k][i][j] = sum_c sum_s sum_t kernels[k][c][s][t] * padded[c][i+s][j+t] + bias[k]
// Pre-activation; ReLU is applied separately. Same padding keeps H x W.
Tensor conv2d_forward(const Tensor& input, const ConvLayerParams& params, Padding pad);

struct ConvGrads {
  Tensor input;    // same shape as forward input
  Tensor kernels;  // same shape as params.kernels
  std::vector<double> bias;
};

// Gradients of sum(grad_out * output) with respect to input, kernels, bias.
ConvGrads conv2d_backward(const Tensor& input, const ConvLayerParams& params,
                          const Tensor& grad_out, Padding pad);

Tensor relu_forward(const Tensor& x);
// x is the pre-activation input; subgradient at exactly 0 is 0.
Tensor relu_backward(const Tensor& x, const Tensor& grad_out);

struct PoolGeometry {
  enum class Kind { kDynamic, kFixed };
  std::size_t window_h = 1;
  std::size_t window_w = 1;
  Kind kind = Kind::kFixed;
};

struct PoolIndices {
  std::vector<std::size_t> input_shape;   // [c, H, W]
  std::vector<std::size_t> output_shape;  // [c, h, w]
  std::vector<std::size_t> argmax;        // flat input index per output cell
};

struct PoolResult {
  Tensor output;
  PoolIndices indices;
};

// Non-overlapping windows of stride = window size. Out-of-bounds window cells
// are skipped (max over fewer cells, never zero-filled). When a dynamic
// window starts past the last row/column it re-reads the last one, so the
// output grid is always exactly (out_h, out_w). Ties break to the first
// occurrence in row-major order.
//
// Dynamic kind: (out_h, out_w) must be supplied by the caller.
// Fixed kind: the grid is ceil(H / window_h) x ceil(W / window_w); a window
// larger than the input is a geometry error.
PoolResult max_pool_forward(const Tensor& input, const PoolGeometry& geom, std::size_t out_h = 0,
                            std::size_t out_w = 0);

// Routes gradient to the recorded argmax positions; overlapping windows
// accumulate additively.
Tensor max_pool_backward(const PoolIndices& indices, const Tensor& grad_out);

struct LinearLayerParams {
  Tensor weight;             // [out_dim, in_dim]
  std::vector<double> bias;  // [out_dim]

  std::size_t out_dim() const { return weight.dim(0); }
  std::size_t in_dim() const { return weight.dim(1); }
  void validate() const;
};

// W * z + b
std::vector<double> linear_forward(const std::vector<double>& z, const LinearLayerParams& params);

struct LinearGrads {
  Tensor weight;
  std::vector<double> bias;
  std::vector<double> input;
};

LinearGrads linear_backward(const std::vector<double>& z, const LinearLayerParams& params,
                            const std::vector<double>& grad_out);

struct SoftmaxCeResult {
  double loss = 0.0;
  std::array<double, 2> probs{};
  std::array<double, 2> grad_scores{};
};

// p_k = exp(s_k) / (exp(s_0) + exp(s_1)) with max-subtraction;
// loss = -log p_label; grad = p - onehot(label).
SoftmaxCeResult softmax_cross_entropy(const std::array<double, 2>& scores, int label);

struct DropoutResult {
  Tensor output;
  // Per-element factor: 0 for dropped, 1/(1-rate) for kept. All ones in eval
  // mode or at rate 0.
  std::vector<double> mask;
};

// Inverted dropout: survivors are scaled at train time so eval is identity.
// rate 0 draws nothing from the rng.
DropoutResult dropout(const Tensor& x, double rate, bool training, Rng* rng);

}  // namespace mp
