#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "mp/embedding.hpp"
#include "mp/layers.hpp"
#include "mp/matching.hpp"
#include "mp/rng.hpp"
#include "mp/tensor.hpp"
#include "mp/vocab.hpp"

namespace mp {

// Matching matrix -> conv -> relu -> dynamic max-pool to a fixed grid ->
// conv -> relu -> fixed max-pool -> mlp with dropout -> two-way softmax.
struct ModelConfig {
  MatchOperator op = MatchOperator::kDotProduct;
  std::size_t conv1_maps = 8;
  std::size_t conv1_kernel = 5;
  std::size_t conv2_maps = 16;
  std::size_t conv2_kernel = 3;
  std::size_t grid_rows = 10;  // dynamic-pool target grid
  std::size_t grid_cols = 10;
  std::size_t pool2 = 2;  // fixed square pool after conv2
  std::size_t mlp_hidden = 128;
  double dropout_rate = 0.5;
  std::size_t embedding_dim = 50;  // ignored by the indicator operator

  bool uses_embeddings() const { return op != MatchOperator::kIndicator; }
  std::size_t pooled_rows() const { return (grid_rows + pool2 - 1) / pool2; }
  std::size_t pooled_cols() const { return (grid_cols + pool2 - 1) / pool2; }
  std::size_t flatten_size() const { return conv2_maps * pooled_rows() * pooled_cols(); }
  void validate() const;
};

struct ModelParams {
  ConvLayerParams conv1;
  ConvLayerParams conv2;
  LinearLayerParams fc1;
  LinearLayerParams fc2;
  std::optional<EmbeddingTable> embeddings;
};

// Glorot-uniform weights, zero biases, embeddings from the unit ball. Draw
// order is fixed (conv1, conv2, fc1, fc2, embeddings) so a seed pins every
// parameter.
ModelParams init_params(const ModelConfig& config, const Vocabulary& vocab, Rng& rng);

// Window sizes that map an n x m image onto a grid_n x grid_m grid:
// ceil(n / grid_n) by ceil(m / grid_m).
PoolGeometry dynamic_pool_geometry(std::size_t n, std::size_t m, std::size_t grid_n,
                                   std::size_t grid_m);

// Every intermediate needed by the backward pass.
struct ForwardCache {
  bool training = false;
  Sentence a, b;
  Tensor m;           // [1, len(a), len(b)]
  Tensor z1, a1;      // conv1 pre/post activation
  PoolResult pool1;   // dynamic pool, [conv1_maps, grid_rows, grid_cols]
  Tensor z2, a2;      // conv2 pre/post activation
  PoolResult pool2;   // fixed pool
  std::vector<double> flat;
  std::vector<double> u1, h1;  // fc1 pre/post activation
  DropoutResult drop;          // applied to h1
  std::array<double, 2> scores{};
};

ForwardCache model_forward(const TextPair& pair, const ModelParams& params,
                           const ModelConfig& config, bool training, Rng* rng);

// Dense gradients for every layer plus sparse rows for the embeddings.
struct Gradients {
  Tensor conv1_kernels;
  std::vector<double> conv1_bias;
  Tensor conv2_kernels;
  std::vector<double> conv2_bias;
  Tensor fc1_weight;
  std::vector<double> fc1_bias;
  Tensor fc2_weight;
  std::vector<double> fc2_bias;
  EmbeddingRowGrads embeddings;

  void add(const Gradients& other);
  void scale(double s);
};

Gradients zero_gradients(const ModelParams& params);

struct BackwardResult {
  double loss = 0.0;
  std::array<double, 2> probs{};
  Gradients grads;
};

// Softmax cross-entropy against `label`, then full backprop. The cache must
// come from a training-mode forward.
BackwardResult model_backward(const ForwardCache& cache, int label, const ModelParams& params,
                              const ModelConfig& config);

// Backprop from an injected d(loss)/d(scores); lets tests probe the network
// Jacobian directly.
Gradients model_backward_from_scores(const ForwardCache& cache,
                                     const std::array<double, 2>& grad_scores,
                                     const ModelParams& params, const ModelConfig& config);

// Eval-mode class scores (dropout off).
std::array<double, 2> forward_scores(const TextPair& pair, const ModelParams& params,
                                     const ModelConfig& config);

// Argmax class; an exact tie goes to class 1.
int predict(const TextPair& pair, const ModelParams& params, const ModelConfig& config);

}  // namespace mp
