#include "mp/model.hpp"

#include <cmath>
#include <string>

#include "mp/errors.hpp"

namespace mp {

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string("model config: ") + name + " must be positive");
  };
  positive(conv1_maps, "conv1_maps");
  positive(conv1_kernel, "conv1_kernel");
  positive(conv2_maps, "conv2_maps");
  positive(conv2_kernel, "conv2_kernel");
  positive(grid_rows, "grid_rows");
  positive(grid_cols, "grid_cols");
  positive(pool2, "pool2");
  positive(mlp_hidden, "mlp_hidden");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("model config: dropout_rate must satisfy 0 <= rate < 1, got " +
                      std::to_string(dropout_rate));
  }
  if (pool2 > grid_rows || pool2 > grid_cols) {
    throw ConfigError("model config: pool2 window exceeds the pooled grid");
  }
  if (uses_embeddings()) positive(embedding_dim, "embedding_dim");
}

namespace {

// limit = sqrt(6 / (fan_in + fan_out)); draws fill `t` in data order.
void glorot_fill(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.data) v = rng.uniform(-limit, limit);
}

}  // namespace

ModelParams init_params(const ModelConfig& config, const Vocabulary& vocab, Rng& rng) {
  config.validate();
  ModelParams p;

  std::size_t k1 = config.conv1_kernel, k2 = config.conv2_kernel;
  p.conv1.kernels = Tensor({config.conv1_maps, 1, k1, k1});
  glorot_fill(p.conv1.kernels, k1 * k1, config.conv1_maps * k1 * k1, rng);
  p.conv1.bias.assign(config.conv1_maps, 0.0);

  p.conv2.kernels = Tensor({config.conv2_maps, config.conv1_maps, k2, k2});
  glorot_fill(p.conv2.kernels, config.conv1_maps * k2 * k2, config.conv2_maps * k2 * k2, rng);
  p.conv2.bias.assign(config.conv2_maps, 0.0);

  std::size_t flat = config.flatten_size();
  p.fc1.weight = Tensor({config.mlp_hidden, flat});
  glorot_fill(p.fc1.weight, flat, config.mlp_hidden, rng);
  p.fc1.bias.assign(config.mlp_hidden, 0.0);

  p.fc2.weight = Tensor({2, config.mlp_hidden});
  glorot_fill(p.fc2.weight, config.mlp_hidden, 2, rng);
  p.fc2.bias.assign(2, 0.0);

  if (config.uses_embeddings()) {
    p.embeddings = init_embeddings(vocab, config.embedding_dim, rng);
  }
  return p;
}

PoolGeometry dynamic_pool_geometry(std::size_t n, std::size_t m, std::size_t grid_n,
                                   std::size_t grid_m) {
  if (n == 0 || m == 0) throw GeometryError("dynamic_pool_geometry: empty image");
  if (grid_n == 0 || grid_m == 0) throw GeometryError("dynamic_pool_geometry: empty target grid");
  PoolGeometry g;
  g.kind = PoolGeometry::Kind::kDynamic;
  g.window_h = (n + grid_n - 1) / grid_n;
  g.window_w = (m + grid_m - 1) / grid_m;
  return g;
}

ForwardCache model_forward(const TextPair& pair, const ModelParams& params,
                           const ModelConfig& config, bool training, Rng* rng) {
  config.validate();
  const EmbeddingTable* emb = params.embeddings ? &*params.embeddings : nullptr;

  ForwardCache c;
  c.training = training;
  c.a = pair.a;
  c.b = pair.b;
  c.m = matching_matrix(pair.a, pair.b, config.op, emb);

  c.z1 = conv2d_forward(c.m, params.conv1, Padding::kSame);
  c.a1 = relu_forward(c.z1);
  PoolGeometry g1 =
      dynamic_pool_geometry(c.a1.dim(1), c.a1.dim(2), config.grid_rows, config.grid_cols);
  c.pool1 = max_pool_forward(c.a1, g1, config.grid_rows, config.grid_cols);

  c.z2 = conv2d_forward(c.pool1.output, params.conv2, Padding::kSame);
  c.a2 = relu_forward(c.z2);
  PoolGeometry g2{config.pool2, config.pool2, PoolGeometry::Kind::kFixed};
  c.pool2 = max_pool_forward(c.a2, g2);

  c.flat = c.pool2.output.data;  // row-major [map, row, col]
  c.u1 = linear_forward(c.flat, params.fc1);

  Tensor u1t({config.mlp_hidden});
  u1t.data = c.u1;
  Tensor h1t = relu_forward(u1t);
  c.h1 = h1t.data;
  c.drop = dropout(h1t, config.dropout_rate, training, rng);

  std::vector<double> s = linear_forward(c.drop.output.data, params.fc2);
  c.scores = {s[0], s[1]};
  return c;
}

void Gradients::add(const Gradients& other) {
  auto add_t = [](Tensor& a, const Tensor& b, const char* what) {
    check_same_shape(a, b, what);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  auto add_v = [](std::vector<double>& a, const std::vector<double>& b, const char* what) {
    if (a.size() != b.size()) throw DimensionError(std::string("Gradients::add: ") + what);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  add_t(conv1_kernels, other.conv1_kernels, "conv1 kernel grads");
  add_v(conv1_bias, other.conv1_bias, "conv1 bias grads");
  add_t(conv2_kernels, other.conv2_kernels, "conv2 kernel grads");
  add_v(conv2_bias, other.conv2_bias, "conv2 bias grads");
  add_t(fc1_weight, other.fc1_weight, "fc1 weight grads");
  add_v(fc1_bias, other.fc1_bias, "fc1 bias grads");
  add_t(fc2_weight, other.fc2_weight, "fc2 weight grads");
  add_v(fc2_bias, other.fc2_bias, "fc2 bias grads");
  embeddings.add(other.embeddings);
}

void Gradients::scale(double s) {
  for (double& v : conv1_kernels.data) v *= s;
  for (double& v : conv1_bias) v *= s;
  for (double& v : conv2_kernels.data) v *= s;
  for (double& v : conv2_bias) v *= s;
  for (double& v : fc1_weight.data) v *= s;
  for (double& v : fc1_bias) v *= s;
  for (double& v : fc2_weight.data) v *= s;
  for (double& v : fc2_bias) v *= s;
  embeddings.scale(s);
}

Gradients zero_gradients(const ModelParams& params) {
  Gradients g;
  g.conv1_kernels = zeros_like(params.conv1.kernels);
  g.conv1_bias.assign(params.conv1.bias.size(), 0.0);
  g.conv2_kernels = zeros_like(params.conv2.kernels);
  g.conv2_bias.assign(params.conv2.bias.size(), 0.0);
  g.fc1_weight = zeros_like(params.fc1.weight);
  g.fc1_bias.assign(params.fc1.bias.size(), 0.0);
  g.fc2_weight = zeros_like(params.fc2.weight);
  g.fc2_bias.assign(params.fc2.bias.size(), 0.0);
  return g;
}

Gradients model_backward_from_scores(const ForwardCache& cache,
                                     const std::array<double, 2>& grad_scores,
                                     const ModelParams& params, const ModelConfig& config) {
  if (!cache.training) {
    throw InputError("model_backward: cache was built in eval mode; run a training forward");
  }

  Gradients g;
  std::vector<double> gs = {grad_scores[0], grad_scores[1]};
  LinearGrads g2 = linear_backward(cache.drop.output.data, params.fc2, gs);
  g.fc2_weight = std::move(g2.weight);
  g.fc2_bias = std::move(g2.bias);

  // Dropout backward: same mask that scaled the forward survivors.
  std::vector<double> gh1 = std::move(g2.input);
  for (std::size_t i = 0; i < gh1.size(); ++i) gh1[i] *= cache.drop.mask[i];

  for (std::size_t i = 0; i < gh1.size(); ++i) {
    if (!(cache.u1[i] > 0.0)) gh1[i] = 0.0;  // relu subgradient, 0 at 0
  }

  LinearGrads g1 = linear_backward(cache.flat, params.fc1, gh1);
  g.fc1_weight = std::move(g1.weight);
  g.fc1_bias = std::move(g1.bias);

  Tensor grad_pool2(cache.pool2.output.shape);
  grad_pool2.data = std::move(g1.input);
  Tensor grad_a2 = max_pool_backward(cache.pool2.indices, grad_pool2);
  Tensor grad_z2 = relu_backward(cache.z2, grad_a2);

  ConvGrads c2 = conv2d_backward(cache.pool1.output, params.conv2, grad_z2, Padding::kSame);
  g.conv2_kernels = std::move(c2.kernels);
  g.conv2_bias = std::move(c2.bias);

  Tensor grad_a1 = max_pool_backward(cache.pool1.indices, c2.input);
  Tensor grad_z1 = relu_backward(cache.z1, grad_a1);

  ConvGrads c1 = conv2d_backward(cache.m, params.conv1, grad_z1, Padding::kSame);
  g.conv1_kernels = std::move(c1.kernels);
  g.conv1_bias = std::move(c1.bias);

  const EmbeddingTable* emb = params.embeddings ? &*params.embeddings : nullptr;
  g.embeddings = matching_matrix_backward(cache.a, cache.b, config.op, emb, c1.input);
  return g;
}

BackwardResult model_backward(const ForwardCache& cache, int label, const ModelParams& params,
                              const ModelConfig& config) {
  SoftmaxCeResult sm = softmax_cross_entropy(cache.scores, label);
  BackwardResult r;
  r.loss = sm.loss;
  r.probs = sm.probs;
  r.grads = model_backward_from_scores(cache, sm.grad_scores, params, config);
  return r;
}

std::array<double, 2> forward_scores(const TextPair& pair, const ModelParams& params,
                                     const ModelConfig& config) {
  return model_forward(pair, params, config, /*training=*/false, nullptr).scores;
}

int predict(const TextPair& pair, const ModelParams& params, const ModelConfig& config) {
  std::array<double, 2> s = forward_scores(pair, params, config);
  return s[1] >= s[0] ? 1 : 0;
}

}  // namespace mp
