#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "mp/model.hpp"
#include "mp/tensor.hpp"
#include "mp/vocab.hpp"

namespace mp {

struct TrainConfig {
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  double adagrad_epsilon = 1e-8;
  std::size_t max_epochs = 20;
  std::size_t patience = 5;  // epochs without a new best before stopping
  std::uint64_t seed = 42;
  std::size_t workers = 1;
  void validate() const;
};

// Accumulated squared gradients, one slot per dense parameter. The embedding
// slot covers the whole table even though updates arrive as sparse rows.
struct AdagradState {
  Tensor conv1_kernels;
  std::vector<double> conv1_bias;
  Tensor conv2_kernels;
  std::vector<double> conv2_bias;
  Tensor fc1_weight;
  std::vector<double> fc1_bias;
  Tensor fc2_weight;
  std::vector<double> fc2_bias;
  Tensor embeddings;  // [vocab, dim]; empty for the indicator operator
};

AdagradState init_adagrad(const ModelParams& params);

// state += g^2; value -= lr * g / (sqrt(state) + eps), elementwise.
void adagrad_step(double* values, double* state, const double* grads, std::size_t count,
                  double lr, double eps);

// Applies the rule to every layer; embedding rows are updated sparsely and
// the PAD row is never touched.
void adagrad_update(ModelParams& params, AdagradState& state, const Gradients& grads, double lr,
                    double eps);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_accuracy = 0.0;  // percent
  double val_f1 = 0.0;        // percent
  double seconds = 0.0;
};

// Stop once the latest epoch is `patience` or more epochs past the best one
// (earliest maximum). A flat stretch of patience epochs after the best
// therefore triggers the stop.
bool early_stop_check(const std::vector<double>& val_accuracy_history, std::size_t patience);

struct TrainResult {
  ModelParams params;       // parameters after the last epoch
  ModelParams best_params;  // snapshot at the best validation accuracy
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based
  double best_val_accuracy = 0.0;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Minibatch Adagrad with batch-mean gradients. Examples are reshuffled every
// epoch; each example's dropout stream is seeded from (seed, epoch, position
// in the shuffled order) and per-example gradients are reduced in that order,
// so the result is byte-identical for any worker count. A non-finite loss
// aborts with a DivergenceError naming the batch.
TrainResult train(const std::vector<TextPair>& train_set, const std::vector<TextPair>& val_set,
                  const ModelConfig& mconfig, const TrainConfig& tconfig, const Vocabulary& vocab,
                  const EpochCallback& on_epoch = {});

// Eval-mode predictions for a whole dataset.
std::vector<int> predict_all(const std::vector<TextPair>& pairs, const ModelParams& params,
                             const ModelConfig& config);

}  // namespace mp
