#include "mp/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "mp/baselines.hpp"
#include "mp/errors.hpp"

namespace mp {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("train config: batch_size must be positive");
  // lr = 0 is allowed: a no-op trainer is still a valid (if useless) config.
  if (!(learning_rate >= 0.0)) {
    throw ConfigError("train config: learning_rate must be non-negative");
  }
  if (adagrad_epsilon < 0.0) {
    throw ConfigError("train config: adagrad_epsilon must be non-negative");
  }
  if (max_epochs == 0) throw ConfigError("train config: max_epochs must be positive");
  if (patience == 0) throw ConfigError("train config: patience must be positive");
  if (workers == 0) throw ConfigError("train config: workers must be positive");
}

AdagradState init_adagrad(const ModelParams& params) {
  AdagradState s;
  s.conv1_kernels = zeros_like(params.conv1.kernels);
  s.conv1_bias.assign(params.conv1.bias.size(), 0.0);
  s.conv2_kernels = zeros_like(params.conv2.kernels);
  s.conv2_bias.assign(params.conv2.bias.size(), 0.0);
  s.fc1_weight = zeros_like(params.fc1.weight);
  s.fc1_bias.assign(params.fc1.bias.size(), 0.0);
  s.fc2_weight = zeros_like(params.fc2.weight);
  s.fc2_bias.assign(params.fc2.bias.size(), 0.0);
  if (params.embeddings) s.embeddings = zeros_like(params.embeddings->matrix);
  return s;
}

void adagrad_step(double* values, double* state, const double* grads, std::size_t count,
                  double lr, double eps) {
  for (std::size_t i = 0; i < count; ++i) {
    double g = grads[i];
    if (g == 0.0) continue;  // avoids 0/0 when eps is 0 and the state is empty
    state[i] += g * g;
    values[i] -= lr * g / (std::sqrt(state[i]) + eps);
  }
}

void adagrad_update(ModelParams& params, AdagradState& state, const Gradients& grads, double lr,
                    double eps) {
  adagrad_step(params.conv1.kernels.data.data(), state.conv1_kernels.data.data(),
               grads.conv1_kernels.data.data(), grads.conv1_kernels.size(), lr, eps);
  adagrad_step(params.conv1.bias.data(), state.conv1_bias.data(), grads.conv1_bias.data(),
               grads.conv1_bias.size(), lr, eps);
  adagrad_step(params.conv2.kernels.data.data(), state.conv2_kernels.data.data(),
               grads.conv2_kernels.data.data(), grads.conv2_kernels.size(), lr, eps);
  adagrad_step(params.conv2.bias.data(), state.conv2_bias.data(), grads.conv2_bias.data(),
               grads.conv2_bias.size(), lr, eps);
  adagrad_step(params.fc1.weight.data.data(), state.fc1_weight.data.data(),
               grads.fc1_weight.data.data(), grads.fc1_weight.size(), lr, eps);
  adagrad_step(params.fc1.bias.data(), state.fc1_bias.data(), grads.fc1_bias.data(),
               grads.fc1_bias.size(), lr, eps);
  adagrad_step(params.fc2.weight.data.data(), state.fc2_weight.data.data(),
               grads.fc2_weight.data.data(), grads.fc2_weight.size(), lr, eps);
  adagrad_step(params.fc2.bias.data(), state.fc2_bias.data(), grads.fc2_bias.data(),
               grads.fc2_bias.size(), lr, eps);

  if (!grads.embeddings.empty()) {
    if (!params.embeddings) {
      throw ConfigError("adagrad_update: embedding gradients without an embedding table");
    }
    std::size_t dim = params.embeddings->dim;
    for (const auto& [id, row] : grads.embeddings.rows) {
      if (id == Vocabulary::kPadId) continue;  // PAD stays zero
      adagrad_step(params.embeddings->row(id),
                   &state.embeddings.at2(static_cast<std::size_t>(id), 0), row.data(), dim, lr,
                   eps);
    }
  }
}

bool early_stop_check(const std::vector<double>& val_accuracy_history, std::size_t patience) {
  if (patience == 0) throw ConfigError("early_stop_check: patience must be positive");
  if (val_accuracy_history.empty()) return false;
  std::size_t best = 0;
  for (std::size_t i = 1; i < val_accuracy_history.size(); ++i) {
    if (val_accuracy_history[i] > val_accuracy_history[best]) best = i;
  }
  return (val_accuracy_history.size() - 1) - best >= patience;
}

std::vector<int> predict_all(const std::vector<TextPair>& pairs, const ModelParams& params,
                             const ModelConfig& config) {
  std::vector<int> preds;
  preds.reserve(pairs.size());
  for (const auto& p : pairs) preds.push_back(predict(p, params, config));
  return preds;
}

namespace {

bool grads_finite(const Gradients& g) {
  auto vec_ok = [](const std::vector<double>& v) {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  };
  if (!g.conv1_kernels.all_finite() || !vec_ok(g.conv1_bias)) return false;
  if (!g.conv2_kernels.all_finite() || !vec_ok(g.conv2_bias)) return false;
  if (!g.fc1_weight.all_finite() || !vec_ok(g.fc1_bias)) return false;
  if (!g.fc2_weight.all_finite() || !vec_ok(g.fc2_bias)) return false;
  for (const auto& [id, row] : g.embeddings.rows) {
    if (!vec_ok(row)) return false;
  }
  return true;
}

}  // namespace

TrainResult train(const std::vector<TextPair>& train_set, const std::vector<TextPair>& val_set,
                  const ModelConfig& mconfig, const TrainConfig& tconfig, const Vocabulary& vocab,
                  const EpochCallback& on_epoch) {
  mconfig.validate();
  tconfig.validate();
  if (train_set.empty()) throw InputError("train: empty training set");
  if (val_set.empty()) throw InputError("train: empty validation set");

  Rng init_rng(mix_seed(tconfig.seed, 0, 0));
  TrainResult result;
  result.params = init_params(mconfig, vocab, init_rng);
  result.best_params = result.params;
  AdagradState opt = init_adagrad(result.params);

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> acc_history;
  std::vector<int> val_labels;
  val_labels.reserve(val_set.size());
  for (const auto& p : val_set) val_labels.push_back(p.label);

  for (std::size_t epoch = 1; epoch <= tconfig.max_epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    Rng shuffle_rng(mix_seed(tconfig.seed, epoch, ~std::uint64_t{0}));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += tconfig.batch_size, ++batch_index) {
      std::size_t count = std::min(tconfig.batch_size, order.size() - start);
      std::vector<BackwardResult> results(count);

      // Workers own disjoint slots; the math for slot p depends only on
      // (params, example, seed, epoch, start + p), so any worker count
      // produces the same per-slot values.
      std::size_t n_workers = std::min(tconfig.workers, count);
      std::vector<std::exception_ptr> errors(n_workers);
      auto run_slice = [&](std::size_t w) {
        try {
          for (std::size_t p = w; p < count; p += n_workers) {
            const TextPair& ex = train_set[order[start + p]];
            Rng ex_rng(mix_seed(tconfig.seed, epoch, start + p));
            ForwardCache cache =
                model_forward(ex, result.params, mconfig, /*training=*/true, &ex_rng);
            results[p] = model_backward(cache, ex.label, result.params, mconfig);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      };
      if (n_workers == 1) {
        run_slice(0);
      } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(run_slice, w);
        for (auto& t : threads) t.join();
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }

      // Ordered reduction: slot 0 first, always, regardless of worker count.
      Gradients batch = zero_gradients(result.params);
      double batch_loss = 0.0;
      for (std::size_t p = 0; p < count; ++p) {
        batch_loss += results[p].loss;
        batch.add(results[p].grads);
      }
      if (!std::isfinite(batch_loss) || !grads_finite(batch)) {
        throw DivergenceError("training diverged: non-finite loss or gradient in batch " +
                              std::to_string(batch_index) + " of epoch " + std::to_string(epoch));
      }
      loss_sum += batch_loss;
      batch.scale(1.0 / static_cast<double>(count));
      adagrad_update(result.params, opt, batch, tconfig.learning_rate, tconfig.adagrad_epsilon);
    }

    std::vector<int> preds = predict_all(val_set, result.params, mconfig);
    MetricsReport metrics = accuracy_f1(val_labels, preds);
    auto t1 = std::chrono::steady_clock::now();

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.val_accuracy = metrics.accuracy;
    rec.val_f1 = metrics.f1;
    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
    result.history.push_back(rec);
    acc_history.push_back(metrics.accuracy);

    if (result.best_epoch == 0 || metrics.accuracy > result.best_val_accuracy) {
      result.best_epoch = epoch;
      result.best_val_accuracy = metrics.accuracy;
      result.best_params = result.params;
    }
    if (on_epoch) on_epoch(rec);

    if (early_stop_check(acc_history, tconfig.patience)) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace mp
