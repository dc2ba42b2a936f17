#include "mp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mp/errors.hpp"

namespace mp {

MetricsReport accuracy_f1(const std::vector<int>& labels, const std::vector<int>& preds) {
  if (labels.empty()) throw InputError("accuracy_f1: no examples");
  if (labels.size() != preds.size()) {
    throw InputError("accuracy_f1: " + std::to_string(labels.size()) + " labels vs " +
                     std::to_string(preds.size()) + " predictions");
  }
  MetricsReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int y = labels[i], p = preds[i];
    if ((y != 0 && y != 1) || (p != 0 && p != 1)) {
      throw InputError("accuracy_f1: labels and predictions must be 0 or 1");
    }
    if (y == 1 && p == 1) ++r.tp;
    else if (y == 0 && p == 1) ++r.fp;
    else if (y == 0 && p == 0) ++r.tn;
    else ++r.fn;
  }
  double n = static_cast<double>(labels.size());
  r.accuracy = 100.0 * static_cast<double>(r.tp + r.tn) / n;
  double prec = (r.tp + r.fp) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  double rec = (r.tp + r.fn) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f1 = (prec + rec > 0.0) ? 100.0 * 2.0 * prec * rec / (prec + rec) : 0.0;
  return r;
}

std::vector<int> all_positive_predict(std::size_t n) { return std::vector<int>(n, 1); }

double TfIdfModel::idf(const std::string& term) const {
  auto it = df.find(term);
  std::size_t d = (it == df.end()) ? 0 : it->second;
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(d))) + 1.0;
}

TfIdfModel tfidf_fit(const std::vector<TextPair>& pairs) {
  if (pairs.empty()) throw InputError("tfidf_fit: no documents");
  TfIdfModel m;
  auto add_doc = [&](const Sentence& s) {
    std::set<std::string> uniq(s.tokens.begin(), s.tokens.end());
    for (const auto& t : uniq) ++m.df[t];
    ++m.n_docs;
  };
  for (const auto& p : pairs) {
    add_doc(p.a);
    add_doc(p.b);
  }
  return m;
}

double tfidf_score(const TfIdfModel& model, const Sentence& a, const Sentence& b) {
  std::map<std::string, double> tf_a;  // ordered so the sum order is fixed
  for (const auto& t : a.tokens) tf_a[t] += 1.0;
  std::map<std::string, double> tf_b;
  for (const auto& t : b.tokens) tf_b[t] += 1.0;
  double score = 0.0;
  for (const auto& [term, ca] : tf_a) {
    auto it = tf_b.find(term);
    if (it == tf_b.end()) continue;
    double w = model.idf(term);
    score += (ca * w) * (it->second * w);
  }
  return score;
}

ThresholdResult select_threshold(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
  if (scores.empty() || scores.size() != labels.size()) {
    throw InputError("select_threshold: scores and labels must be non-empty and equal-length");
  }
  std::size_t n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw InputError("select_threshold: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(y);
  }
  if (n_pos == 0 || n_pos == labels.size()) {
    throw InputError("select_threshold: needs both classes in the labels");
  }

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return scores[x] < scores[y];
  });

  // Sweep candidates in ascending order. Below the minimum everything is
  // predicted positive; each group of equal scores crossed flips to negative.
  std::size_t correct = n_pos;
  double best_acc = 0.0;
  ThresholdResult best{scores[order[0]] - 1.0, 0.0};
  auto consider = [&](double threshold) {
    double acc = 100.0 * static_cast<double>(correct) / static_cast<double>(scores.size());
    if (acc > best_acc) {
      best_acc = acc;
      best = {threshold, acc};
    }
  };
  consider(scores[order[0]] - 1.0);
  std::size_t i = 0;
  while (i < order.size()) {
    double s = scores[order[i]];
    std::size_t j = i;
    long delta = 0;
    for (; j < order.size() && scores[order[j]] == s; ++j) {
      delta += (labels[order[j]] == 0) ? 1 : -1;
    }
    correct = static_cast<std::size_t>(static_cast<long>(correct) + delta);
    double next = (j < order.size()) ? (s + scores[order[j]]) / 2.0 : s + 1.0;
    consider(next);
    i = j;
  }
  return best;
}

}  // namespace mp
