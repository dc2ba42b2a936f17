#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mp/vocab.hpp"

namespace mp {

// Binary-classification metrics; accuracy and F1 are percentages. F1 is for
// the positive class; empty denominators (no predicted or no actual
// positives) give precision/recall of 0 rather than NaN.
struct MetricsReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> threshold;
};

MetricsReport accuracy_f1(const std::vector<int>& labels, const std::vector<int>& preds);

// Majority-positive baseline: predicts 1 for everything.
std::vector<int> all_positive_predict(std::size_t n);

// Both texts of every pair count as documents.
struct TfIdfModel {
  std::unordered_map<std::string, std::size_t> df;
  std::size_t n_docs = 0;

  // Smoothed: ln((1 + N) / (1 + df)) + 1. Unseen terms get the max idf.
  double idf(const std::string& term) const;
};

TfIdfModel tfidf_fit(const std::vector<TextPair>& pairs);

// Inner product of raw-count tf-idf vectors.
double tfidf_score(const TfIdfModel& model, const Sentence& a, const Sentence& b);

struct ThresholdResult {
  double threshold = 0.0;
  double train_accuracy = 0.0;  // percent
};

// Threshold maximizing accuracy of "positive iff score >= t". Candidates are
// (min - 1), the midpoints between adjacent distinct scores, and (max + 1),
// scanned in ascending order keeping only strict improvements, so ties go to
// the lowest threshold. All-one-class labels leave nothing to separate and
// are an error.
ThresholdResult select_threshold(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace mp
