#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "mp/baselines.hpp"
#include "mp/errors.hpp"
#include "mp/rng.hpp"
#include "mp/vocab.hpp"

using namespace mp;

namespace {

Sentence sent(const Vocabulary& v, const std::vector<std::string>& toks) {
  return encode(v, toks);
}

// Accuracy of "positive iff score >= t" evaluated directly.
double acc_at(const std::vector<double>& scores, const std::vector<int>& labels, double t) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    int pred = scores[i] >= t ? 1 : 0;
    correct += (pred == labels[i]);
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(scores.size());
}

// Exhaustive sweep over a fine grid plus all interesting points.
double best_acc_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<double> cands;
  double lo = *std::min_element(scores.begin(), scores.end());
  double hi = *std::max_element(scores.begin(), scores.end());
  cands.push_back(lo - 1.0);
  cands.push_back(hi + 1.0);
  for (double s : scores) {
    cands.push_back(s);
    cands.push_back(s - 1e-9);
    cands.push_back(s + 1e-9);
  }
  double best = 0.0;
  for (double t : cands) best = std::max(best, acc_at(scores, labels, t));
  return best;
}

}  // namespace

TEST_CASE("accuracy and f1 basics") {
  MetricsReport perfect = accuracy_f1({1, 0, 1, 0}, {1, 0, 1, 0});
  CHECK(perfect.accuracy == 100.0);
  CHECK(perfect.f1 == 100.0);
  CHECK(perfect.tp == 2);
  CHECK(perfect.tn == 2);
  CHECK(perfect.fp == 0);
  CHECK(perfect.fn == 0);

  // All-negative predictions on a mixed set: no positives predicted, F1 = 0.
  MetricsReport allneg = accuracy_f1({1, 0, 1, 0}, {0, 0, 0, 0});
  CHECK(allneg.accuracy == 50.0);
  CHECK(allneg.f1 == 0.0);

  // No actual positives and none predicted: still 0, not NaN.
  MetricsReport nopos = accuracy_f1({0, 0}, {0, 0});
  CHECK(nopos.accuracy == 100.0);
  CHECK(nopos.f1 == 0.0);

  CHECK_THROWS_AS(accuracy_f1({1, 0}, {1}), InputError);
  CHECK_THROWS_AS(accuracy_f1({}, {}), InputError);
  CHECK_THROWS_AS(accuracy_f1({2, 0}, {1, 0}), InputError);
  CHECK_THROWS_AS(accuracy_f1({1, 0}, {1, 5}), InputError);
}

TEST_CASE("all-positive on a 66.5% positive set lands the known operating point") {
  // 1147 positives of 1725: accuracy 66.49%, F1 2p/(p+1) with p = 0.6649...
  std::vector<int> labels(1725, 0);
  for (std::size_t i = 0; i < 1147; ++i) labels[i] = 1;
  std::vector<int> preds = all_positive_predict(labels.size());
  REQUIRE(preds.size() == labels.size());
  for (int p : preds) CHECK(p == 1);

  MetricsReport r = accuracy_f1(labels, preds);
  CHECK(r.accuracy == doctest::Approx(66.50).epsilon(0.0002));
  CHECK(r.f1 == doctest::Approx(79.87).epsilon(0.0002));
  CHECK(r.tp == 1147);
  CHECK(r.fp == 578);
  CHECK(r.fn == 0);
}

TEST_CASE("accuracy_f1 agrees with a direct recount on random data") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + rng.uniform_int(1000);
    std::vector<int> labels(n), preds(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(rng.uniform_int(2));
      preds[i] = static_cast<int>(rng.uniform_int(2));
    }
    MetricsReport r = accuracy_f1(labels, preds);

    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == 1 && preds[i] == 1) ++tp;
      if (labels[i] == 0 && preds[i] == 1) ++fp;
      if (labels[i] == 0 && preds[i] == 0) ++tn;
      if (labels[i] == 1 && preds[i] == 0) ++fn;
    }
    CHECK(r.tp == tp);
    CHECK(r.fp == fp);
    CHECK(r.tn == tn);
    CHECK(r.fn == fn);
    double acc = 100.0 * static_cast<double>(tp + tn) / static_cast<double>(n);
    CHECK(r.accuracy == doctest::Approx(acc).epsilon(1e-12));
    double prec = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    double rec = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    double f1 = (prec + rec > 0.0) ? 100.0 * 2.0 * prec * rec / (prec + rec) : 0.0;
    CHECK(r.f1 == doctest::Approx(f1).epsilon(1e-12));
  }
}

TEST_CASE("idf smoothing") {
  Vocabulary v = build_vocab({{"common", "rare", "other"}}, 1);
  std::vector<TextPair> pairs = {
      {sent(v, {"common", "rare"}), sent(v, {"common"}), 1},
      {sent(v, {"common"}), sent(v, {"common", "other"}), 0},
  };
  TfIdfModel m = tfidf_fit(pairs);
  CHECK(m.n_docs == 4);  // each side of each pair is one document

  // A term in every document: ln((1+4)/(1+4)) + 1 = 1.
  CHECK(m.idf("common") == doctest::Approx(1.0).epsilon(1e-12));
  // A term in 1 of 4 documents: ln(5/2) + 1.
  CHECK(m.idf("rare") == doctest::Approx(std::log(2.5) + 1.0).epsilon(1e-12));
  // Unseen: df 0 gives the maximum, ln(1+N) + 1.
  CHECK(m.idf("nowhere") == doctest::Approx(std::log(5.0) + 1.0).epsilon(1e-12));

  // Repeats within one document count once toward df.
  TfIdfModel rep = tfidf_fit({{sent(v, {"rare", "rare", "rare"}), sent(v, {"common"}), 0}});
  CHECK(rep.df.at("rare") == 1);

  // df = 1 among 3 documents: ln(4/2) + 1 = 1.6931.
  TfIdfModel hand;
  hand.n_docs = 3;
  hand.df["x"] = 1;
  CHECK(hand.idf("x") == doctest::Approx(1.6931).epsilon(1e-4));
  CHECK(hand.idf("x") == doctest::Approx(std::log(2.0) + 1.0).epsilon(1e-12));
}

TEST_CASE("tfidf_score structure") {
  Vocabulary v = build_vocab({{"aa", "bb", "cc", "dd"}}, 1);
  std::vector<TextPair> pairs = {
      {sent(v, {"aa", "bb"}), sent(v, {"cc", "aa"}), 1},
      {sent(v, {"dd"}), sent(v, {"bb", "dd"}), 0},
  };
  TfIdfModel m = tfidf_fit(pairs);

  // Disjoint texts share no terms: score 0.
  CHECK(tfidf_score(m, sent(v, {"aa"}), sent(v, {"dd"})) == 0.0);

  // Identical texts: the squared norm, strictly positive.
  Sentence s = sent(v, {"aa", "bb", "aa"});
  double self = tfidf_score(m, s, s);
  double ia = m.idf("aa"), ib = m.idf("bb");
  CHECK(self == doctest::Approx(4.0 * ia * ia + ib * ib).epsilon(1e-12));
  CHECK(self > 0.0);

  // Symmetry.
  Sentence t = sent(v, {"bb", "cc"});
  CHECK(tfidf_score(m, s, t) == doctest::Approx(tfidf_score(m, t, s)).epsilon(1e-15));

  // Hand computation: s("aa bb aa") vs t("bb cc"): only "bb" overlaps,
  // tf 1 * tf 1 * idf(bb)^2.
  CHECK(tfidf_score(m, s, t) == doctest::Approx(ib * ib).epsilon(1e-12));

  // Unseen tokens still score via the max idf.
  Sentence u = sent(v, {"zz"});
  CHECK(tfidf_score(m, u, u) > 0.0);
}

TEST_CASE("tfidf_score equals a dense-vector oracle") {
  Rng rng(66);
  std::vector<std::string> words;
  for (int i = 0; i < 12; ++i) words.push_back("w" + std::to_string(i));
  Vocabulary v = build_vocab({words}, 1);

  auto random_sent = [&]() {
    std::vector<std::string> toks;
    std::size_t len = 1 + rng.uniform_int(8);
    for (std::size_t i = 0; i < len; ++i) toks.push_back(words[rng.uniform_int(words.size())]);
    return sent(v, toks);
  };

  std::vector<TextPair> pairs;
  for (int i = 0; i < 10; ++i) {
    pairs.push_back({random_sent(), random_sent(), static_cast<int>(rng.uniform_int(2))});
  }
  TfIdfModel m = tfidf_fit(pairs);

  for (int trial = 0; trial < 50; ++trial) {
    Sentence a = random_sent(), b = random_sent();
    // Dense oracle over the whole word list.
    double expect = 0.0;
    for (const std::string& w : words) {
      double tfa = static_cast<double>(std::count(a.tokens.begin(), a.tokens.end(), w));
      double tfb = static_cast<double>(std::count(b.tokens.begin(), b.tokens.end(), w));
      double i = m.idf(w);
      expect += (tfa * i) * (tfb * i);
    }
    CHECK(tfidf_score(m, a, b) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("select_threshold on cleanly separated scores") {
  std::vector<double> scores = {0.1, 0.2, 0.8, 0.9};
  std::vector<int> labels = {0, 0, 1, 1};
  ThresholdResult r = select_threshold(scores, labels);
  CHECK(r.train_accuracy == 100.0);
  CHECK(r.threshold > 0.2);
  CHECK(r.threshold <= 0.8);
  CHECK(r.threshold == doctest::Approx(0.5).epsilon(1e-12));  // midpoint
  CHECK(acc_at(scores, labels, r.threshold) == 100.0);
}

TEST_CASE("select_threshold with identical scores picks the majority class") {
  // All scores equal: either everything is positive (t <= s) or everything is
  // negative (t > s); the better side is the majority class.
  std::vector<double> scores = {3.0, 3.0, 3.0, 3.0, 3.0};

  ThresholdResult mostly_pos = select_threshold(scores, {1, 1, 1, 0, 0});
  CHECK(mostly_pos.train_accuracy == 60.0);
  CHECK(mostly_pos.threshold <= 3.0);  // predicts all positive

  ThresholdResult mostly_neg = select_threshold(scores, {1, 1, 0, 0, 0});
  CHECK(mostly_neg.train_accuracy == 60.0);
  CHECK(mostly_neg.threshold > 3.0);  // predicts all negative

  // Per-call sanity: the reported accuracy is achieved at the threshold.
  CHECK(acc_at(scores, {1, 1, 0, 0, 0}, mostly_neg.threshold) == 60.0);
}

TEST_CASE("select_threshold tie on accuracy goes to the lower threshold") {
  // Alternating labels: 50% at the bottom, the top, and every second
  // midpoint. The first candidate considered (min - 1) wins the tie.
  std::vector<double> scores = {1.0, 2.0, 3.0, 4.0};
  std::vector<int> labels = {1, 0, 1, 0};
  ThresholdResult r = select_threshold(scores, labels);
  CHECK(r.train_accuracy == 50.0);
  CHECK(r.threshold == 0.0);  // min - 1
}

TEST_CASE("select_threshold rejects degenerate inputs") {
  CHECK_THROWS_AS(select_threshold({}, {}), InputError);
  CHECK_THROWS_AS(select_threshold({1.0, 2.0}, {1}), InputError);
  CHECK_THROWS_AS(select_threshold({1.0, 2.0}, {1, 1}), InputError);
  CHECK_THROWS_AS(select_threshold({1.0, 2.0}, {0, 0}), InputError);
  CHECK_THROWS_AS(select_threshold({1.0, 2.0}, {0, 2}), InputError);
}

TEST_CASE("select_threshold matches an exhaustive oracle and beats majority") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 50;
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid so duplicate scores with conflicting labels occur often.
      scores[i] = static_cast<double>(rng.uniform_int(12)) / 3.0;
      labels[i] = (rng.uniform() < 0.4 + 0.2 * scores[i] / 4.0) ? 1 : 0;
      has0 = has0 || labels[i] == 0;
      has1 = has1 || labels[i] == 1;
    }
    if (!has0 || !has1) continue;

    ThresholdResult r = select_threshold(scores, labels);
    CHECK(r.train_accuracy == doctest::Approx(best_acc_oracle(scores, labels)).epsilon(1e-12));
    CHECK(acc_at(scores, labels, r.threshold) ==
          doctest::Approx(r.train_accuracy).epsilon(1e-12));

    // Never worse than predicting the majority class everywhere.
    std::size_t pos = 0;
    for (int l : labels) pos += (l == 1);
    double majority = 100.0 * static_cast<double>(std::max(pos, n - pos)) / static_cast<double>(n);
    CHECK(r.train_accuracy >= majority);
  }
}
