#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mp/errors.hpp"
#include "mp/rng.hpp"
#include "mp/vocab.hpp"

namespace mp {

// A labeled pair before tokenization.
struct RawPair {
  std::string a;
  std::string b;
  int label = 0;
};

// kGeneric: label TAB text_a TAB text_b, no header.
// kMsrp: header line, then label TAB id TAB id TAB text_a TAB text_b.
enum class TsvSchema { kGeneric, kMsrp };

TsvSchema parse_tsv_schema(const std::string& name);

struct LineIssue {
  std::size_t line = 0;  // 1-based, counting the header
  std::string reason;
};

struct LoadReport {
  std::size_t data_lines = 0;
  std::size_t loaded = 0;
  std::vector<LineIssue> issues;  // malformed lines, skipped
};

// Missing or unreadable files are an IoError naming the path; malformed
// lines are skipped and recorded, not fatal.
std::vector<RawPair> load_pairs_tsv(const std::string& path, TsvSchema schema,
                                    LoadReport* report = nullptr);

// Generic schema. Tabs and newlines inside texts are flattened to spaces.
void write_pairs_tsv(const std::string& path, const std::vector<RawPair>& pairs);

// Lowercased ASCII, split on whitespace, leading/trailing punctuation
// stripped per token; tokens that were all punctuation disappear.
std::vector<std::string> tokenize(const std::string& text);

// First max_len tokens; 0 means no limit.
std::vector<std::string> truncate_tokens(std::vector<std::string> tokens, std::size_t max_len);

// Tokenized sides of every pair, for vocabulary building.
std::vector<std::vector<std::string>> tokenized_texts(const std::vector<RawPair>& pairs,
                                                      std::size_t max_len);

struct EncodeIssue {
  std::size_t index = 0;  // position in the raw vector
  std::string reason;
};

struct EncodeReport {
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::vector<EncodeIssue> issues;
};

// Tokenize, truncate, and encode; pairs with an empty side are dropped and
// recorded. Labels outside {0, 1} are dropped too.
std::vector<TextPair> encode_dataset(const std::vector<RawPair>& raw, const Vocabulary& vocab,
                                     std::size_t max_len, EncodeReport* report = nullptr);

template <typename T>
struct Splits {
  std::vector<T> train, val, test;
};

// Deterministic shuffled split. Fractions must be positive and sum to 1
// (within 1e-9); a fraction that rounds to an empty split is an error.
template <typename T>
Splits<T> split_dataset(const std::vector<T>& items, const std::array<double, 3>& fractions,
                        std::uint64_t seed) {
  double sum = fractions[0] + fractions[1] + fractions[2];
  if (!(fractions[0] > 0.0 && fractions[1] > 0.0 && fractions[2] > 0.0) ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split_dataset: fractions must be positive and sum to 1");
  }
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(seed, 0x5917u, items.size()));
  rng.shuffle(order);

  double n = static_cast<double>(items.size());
  std::size_t c1 = static_cast<std::size_t>(fractions[0] * n + 1e-9);
  std::size_t c2 = static_cast<std::size_t>((fractions[0] + fractions[1]) * n + 1e-9);
  if (c1 == 0 || c2 <= c1 || c2 >= items.size()) {
    throw ConfigError("split_dataset: a split would be empty for " + std::to_string(items.size()) +
                      " items");
  }
  Splits<T> out;
  for (std::size_t i = 0; i < c1; ++i) out.train.push_back(items[order[i]]);
  for (std::size_t i = c1; i < c2; ++i) out.val.push_back(items[order[i]]);
  for (std::size_t i = c2; i < items.size(); ++i) out.test.push_back(items[order[i]]);
  return out;
}

// Synthetic matching corpus with planted structure: every sentence mixes
// topic words (one topic per sentence, pools named t{k}w{i}) with shared
// fillers (fill{i}, Zipf-weighted). Positives pair sentences from the same
// topic and occasionally copy a short chunk across; negatives pair different
// topics. Labels are balanced 1 : neg_per_pos exactly.
struct CitationConfig {
  std::size_t n_positive = 2000;
  std::size_t neg_per_pos = 2;
  std::size_t n_topics = 10;
  std::size_t topic_pool = 40;  // words per topic
  std::size_t n_fillers = 60;
  std::size_t len_min = 8;
  std::size_t len_max = 14;
  double topic_prob = 0.55;   // chance a position draws a topic word
  double copy_prob = 0.25;    // chance a positive shares a copied chunk
  std::size_t copy_len = 3;
  std::uint64_t seed = 7;
  void validate() const;
};

struct SyntheticCorpus {
  std::vector<RawPair> pairs;
  std::vector<std::string> topic_tokens;
  std::vector<std::string> filler_tokens;
};

SyntheticCorpus generate_citation_corpus(const CitationConfig& cfg);

}  // namespace mp
