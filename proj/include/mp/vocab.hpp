#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace mp {

// Token <-> id map with reserved PAD and UNK slots. Regular ids are assigned
// by frequency (descending), ties broken lexicographically, so two builds of
// the same corpus agree exactly.
struct Vocabulary {
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  std::unordered_map<std::string, int> token_to_id;
  std::vector<std::string> id_to_token;

  Vocabulary();

  // UNK for out-of-vocabulary tokens.
  int id(const std::string& token) const;
  bool contains(const std::string& token) const;
  std::size_t size() const { return id_to_token.size(); }

  // Appends a regular token; returns its id. Rejects duplicates.
  int add(const std::string& token);
};

// min_count >= 1; tokens below the threshold map to UNK. An empty corpus is
// an error.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus,
                       std::size_t min_count);

// A tokenized text with both surface forms and vocabulary ids.
// The indicator operator compares surfaces; embedding operators use ids.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<int> ids;

  std::size_t length() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

Sentence encode(const Vocabulary& vocab, std::vector<std::string> tokens);

struct TextPair {
  Sentence a;
  Sentence b;
  int label = 0;  // binary
};

}  // namespace mp
