#include "mp/vocab.hpp"

#include <algorithm>
#include <map>

#include "mp/errors.hpp"

namespace mp {

Vocabulary::Vocabulary() {
  id_to_token = {kPadToken, kUnkToken};
  token_to_id = {{kPadToken, kPadId}, {kUnkToken, kUnkId}};
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id.find(token);
  return it == token_to_id.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id.count(token) > 0;
}

int Vocabulary::add(const std::string& token) {
  if (token_to_id.count(token)) throw InputError("vocabulary: duplicate token '" + token + "'");
  int id = static_cast<int>(id_to_token.size());
  id_to_token.push_back(token);
  token_to_id.emplace(token, id);
  return id;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus,
                       std::size_t min_count) {
  if (min_count < 1) throw ConfigError("build_vocab: min_count must be >= 1");
  std::map<std::string, std::size_t> counts;  // ordered: lexicographic tie-break for free
  std::size_t total = 0;
  for (const auto& seq : corpus) {
    for (const auto& tok : seq) {
      ++counts[tok];
      ++total;
    }
  }
  if (total == 0) throw InputError("build_vocab: empty corpus");

  std::vector<std::pair<std::string, std::size_t>> entries(counts.begin(), counts.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary vocab;
  for (const auto& [token, count] : entries) {
    if (count >= min_count) vocab.add(token);
  }
  return vocab;
}

Sentence encode(const Vocabulary& vocab, std::vector<std::string> tokens) {
  Sentence s;
  s.ids.reserve(tokens.size());
  for (const auto& tok : tokens) s.ids.push_back(vocab.id(tok));
  s.tokens = std::move(tokens);
  return s;
}

}  // namespace mp
