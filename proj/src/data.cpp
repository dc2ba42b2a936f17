#include "mp/data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace mp {

TsvSchema parse_tsv_schema(const std::string& name) {
  if (name == "generic") return TsvSchema::kGeneric;
  if (name == "msrp") return TsvSchema::kMsrp;
  throw SchemaError("unknown tsv schema '" + name + "' (expected generic|msrp)");
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_label(const std::string& s, int* label) {
  if (s == "0") {
    *label = 0;
    return true;
  }
  if (s == "1") {
    *label = 1;
    return true;
  }
  return false;
}

}  // namespace

std::vector<RawPair> load_pairs_tsv(const std::string& path, TsvSchema schema,
                                    LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");

  LoadReport local;
  LoadReport& rep = report ? *report : local;
  std::vector<RawPair> pairs;

  std::size_t expected_cols = (schema == TsvSchema::kMsrp) ? 5 : 3;
  std::size_t text_a = (schema == TsvSchema::kMsrp) ? 3 : 1;
  std::size_t text_b = (schema == TsvSchema::kMsrp) ? 4 : 2;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (schema == TsvSchema::kMsrp && line_no == 1) continue;  // header
    if (line.empty()) continue;
    ++rep.data_lines;

    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != expected_cols) {
      rep.issues.push_back({line_no, "expected " + std::to_string(expected_cols) +
                                         " columns, got " + std::to_string(cols.size())});
      continue;
    }
    RawPair p;
    if (!parse_label(cols[0], &p.label)) {
      rep.issues.push_back({line_no, "label must be 0 or 1, got '" + cols[0] + "'"});
      continue;
    }
    p.a = cols[text_a];
    p.b = cols[text_b];
    pairs.push_back(std::move(p));
    ++rep.loaded;
  }
  return pairs;
}

void write_pairs_tsv(const std::string& path, const std::vector<RawPair>& pairs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  auto flat = [](std::string s) {
    for (char& c : s) {
      if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
  };
  for (const auto& p : pairs) {
    out << p.label << '\t' << flat(p.a) << '\t' << flat(p.b) << '\n';
  }
  if (!out) throw IoError("failed writing pairs to '" + path + "'");
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::size_t lo = i, hi = j;
      while (lo < hi && std::ispunct(static_cast<unsigned char>(text[lo]))) ++lo;
      while (hi > lo && std::ispunct(static_cast<unsigned char>(text[hi - 1]))) --hi;
      if (hi > lo) {
        std::string tok = text.substr(lo, hi - lo);
        for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        tokens.push_back(std::move(tok));
      }
    }
    i = j;
  }
  return tokens;
}

std::vector<std::string> truncate_tokens(std::vector<std::string> tokens, std::size_t max_len) {
  if (max_len > 0 && tokens.size() > max_len) tokens.resize(max_len);
  return tokens;
}

std::vector<std::vector<std::string>> tokenized_texts(const std::vector<RawPair>& pairs,
                                                      std::size_t max_len) {
  std::vector<std::vector<std::string>> texts;
  texts.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    texts.push_back(truncate_tokens(tokenize(p.a), max_len));
    texts.push_back(truncate_tokens(tokenize(p.b), max_len));
  }
  return texts;
}

std::vector<TextPair> encode_dataset(const std::vector<RawPair>& raw, const Vocabulary& vocab,
                                     std::size_t max_len, EncodeReport* report) {
  EncodeReport local;
  EncodeReport& rep = report ? *report : local;
  std::vector<TextPair> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawPair& p = raw[i];
    if (p.label != 0 && p.label != 1) {
      rep.issues.push_back({i, "label must be 0 or 1"});
      ++rep.dropped;
      continue;
    }
    auto ta = truncate_tokens(tokenize(p.a), max_len);
    auto tb = truncate_tokens(tokenize(p.b), max_len);
    if (ta.empty() || tb.empty()) {
      rep.issues.push_back({i, std::string("no tokens in text ") + (ta.empty() ? "a" : "b")});
      ++rep.dropped;
      continue;
    }
    TextPair tp;
    tp.a = encode(vocab, std::move(ta));
    tp.b = encode(vocab, std::move(tb));
    tp.label = p.label;
    out.push_back(std::move(tp));
    ++rep.kept;
  }
  return out;
}

void CitationConfig::validate() const {
  if (n_positive == 0) throw ConfigError("citation corpus: n_positive must be positive");
  if (neg_per_pos == 0) throw ConfigError("citation corpus: neg_per_pos must be positive");
  if (n_topics < 2) throw ConfigError("citation corpus: need at least 2 topics");
  if (topic_pool == 0) throw ConfigError("citation corpus: topic_pool must be positive");
  if (n_fillers == 0) throw ConfigError("citation corpus: n_fillers must be positive");
  if (len_min == 0 || len_max < len_min) {
    throw ConfigError("citation corpus: need 1 <= len_min <= len_max");
  }
  if (!(topic_prob > 0.0 && topic_prob < 1.0)) {
    throw ConfigError("citation corpus: topic_prob must be in (0, 1)");
  }
  if (!(copy_prob >= 0.0 && copy_prob <= 1.0)) {
    throw ConfigError("citation corpus: copy_prob must be in [0, 1]");
  }
  if (copy_len == 0) throw ConfigError("citation corpus: copy_len must be positive");
}

namespace {

// rank r gets weight 1/(r+1): a few very common fillers, a long tail.
std::size_t zipf_pick(const std::vector<double>& cdf, Rng& rng) {
  double u = rng.uniform() * cdf.back();
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

SyntheticCorpus generate_citation_corpus(const CitationConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.seed, 0xC17E, cfg.n_positive));

  SyntheticCorpus corpus;
  std::vector<std::vector<std::string>> topics(cfg.n_topics);
  for (std::size_t k = 0; k < cfg.n_topics; ++k) {
    for (std::size_t i = 0; i < cfg.topic_pool; ++i) {
      topics[k].push_back("t" + std::to_string(k) + "w" + std::to_string(i));
      corpus.topic_tokens.push_back(topics[k].back());
    }
  }
  for (std::size_t i = 0; i < cfg.n_fillers; ++i) {
    corpus.filler_tokens.push_back("fill" + std::to_string(i));
  }
  std::vector<double> filler_cdf(cfg.n_fillers);
  double acc = 0.0;
  for (std::size_t i = 0; i < cfg.n_fillers; ++i) {
    acc += 1.0 / static_cast<double>(i + 1);
    filler_cdf[i] = acc;
  }

  auto sentence = [&](std::size_t topic) {
    std::size_t len = cfg.len_min + static_cast<std::size_t>(
                                        rng.uniform_int(cfg.len_max - cfg.len_min + 1));
    std::vector<std::string> words;
    words.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      if (rng.uniform() < cfg.topic_prob) {
        words.push_back(topics[topic][rng.uniform_int(cfg.topic_pool)]);
      } else {
        words.push_back(corpus.filler_tokens[zipf_pick(filler_cdf, rng)]);
      }
    }
    return words;
  };
  auto join = [](const std::vector<std::string>& words) {
    std::string s;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) s += ' ';
      s += words[i];
    }
    return s;
  };

  for (std::size_t p = 0; p < cfg.n_positive; ++p) {
    std::size_t k = rng.uniform_int(cfg.n_topics);
    std::vector<std::string> a = sentence(k);
    std::vector<std::string> b = sentence(k);
    if (rng.uniform() < cfg.copy_prob && a.size() >= cfg.copy_len && b.size() >= cfg.copy_len) {
      std::size_t src = rng.uniform_int(a.size() - cfg.copy_len + 1);
      std::size_t dst = rng.uniform_int(b.size() - cfg.copy_len + 1);
      for (std::size_t i = 0; i < cfg.copy_len; ++i) b[dst + i] = a[src + i];
    }
    corpus.pairs.push_back({join(a), join(b), 1});

    for (std::size_t q = 0; q < cfg.neg_per_pos; ++q) {
      std::size_t k1 = rng.uniform_int(cfg.n_topics);
      std::size_t k2 = (k1 + 1 + rng.uniform_int(cfg.n_topics - 1)) % cfg.n_topics;
      corpus.pairs.push_back({join(sentence(k1)), join(sentence(k2)), 0});
    }
  }
  rng.shuffle(corpus.pairs);
  return corpus;
}

}  // namespace mp
