#include "mp/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mp/errors.hpp"

namespace mp {

double EmbeddingTable::row_norm(int id) const {
  const double* r = row(id);
  double acc = 0.0;
  for (std::size_t k = 0; k < dim; ++k) acc += r[k] * r[k];
  return std::sqrt(acc);
}

EmbeddingTable init_embeddings(const Vocabulary& vocab, std::size_t dim, Rng& rng) {
  if (dim < 1) throw ConfigError("init_embeddings: dim must be >= 1");
  EmbeddingTable table;
  table.dim = dim;
  table.matrix = Tensor({vocab.size(), dim}, 0.0);
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    if (static_cast<int>(id) == Vocabulary::kPadId) continue;
    double* r = &table.matrix.at2(id, 0);
    double norm = 0.0;
    do {
      for (std::size_t k = 0; k < dim; ++k) {
        r[k] = rng.gaussian();
        norm += r[k] * r[k];
      }
      norm = std::sqrt(norm);
    } while (norm == 0.0);
    double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
    for (std::size_t k = 0; k < dim; ++k) r[k] *= radius / norm;
  }
  return table;
}

NormReport embedding_norms(const EmbeddingTable& emb, const Vocabulary& vocab, std::size_t k) {
  if (emb.vocab_size() != vocab.size()) {
    throw DimensionError("embedding_norms: table rows " + std::to_string(emb.vocab_size()) +
                         " != vocabulary size " + std::to_string(vocab.size()));
  }
  std::vector<NormEntry> entries;
  for (std::size_t id = 2; id < vocab.size(); ++id) {
    entries.push_back({vocab.id_to_token[id], emb.row_norm(static_cast<int>(id))});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const NormEntry& a, const NormEntry& b) { return a.norm > b.norm; });
  NormReport report;
  std::size_t n = std::min(k, entries.size());
  report.top.assign(entries.begin(), entries.begin() + n);
  report.bottom.assign(entries.end() - n, entries.end());
  std::reverse(report.bottom.begin(), report.bottom.end());
  return report;
}

void write_embeddings_tsv(const std::string& path, const EmbeddingTable& emb,
                          const Vocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.precision(17);
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    out << vocab.id_to_token[id] << '\t' << emb.row_norm(static_cast<int>(id));
    const double* r = emb.row(static_cast<int>(id));
    for (std::size_t k = 0; k < emb.dim; ++k) out << '\t' << r[k];
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mp
