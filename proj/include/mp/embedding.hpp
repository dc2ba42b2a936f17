#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mp/rng.hpp"
#include "mp/tensor.hpp"
#include "mp/vocab.hpp"

namespace mp {

// Per-token real vectors, one row per vocabulary id. The PAD row is fixed at
// all zeros and excluded from updates.
struct EmbeddingTable {
  std::size_t dim = 0;
  Tensor matrix;  // [vocab_size, dim]

  std::size_t vocab_size() const { return matrix.rank() == 2 ? matrix.dim(0) : 0; }
  double* row(int id) { return &matrix.at2(static_cast<std::size_t>(id), 0); }
  const double* row(int id) const { return &matrix.at2(static_cast<std::size_t>(id), 0); }
  double row_norm(int id) const;
};

// Rows sampled uniformly from the L2 unit ball: direction uniform on the
// sphere, radius u^(1/dim). The PAD row stays zero.
EmbeddingTable init_embeddings(const Vocabulary& vocab, std::size_t dim, Rng& rng);

struct NormEntry {
  std::string token;
  double norm = 0.0;
};

struct NormReport {
  std::vector<NormEntry> top;     // largest norms first
  std::vector<NormEntry> bottom;  // smallest norms first
};

// Top-k and bottom-k corpus tokens by L2 norm. PAD and UNK are not corpus
// tokens and are excluded.
NormReport embedding_norms(const EmbeddingTable& emb, const Vocabulary& vocab, std::size_t k);

// One row per token: token TAB norm TAB v_1 TAB ... TAB v_dim.
void write_embeddings_tsv(const std::string& path, const EmbeddingTable& emb,
                          const Vocabulary& vocab);

}  // namespace mp
