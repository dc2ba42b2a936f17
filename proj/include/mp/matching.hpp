#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mp/embedding.hpp"
#include "mp/tensor.hpp"
#include "mp/vocab.hpp"

namespace mp {

enum class MatchOperator { kIndicator, kCosine, kDotProduct };

const char* to_string(MatchOperator op);
// Accepts "indicator"/"ind", "cosine"/"cos", "dot".
MatchOperator parse_match_operator(const std::string& name);

// Sparse per-row embedding gradients, kept sorted by id.
struct EmbeddingRowGrads {
  std::vector<std::pair<int, std::vector<double>>> rows;

  bool empty() const { return rows.empty(); }
  // Elementwise merge of another sorted row set into this one.
  void add(const EmbeddingRowGrads& other);
  void scale(double s);
  const std::vector<double>* find(int id) const;
};

// The word-by-word similarity image M, shape [1, len(a), len(b)], rows
// indexed by text a. Indicator compares surface tokens (so distinct
// UNK-mapped words do not spuriously match); cosine and dot read embedding
// rows by id. Cosine with a zero-norm vector yields 0, not NaN.
Tensor matching_matrix(const Sentence& a, const Sentence& b, MatchOperator op,
                       const EmbeddingTable* emb);

// Adjoint of matching_matrix with respect to the embedding table: given
// d(loss)/dM, accumulates gradients into the rows touched by the pair.
// Indicator has no embedding parameters and returns an empty set.
EmbeddingRowGrads matching_matrix_backward(const Sentence& a, const Sentence& b, MatchOperator op,
                                           const EmbeddingTable* emb, const Tensor& grad_m);

}  // namespace mp
