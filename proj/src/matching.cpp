#include "mp/matching.hpp"

#include <cmath>
#include <map>

#include "mp/errors.hpp"

namespace mp {

const char* to_string(MatchOperator op) {
  switch (op) {
    case MatchOperator::kIndicator: return "indicator";
    case MatchOperator::kCosine: return "cosine";
    case MatchOperator::kDotProduct: return "dot";
  }
  return "?";
}

MatchOperator parse_match_operator(const std::string& name) {
  if (name == "indicator" || name == "ind") return MatchOperator::kIndicator;
  if (name == "cosine" || name == "cos") return MatchOperator::kCosine;
  if (name == "dot" || name == "dotproduct" || name == "dot_product") {
    return MatchOperator::kDotProduct;
  }
  throw ConfigError("unknown match operator '" + name + "' (expected indicator|cosine|dot)");
}

void EmbeddingRowGrads::add(const EmbeddingRowGrads& other) {
  std::vector<std::pair<int, std::vector<double>>> merged;
  merged.reserve(rows.size() + other.rows.size());
  std::size_t i = 0, j = 0;
  while (i < rows.size() || j < other.rows.size()) {
    if (j == other.rows.size() || (i < rows.size() && rows[i].first < other.rows[j].first)) {
      merged.push_back(std::move(rows[i++]));
    } else if (i == rows.size() || other.rows[j].first < rows[i].first) {
      merged.push_back(other.rows[j++]);
    } else {
      auto row = std::move(rows[i++]);
      const auto& add_row = other.rows[j++].second;
      for (std::size_t k = 0; k < row.second.size(); ++k) row.second[k] += add_row[k];
      merged.push_back(std::move(row));
    }
  }
  rows = std::move(merged);
}

void EmbeddingRowGrads::scale(double s) {
  for (auto& [id, row] : rows) {
    for (double& v : row) v *= s;
  }
}

const std::vector<double>* EmbeddingRowGrads::find(int id) const {
  for (const auto& [rid, row] : rows) {
    if (rid == id) return &row;
  }
  return nullptr;
}

namespace {

void require_embeddings(MatchOperator op, const EmbeddingTable* emb) {
  if (op != MatchOperator::kIndicator && (emb == nullptr || emb->dim == 0)) {
    throw ConfigError(std::string("matching_matrix: operator '") + to_string(op) +
                      "' requires an embedding table");
  }
}

void require_non_empty(const Sentence& a, const Sentence& b) {
  if (a.empty() || b.empty()) {
    throw InputError("matching_matrix: both texts must be non-empty");
  }
}

}  // namespace

Tensor matching_matrix(const Sentence& a, const Sentence& b, MatchOperator op,
                       const EmbeddingTable* emb) {
  require_non_empty(a, b);
  require_embeddings(op, emb);
  std::size_t m = a.length(), n = b.length();
  Tensor out({1, m, n});

  switch (op) {
    case MatchOperator::kIndicator:
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          out.at3(0, i, j) = (a.tokens[i] == b.tokens[j]) ? 1.0 : 0.0;
        }
      }
      break;
    case MatchOperator::kDotProduct:
      for (std::size_t i = 0; i < m; ++i) {
        const double* va = emb->row(a.ids[i]);
        for (std::size_t j = 0; j < n; ++j) {
          const double* vb = emb->row(b.ids[j]);
          double acc = 0.0;
          for (std::size_t k = 0; k < emb->dim; ++k) acc += va[k] * vb[k];
          out.at3(0, i, j) = acc;
        }
      }
      break;
    case MatchOperator::kCosine:
      for (std::size_t i = 0; i < m; ++i) {
        const double* va = emb->row(a.ids[i]);
        double na = emb->row_norm(a.ids[i]);
        for (std::size_t j = 0; j < n; ++j) {
          const double* vb = emb->row(b.ids[j]);
          double nb = emb->row_norm(b.ids[j]);
          if (na == 0.0 || nb == 0.0) {
            out.at3(0, i, j) = 0.0;  // zero-norm rows (PAD) are neutral
            continue;
          }
          double acc = 0.0;
          for (std::size_t k = 0; k < emb->dim; ++k) acc += va[k] * vb[k];
          out.at3(0, i, j) = acc / (na * nb);
        }
      }
      break;
  }
  return out;
}

EmbeddingRowGrads matching_matrix_backward(const Sentence& a, const Sentence& b, MatchOperator op,
                                           const EmbeddingTable* emb, const Tensor& grad_m) {
  require_non_empty(a, b);
  if (op == MatchOperator::kIndicator) return {};
  require_embeddings(op, emb);
  std::size_t m = a.length(), n = b.length();
  if (grad_m.shape != std::vector<std::size_t>{1, m, n}) {
    throw DimensionError("matching_matrix_backward: grad shape " + grad_m.shape_str() +
                         " does not match pair lengths " + std::to_string(m) + "x" +
                         std::to_string(n));
  }
  std::size_t dim = emb->dim;
  std::map<int, std::vector<double>> acc;  // ordered by id
  auto row_of = [&](int id) -> std::vector<double>& {
    auto it = acc.find(id);
    if (it == acc.end()) it = acc.emplace(id, std::vector<double>(dim, 0.0)).first;
    return it->second;
  };

  for (std::size_t i = 0; i < m; ++i) {
    const double* va = emb->row(a.ids[i]);
    double na = (op == MatchOperator::kCosine) ? emb->row_norm(a.ids[i]) : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double g = grad_m.at3(0, i, j);
      if (g == 0.0) continue;
      const double* vb = emb->row(b.ids[j]);
      std::vector<double>& ga = row_of(a.ids[i]);
      std::vector<double>& gb = row_of(b.ids[j]);
      if (op == MatchOperator::kDotProduct) {
        for (std::size_t k = 0; k < dim; ++k) {
          ga[k] += g * vb[k];
          gb[k] += g * va[k];
        }
      } else {
        double nb = emb->row_norm(b.ids[j]);
        if (na == 0.0 || nb == 0.0) continue;  // similarity pinned to 0
        double dot = 0.0;
        for (std::size_t k = 0; k < dim; ++k) dot += va[k] * vb[k];
        double s = dot / (na * nb);
        // d s / d va = (vb/nb - s * va/na) / na, symmetric for vb.
        for (std::size_t k = 0; k < dim; ++k) {
          ga[k] += g * (vb[k] / nb - s * va[k] / na) / na;
          gb[k] += g * (va[k] / na - s * vb[k] / nb) / nb;
        }
      }
    }
  }

  EmbeddingRowGrads grads;
  grads.rows.reserve(acc.size());
  for (auto& [id, row] : acc) grads.rows.emplace_back(id, std::move(row));
  return grads;
}

}  // namespace mp
