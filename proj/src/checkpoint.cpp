#include "mp/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <utility>

#include "mp/errors.hpp"

namespace mp {

namespace {

class Writer {
 public:
  std::vector<unsigned char> bytes;

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes.insert(bytes.end(), s.begin(), s.end());
  }
  void tensor(const std::string& name, const Tensor& t) {
    str(name);
    u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape) u64(d);
    for (double v : t.data) f64(v);
  }
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  std::size_t offset() const { return off_; }
  bool done() const { return off_ == bytes_.size(); }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[off_ + i]) << (8 * i);
    off_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[off_ + i]) << (8 * i);
    off_ += 8;
    return v;
  }
  double f64(const char* what) {
    std::uint64_t bits = u64(what);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str(const char* what) {
    std::size_t at = off_;
    std::uint32_t len = u32(what);
    if (len > (1u << 20)) {
      throw ParseError(std::string("checkpoint: implausible string length for ") + what, at);
    }
    need(len, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + off_), len);
    off_ += len;
    return s;
  }
  Tensor tensor(const char* what) {
    std::size_t at = off_;
    std::uint32_t rank = u32(what);
    if (rank == 0 || rank > 8) {
      throw ParseError(std::string("checkpoint: bad tensor rank for ") + what, at);
    }
    std::vector<std::size_t> dims(rank);
    std::uint64_t volume = 1;
    for (auto& d : dims) {
      std::size_t dim_at = off_;
      std::uint64_t v = u64(what);
      if (v == 0 || v > (1u << 28) || volume > (1u << 28)) {
        throw ParseError(std::string("checkpoint: implausible tensor shape for ") + what, dim_at);
      }
      volume *= v;
      d = static_cast<std::size_t>(v);
    }
    if (volume > (1u << 28)) {
      throw ParseError(std::string("checkpoint: implausible tensor volume for ") + what, at);
    }
    Tensor t(dims);
    for (double& v : t.data) v = f64(what);
    return t;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, off_); }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - off_ < n) {
      throw ParseError(std::string("checkpoint truncated while reading ") + what, off_);
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t off_ = 0;
};

std::uint32_t op_code(MatchOperator op) { return static_cast<std::uint32_t>(op); }

MatchOperator op_from_code(std::uint32_t code, std::size_t at) {
  switch (code) {
    case 0: return MatchOperator::kIndicator;
    case 1: return MatchOperator::kCosine;
    case 2: return MatchOperator::kDotProduct;
  }
  throw ParseError("checkpoint: unknown match operator code " + std::to_string(code), at);
}

Tensor vector_tensor(const std::vector<double>& v) {
  Tensor t({v.size()});
  t.data = v;
  return t;
}

void expect_shape(const Tensor& t, const std::vector<std::size_t>& shape, const char* name,
                  std::size_t at) {
  if (t.shape != shape) {
    Tensor want(shape);
    throw ParseError(std::string("checkpoint: tensor '") + name + "' has shape " + t.shape_str() +
                         ", config requires " + want.shape_str(),
                     at);
  }
}

}  // namespace

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& ckpt) {
  ckpt.config.validate();
  Writer w;
  w.bytes.insert(w.bytes.end(), kCheckpointMagic, kCheckpointMagic + 8);
  w.u32(kCheckpointVersion);

  const ModelConfig& c = ckpt.config;
  w.u32(op_code(c.op));
  w.u64(c.conv1_maps);
  w.u64(c.conv1_kernel);
  w.u64(c.conv2_maps);
  w.u64(c.conv2_kernel);
  w.u64(c.grid_rows);
  w.u64(c.grid_cols);
  w.u64(c.pool2);
  w.u64(c.mlp_hidden);
  w.u64(c.embedding_dim);
  w.f64(c.dropout_rate);

  w.u32(static_cast<std::uint32_t>(ckpt.vocab.size()));
  for (const auto& token : ckpt.vocab.id_to_token) w.str(token);

  const ModelParams& p = ckpt.params;
  std::uint32_t n_tensors = p.embeddings ? 9 : 8;
  w.u32(n_tensors);
  w.tensor("conv1.kernels", p.conv1.kernels);
  w.tensor("conv1.bias", vector_tensor(p.conv1.bias));
  w.tensor("conv2.kernels", p.conv2.kernels);
  w.tensor("conv2.bias", vector_tensor(p.conv2.bias));
  w.tensor("fc1.weight", p.fc1.weight);
  w.tensor("fc1.bias", vector_tensor(p.fc1.bias));
  w.tensor("fc2.weight", p.fc2.weight);
  w.tensor("fc2.bias", vector_tensor(p.fc2.bias));
  if (p.embeddings) w.tensor("embeddings", p.embeddings->matrix);
  return w.bytes;
}

Checkpoint parse_checkpoint(const std::vector<unsigned char>& bytes) {
  Reader r(bytes);
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
    throw ParseError("checkpoint: bad magic (not a checkpoint file)", 0);
  }
  r.u64("magic");  // consume the verified magic

  std::size_t version_at = r.offset();
  std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint: unsupported version " + std::to_string(version) +
                         " (expected " + std::to_string(kCheckpointVersion) + ")",
                     version_at);
  }

  Checkpoint ckpt;
  ModelConfig& c = ckpt.config;
  std::size_t config_at = r.offset();
  c.op = op_from_code(r.u32("match operator"), config_at);
  c.conv1_maps = static_cast<std::size_t>(r.u64("conv1_maps"));
  c.conv1_kernel = static_cast<std::size_t>(r.u64("conv1_kernel"));
  c.conv2_maps = static_cast<std::size_t>(r.u64("conv2_maps"));
  c.conv2_kernel = static_cast<std::size_t>(r.u64("conv2_kernel"));
  c.grid_rows = static_cast<std::size_t>(r.u64("grid_rows"));
  c.grid_cols = static_cast<std::size_t>(r.u64("grid_cols"));
  c.pool2 = static_cast<std::size_t>(r.u64("pool2"));
  c.mlp_hidden = static_cast<std::size_t>(r.u64("mlp_hidden"));
  c.embedding_dim = static_cast<std::size_t>(r.u64("embedding_dim"));
  c.dropout_rate = r.f64("dropout_rate");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("checkpoint: invalid config: ") + e.what(), config_at);
  }

  std::size_t vocab_at = r.offset();
  std::uint32_t vocab_size = r.u32("vocabulary size");
  if (vocab_size < 2) throw ParseError("checkpoint: vocabulary must include PAD and UNK", vocab_at);
  Vocabulary vocab;
  vocab.token_to_id.clear();
  vocab.id_to_token.clear();
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    std::size_t tok_at = r.offset();
    std::string token = r.str("vocabulary token");
    if (vocab.token_to_id.count(token)) {
      throw ParseError("checkpoint: duplicate vocabulary token '" + token + "'", tok_at);
    }
    vocab.token_to_id.emplace(token, static_cast<int>(i));
    vocab.id_to_token.push_back(std::move(token));
  }
  if (vocab.id_to_token[0] != Vocabulary::kPadToken ||
      vocab.id_to_token[1] != Vocabulary::kUnkToken) {
    throw ParseError("checkpoint: vocabulary ids 0/1 must be the PAD and UNK tokens", vocab_at);
  }
  ckpt.vocab = std::move(vocab);

  std::size_t count_at = r.offset();
  std::uint32_t n_tensors = r.u32("tensor count");
  std::uint32_t expected = c.uses_embeddings() ? 9 : 8;
  if (n_tensors != expected) {
    throw ParseError("checkpoint: expected " + std::to_string(expected) + " tensors, found " +
                         std::to_string(n_tensors),
                     count_at);
  }

  ModelParams& p = ckpt.params;
  auto read_named = [&](const char* name) {
    std::size_t at = r.offset();
    std::string found = r.str("tensor name");
    if (found != name) {
      throw ParseError(std::string("checkpoint: expected tensor '") + name + "', found '" + found +
                           "'",
                       at);
    }
    return std::make_pair(r.tensor(name), at);
  };

  auto [c1k, c1k_at] = read_named("conv1.kernels");
  expect_shape(c1k, {c.conv1_maps, 1, c.conv1_kernel, c.conv1_kernel}, "conv1.kernels", c1k_at);
  p.conv1.kernels = std::move(c1k);
  auto [c1b, c1b_at] = read_named("conv1.bias");
  expect_shape(c1b, {c.conv1_maps}, "conv1.bias", c1b_at);
  p.conv1.bias = std::move(c1b.data);

  auto [c2k, c2k_at] = read_named("conv2.kernels");
  expect_shape(c2k, {c.conv2_maps, c.conv1_maps, c.conv2_kernel, c.conv2_kernel}, "conv2.kernels",
               c2k_at);
  p.conv2.kernels = std::move(c2k);
  auto [c2b, c2b_at] = read_named("conv2.bias");
  expect_shape(c2b, {c.conv2_maps}, "conv2.bias", c2b_at);
  p.conv2.bias = std::move(c2b.data);

  auto [w1, w1_at] = read_named("fc1.weight");
  expect_shape(w1, {c.mlp_hidden, c.flatten_size()}, "fc1.weight", w1_at);
  p.fc1.weight = std::move(w1);
  auto [b1, b1_at] = read_named("fc1.bias");
  expect_shape(b1, {c.mlp_hidden}, "fc1.bias", b1_at);
  p.fc1.bias = std::move(b1.data);

  auto [w2, w2_at] = read_named("fc2.weight");
  expect_shape(w2, {2, c.mlp_hidden}, "fc2.weight", w2_at);
  p.fc2.weight = std::move(w2);
  auto [b2, b2_at] = read_named("fc2.bias");
  expect_shape(b2, {2}, "fc2.bias", b2_at);
  p.fc2.bias = std::move(b2.data);

  if (c.uses_embeddings()) {
    auto [emb, emb_at] = read_named("embeddings");
    expect_shape(emb, {ckpt.vocab.size(), c.embedding_dim}, "embeddings", emb_at);
    EmbeddingTable table;
    table.dim = c.embedding_dim;
    table.matrix = std::move(emb);
    p.embeddings = std::move(table);
  }

  if (!r.done()) r.fail("checkpoint: trailing bytes after the last tensor");
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::vector<unsigned char> bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint to '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

}  // namespace mp
