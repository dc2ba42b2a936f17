#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mp/model.hpp"
#include "mp/vocab.hpp"

namespace mp {

// Binary model snapshot: magic "MPYRCKPT", a u32 format version, the model
// config, the vocabulary, then named f64 tensors. All integers and doubles
// are little-endian regardless of host. Serialization is canonical, so
// serialize(parse(bytes)) == bytes.
struct Checkpoint {
  ModelConfig config;
  Vocabulary vocab;
  ModelParams params;
};

inline constexpr char kCheckpointMagic[8] = {'M', 'P', 'Y', 'R', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& ckpt);

// Throws ParseError (with the byte offset of the problem) on bad magic,
// unsupported version, truncation, trailing bytes, or shapes that contradict
// the config.
Checkpoint parse_checkpoint(const std::vector<unsigned char>& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mp
