#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mp {

// All sampling goes through this wrapper so results depend only on the seed,
// not on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller.
  double gaussian();

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Splitmix-style seed derivation so substreams (per epoch, per example) are
// decorrelated but reproducible.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace mp
