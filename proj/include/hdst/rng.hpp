#pragma once

#include <cstdint>
#include <random>

namespace hdst {

// Deterministic generator. Distribution sampling is done here rather than
// through <random> distributions, whose output is implementation-defined,
// so streams (and therefore model files) are identical across toolchains.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  double gaussian(double mean, double stddev);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stateless 64-bit mixer (splitmix64 finalizer), used to derive independent
// child seeds from a parent seed and a list of tags.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t seed, Tags... tags) {
  ((seed = mix_seed(seed, static_cast<std::uint64_t>(tags))), ...);
  return seed;
}

}  // namespace hdst
