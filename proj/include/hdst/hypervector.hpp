#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdst/rng.hpp"

namespace hdst {

// Dense binary hypervector, bit-packed into 64-bit words. Bit d lives in
// word d / 64 at position d % 64. Padding bits past dim() are always zero.
class Hypervector {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  // All-zero vector. Throws invalid_argument when dim == 0.
  explicit Hypervector(std::size_t dim);

  // Parses a string of '0'/'1'; character i becomes bit i.
  static Hypervector from_string(std::string_view bits);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t word_count() const noexcept { return words_.size(); }

  [[nodiscard]] bool get(std::size_t i) const {
    return ((words_[i / kWordBits] >> (i % kWordBits)) & 1U) != 0;
  }
  void set(std::size_t i, bool value) {
    const word_type mask = word_type{1} << (i % kWordBits);
    if (value) {
      words_[i / kWordBits] |= mask;
    } else {
      words_[i / kWordBits] &= ~mask;
    }
  }
  void flip(std::size_t i) { words_[i / kWordBits] ^= word_type{1} << (i % kWordBits); }

  [[nodiscard]] std::span<const word_type> words() const noexcept { return words_; }
  // Writers must call clear_padding() afterwards if they may touch tail bits.
  [[nodiscard]] std::span<word_type> mutable_words() noexcept { return words_; }
  void clear_padding() noexcept;

  [[nodiscard]] std::size_t popcount() const noexcept;
  [[nodiscard]] Hypervector complement() const;
  [[nodiscard]] std::string to_string() const;

  Hypervector& operator^=(const Hypervector& other);

  friend bool operator==(const Hypervector&, const Hypervector&) = default;

  // Mask selecting the valid bits of the last word.
  [[nodiscard]] word_type tail_mask() const noexcept;

 private:
  std::size_t dim_;
  std::vector<word_type> words_;
};

Hypervector random_hv(std::size_t dim, SeededRng& rng);

// Vector whose bits are independently 1 with probability p.
Hypervector bernoulli_hv(std::size_t dim, double p, SeededRng& rng);

Hypervector bind(const Hypervector& a, const Hypervector& b);

// Circular right shift: result[(d + k) mod dim] = a[d].
Hypervector permute(const Hypervector& a, std::size_t k);

// Per-dimension majority. With an even input count a tie-break vector must be
// supplied and is appended as an extra input; with an odd count it must be
// absent. Output is 1 where the count of ones reaches ceil((M + 1) / 2), M
// being the original input count.
Hypervector majority(std::span<const Hypervector> inputs,
                     const std::optional<Hypervector>& tie_break = std::nullopt);

std::size_t hamming(const Hypervector& a, const Hypervector& b);
std::size_t dot(const Hypervector& a, const Hypervector& b);

// Per-dimension count of ones across inputs. Used by the bundler and by the
// associative-memory accumulators.
void accumulate_bits(const Hypervector& v, std::span<std::uint32_t> counts);

// Bits set where counts[d] >= threshold.
Hypervector threshold_counts(std::span<const std::uint32_t> counts, std::uint32_t threshold);

}  // namespace hdst
