#include "hdst/hypervector.hpp"

#include <bit>
#include <cmath>

#include "hdst/error.hpp"

namespace hdst {

namespace {

std::size_t words_for(std::size_t dim) {
  return (dim + Hypervector::kWordBits - 1) / Hypervector::kWordBits;
}

void check_same_dim(const Hypervector& a, const Hypervector& b, const char* op) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::dimension_mismatch, std::string(op) + ": dimension mismatch (" +
                                            std::to_string(a.dim()) + " vs " +
                                            std::to_string(b.dim()) + ")");
  }
}

// Moves bit d to d + shift; bits landing past the last word are dropped.
void shift_up(std::span<const std::uint64_t> in, std::span<std::uint64_t> out,
              std::size_t shift) {
  const std::size_t n = in.size();
  const std::size_t ws = shift / 64;
  const unsigned bs = shift % 64;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t w = 0;
    if (i >= ws) {
      w = in[i - ws] << bs;
      if (bs != 0 && i >= ws + 1) w |= in[i - ws - 1] >> (64 - bs);
    }
    out[i] = w;
  }
}

// Moves bit d to d - shift; bits landing below zero are dropped.
void shift_down(std::span<const std::uint64_t> in, std::span<std::uint64_t> out,
                std::size_t shift) {
  const std::size_t n = in.size();
  const std::size_t ws = shift / 64;
  const unsigned bs = shift % 64;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t w = 0;
    if (i + ws < n) {
      w = in[i + ws] >> bs;
      if (bs != 0 && i + ws + 1 < n) w |= in[i + ws + 1] << (64 - bs);
    }
    out[i] = w;
  }
}

}  // namespace

Hypervector::Hypervector(std::size_t dim) : dim_(dim), words_(words_for(dim), 0) {
  require(dim > 0, ErrorCode::invalid_argument, "hypervector dimension must be >= 1");
}

Hypervector Hypervector::from_string(std::string_view bits) {
  Hypervector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      v.set(i, true);
    } else if (bits[i] != '0') {
      fail(ErrorCode::invalid_argument, "hypervector string may only contain '0' and '1'");
    }
  }
  return v;
}

Hypervector::word_type Hypervector::tail_mask() const noexcept {
  const std::size_t rem = dim_ % kWordBits;
  return rem == 0 ? ~word_type{0} : (word_type{1} << rem) - 1;
}

void Hypervector::clear_padding() noexcept { words_.back() &= tail_mask(); }

std::size_t Hypervector::popcount() const noexcept {
  std::size_t n = 0;
  for (const auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

Hypervector Hypervector::complement() const {
  Hypervector r(*this);
  for (auto& w : r.words_) w = ~w;
  r.clear_padding();
  return r;
}

std::string Hypervector::to_string() const {
  std::string s(dim_, '0');
  for (std::size_t i = 0; i < dim_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

Hypervector& Hypervector::operator^=(const Hypervector& other) {
  check_same_dim(*this, other, "bind");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

Hypervector random_hv(std::size_t dim, SeededRng& rng) {
  Hypervector v(dim);
  for (auto& w : v.mutable_words()) w = rng.next_u64();
  v.clear_padding();
  return v;
}

Hypervector bernoulli_hv(std::size_t dim, double p, SeededRng& rng) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument,
          "bernoulli probability must lie in [0, 1]");
  if (p == 0.0) return Hypervector(dim);
  if (p == 1.0) return Hypervector(dim).complement();
  if (p == 0.5) return random_hv(dim, rng);
  if (p > 0.5) return bernoulli_hv(dim, 1.0 - p, rng).complement();

  Hypervector v(dim);
  if (p < 0.1) {
    // Sparse: jump between successes with geometric gaps.
    const double log_q = std::log1p(-p);
    std::size_t pos = 0;
    while (true) {
      const double u = 1.0 - rng.uniform();
      const double gap = std::floor(std::log(u) / log_q);
      if (gap >= static_cast<double>(dim - pos)) break;
      pos += static_cast<std::size_t>(gap);
      v.set(pos, true);
      if (++pos >= dim) break;
    }
  } else {
    for (std::size_t d = 0; d < dim; ++d) {
      if (rng.bernoulli(p)) v.set(d, true);
    }
  }
  return v;
}

Hypervector bind(const Hypervector& a, const Hypervector& b) {
  Hypervector r(a);
  r ^= b;
  return r;
}

Hypervector permute(const Hypervector& a, std::size_t k) {
  const std::size_t dim = a.dim();
  k %= dim;
  if (k == 0) return a;
  Hypervector up(dim);
  Hypervector down(dim);
  shift_up(a.words(), up.mutable_words(), k);
  shift_down(a.words(), down.mutable_words(), dim - k);
  auto out = up.mutable_words();
  const auto low = down.words();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] |= low[i];
  up.clear_padding();
  return up;
}

void accumulate_bits(const Hypervector& v, std::span<std::uint32_t> counts) {
  require(counts.size() == v.dim(), ErrorCode::dimension_mismatch,
          "accumulate: counter length does not match dimension");
  const auto words = v.words();
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::uint64_t w = words[i];
    const std::size_t base = i * Hypervector::kWordBits;
    while (w != 0) {
      counts[base + static_cast<std::size_t>(std::countr_zero(w))] += 1;
      w &= w - 1;
    }
  }
}

Hypervector threshold_counts(std::span<const std::uint32_t> counts, std::uint32_t threshold) {
  Hypervector r(counts.size());
  for (std::size_t d = 0; d < counts.size(); ++d) {
    if (counts[d] >= threshold) r.set(d, true);
  }
  return r;
}

Hypervector majority(std::span<const Hypervector> inputs,
                     const std::optional<Hypervector>& tie_break) {
  require(!inputs.empty(), ErrorCode::invalid_argument, "majority: empty input list");
  const std::size_t m = inputs.size();
  const std::size_t dim = inputs.front().dim();
  for (const auto& v : inputs) check_same_dim(inputs.front(), v, "majority");
  if (m % 2 == 0) {
    require(tie_break.has_value(), ErrorCode::invalid_argument,
            "majority: even input count requires a tie-break vector");
    check_same_dim(inputs.front(), *tie_break, "majority");
  } else {
    require(!tie_break.has_value(), ErrorCode::invalid_argument,
            "majority: tie-break vector given for an odd input count");
  }

  if (m == 1) return inputs.front();

  std::vector<std::uint32_t> counts(dim, 0);
  for (const auto& v : inputs) accumulate_bits(v, counts);
  if (tie_break) accumulate_bits(*tie_break, counts);
  // ceil((M + 1) / 2)
  const auto threshold = static_cast<std::uint32_t>((m + 2) / 2);
  return threshold_counts(counts, threshold);
}

std::size_t hamming(const Hypervector& a, const Hypervector& b) {
  check_same_dim(a, b, "hamming");
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return n;
}

std::size_t dot(const Hypervector& a, const Hypervector& b) {
  check_same_dim(a, b, "dot");
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  }
  return n;
}

}  // namespace hdst
