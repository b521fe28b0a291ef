#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hdst/hypervector.hpp"
#include "hdst/memories.hpp"
#include "hdst/rng.hpp"

namespace hdst {

// Parameterized surrogate for PCM non-idealities.
//  - p_program_flip: device programmed to the wrong state (frozen at program time)
//  - p_read_01 / p_read_10: per-read temporal flip of a stored 0 / 1
//  - am_sigma: additive Gaussian noise on an analog column sum, in counts
//  - subarray_rows: rows per subarray; each subarray owns its RNG stream (0 = one array)
struct NoiseParams {
  double p_program_flip = 0.0;
  double p_read_01 = 0.0;
  double p_read_10 = 0.0;
  double am_sigma = 0.0;
  std::size_t subarray_rows = 0;
  std::uint64_t seed = 0;

  static NoiseParams off(std::uint64_t seed = 0);
  // 1% program flips, 0.3% read flips, no analog AM noise.
  static NoiseParams defaults(std::uint64_t seed = 0);

  [[nodiscard]] bool is_zero() const noexcept {
    return p_program_flip == 0.0 && p_read_01 == 0.0 && p_read_10 == 0.0 && am_sigma == 0.0;
  }
  void validate() const;
};

class PcmCrossbar {
 public:
  // Programs rows into devices. The layout is kept so encoders can address
  // rows by (channel, level).
  static PcmCrossbar program(const CrossbarImage& image, const NoiseParams& noise);
  // Prototype array for associative search (no channel layout).
  static PcmCrossbar program(const std::vector<Hypervector>& rows, const NoiseParams& noise);

  [[nodiscard]] std::size_t row_count() const noexcept { return programmed_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] const RowLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] const NoiseParams& noise() const noexcept { return noise_; }

  [[nodiscard]] const std::vector<Hypervector>& ideal() const noexcept { return ideal_; }
  [[nodiscard]] const std::vector<Hypervector>& programmed() const noexcept { return programmed_; }

  // Programmed row with fresh temporal read flips. Advances the RNG of the
  // row's subarray; calls on one instance must be serialized.
  Hypervector read_row(std::size_t row);

  // Side-effect-free read of the programmed state (no temporal noise).
  [[nodiscard]] const Hypervector& snapshot_row(std::size_t row) const;

  // score_c = dot(query, noisy read of row c) + N(0, am_sigma).
  std::vector<double> am_search(const Hypervector& query);

  // Number of read_row calls (including those made by am_search).
  [[nodiscard]] std::uint64_t read_count() const noexcept { return reads_; }
  void reset_read_count() noexcept { reads_ = 0; }

 private:
  PcmCrossbar(std::vector<Hypervector> ideal, RowLayout layout, const NoiseParams& noise);

  [[nodiscard]] std::size_t subarray_of(std::size_t row) const noexcept;
  void check_row(std::size_t row) const;

  std::size_t dim_;
  RowLayout layout_;
  NoiseParams noise_;
  std::vector<Hypervector> ideal_;
  std::vector<Hypervector> programmed_;
  std::vector<SeededRng> read_rngs_;  // one per subarray
  SeededRng am_rng_;
  std::uint64_t reads_ = 0;
};

}  // namespace hdst
