#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hdst/hypervector.hpp"
#include "hdst/rng.hpp"

namespace hdst {

// Channel ID vectors E_1..E_M.
struct ItemMemory {
  std::vector<Hypervector> vectors;

  [[nodiscard]] std::size_t size() const noexcept { return vectors.size(); }
  [[nodiscard]] std::size_t dim() const { return vectors.front().dim(); }
};

// Level vectors for levels 1..L. Index 0 holds level 1.
struct ContinuousItemMemory {
  std::vector<Hypervector> levels;

  [[nodiscard]] std::size_t level_count() const noexcept { return levels.size(); }
  [[nodiscard]] std::size_t dim() const { return levels.front().dim(); }
  // 1-based level lookup.
  [[nodiscard]] const Hypervector& level(std::size_t l) const;
};

// Row placement of channel-bound vectors inside a crossbar: channel m owns
// rows [offsets[m], offsets[m] + level_counts[m]).
struct RowLayout {
  std::size_t dim = 0;
  std::vector<std::size_t> level_counts;
  std::vector<std::size_t> offsets;

  static RowLayout from_level_counts(std::size_t dim, std::span<const std::size_t> level_counts);

  [[nodiscard]] std::size_t channel_count() const noexcept { return level_counts.size(); }
  [[nodiscard]] std::size_t row_count() const noexcept;
  // Row address of (channel m, 1-based level l). Throws out_of_range.
  [[nodiscard]] std::size_t address(std::size_t m, std::size_t l) const;

  friend bool operator==(const RowLayout&, const RowLayout&) = default;
};

// Ideal (noise-free) crossbar content: rows[offset_m + l - 1] = CiM_m(l) XOR E_m.
struct CrossbarImage {
  RowLayout layout;
  std::vector<Hypervector> rows;

  [[nodiscard]] std::size_t row_count() const noexcept { return rows.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return layout.dim; }
  [[nodiscard]] const Hypervector& read_row(std::size_t row) const;
};

ItemMemory build_item_memory(std::size_t channels, std::size_t dim, SeededRng& rng);

// Level vectors with hamming(level 1, level i) == floor(D (i-1) / (2 (L-1)))
// exactly, built by flipping a growing prefix of one random permutation of
// bit positions.
ContinuousItemMemory build_cim(std::size_t levels, std::size_t dim, SeededRng& rng);

CrossbarImage precompute_channel_bound(const ItemMemory& im,
                                       std::span<const ContinuousItemMemory> cims);

// Everything an encoder needs. channel_cim[m] indexes into cims; when every
// channel has the same level count a single CiM is shared by all channels.
struct EncoderMemories {
  ItemMemory item_memory;
  std::vector<ContinuousItemMemory> cims;
  std::vector<std::size_t> channel_cim;
  CrossbarImage image;

  [[nodiscard]] const ContinuousItemMemory& cim_for(std::size_t channel) const {
    return cims[channel_cim[channel]];
  }
  // One CiM per channel, with shared instances expanded.
  [[nodiscard]] std::vector<ContinuousItemMemory> per_channel_cims() const;
};

EncoderMemories build_encoder_memories(std::size_t dim, std::span<const std::size_t> level_counts,
                                       std::uint64_t seed);

// Re-derives the crossbar image from the item memory and CiMs.
CrossbarImage rebuild_image(const EncoderMemories& mem);

}  // namespace hdst
