#include "hdst/memories.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "hdst/error.hpp"

namespace hdst {

const Hypervector& ContinuousItemMemory::level(std::size_t l) const {
  require(l >= 1 && l <= levels.size(), ErrorCode::out_of_range,
          "level " + std::to_string(l) + " outside 1.." + std::to_string(levels.size()));
  return levels[l - 1];
}

RowLayout RowLayout::from_level_counts(std::size_t dim, std::span<const std::size_t> level_counts) {
  RowLayout layout;
  layout.dim = dim;
  layout.level_counts.assign(level_counts.begin(), level_counts.end());
  layout.offsets.reserve(level_counts.size());
  std::size_t offset = 0;
  for (const auto l : level_counts) {
    layout.offsets.push_back(offset);
    offset += l;
  }
  return layout;
}

std::size_t RowLayout::row_count() const noexcept {
  return std::accumulate(level_counts.begin(), level_counts.end(), std::size_t{0});
}

std::size_t RowLayout::address(std::size_t m, std::size_t l) const {
  require(m < level_counts.size(), ErrorCode::out_of_range,
          "channel " + std::to_string(m) + " out of range");
  require(l >= 1 && l <= level_counts[m], ErrorCode::out_of_range,
          "level " + std::to_string(l) + " outside 1.." + std::to_string(level_counts[m]) +
              " for channel " + std::to_string(m));
  return offsets[m] + (l - 1);
}

const Hypervector& CrossbarImage::read_row(std::size_t row) const {
  require(row < rows.size(), ErrorCode::out_of_range,
          "row " + std::to_string(row) + " out of range");
  return rows[row];
}

ItemMemory build_item_memory(std::size_t channels, std::size_t dim, SeededRng& rng) {
  require(channels >= 1, ErrorCode::invalid_argument, "item memory needs at least one channel");
  require(dim >= 1, ErrorCode::invalid_argument, "hypervector dimension must be >= 1");
  ItemMemory im;
  im.vectors.reserve(channels);
  for (std::size_t m = 0; m < channels; ++m) im.vectors.push_back(random_hv(dim, rng));
  return im;
}

ContinuousItemMemory build_cim(std::size_t levels, std::size_t dim, SeededRng& rng) {
  require(levels >= 2, ErrorCode::invalid_argument, "continuous item memory needs L >= 2");
  require(dim >= 1, ErrorCode::invalid_argument, "hypervector dimension must be >= 1");

  const Hypervector base = random_hv(dim, rng);

  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = dim - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }

  ContinuousItemMemory cim;
  cim.levels.reserve(levels);
  Hypervector current = base;
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < levels; ++i) {
    const std::size_t target = (dim * i) / (2 * (levels - 1));
    for (; flipped < target; ++flipped) current.flip(order[flipped]);
    cim.levels.push_back(current);
  }
  return cim;
}

CrossbarImage precompute_channel_bound(const ItemMemory& im,
                                       std::span<const ContinuousItemMemory> cims) {
  require(cims.size() == im.size(), ErrorCode::invalid_argument,
          "expected one CiM per channel (" + std::to_string(im.size()) + "), got " +
              std::to_string(cims.size()));
  const std::size_t dim = im.dim();
  std::vector<std::size_t> level_counts;
  level_counts.reserve(cims.size());
  for (const auto& cim : cims) {
    require(cim.level_count() >= 1, ErrorCode::invalid_argument, "CiM without levels");
    require(cim.dim() == dim, ErrorCode::dimension_mismatch,
            "CiM dimension does not match item memory");
    level_counts.push_back(cim.level_count());
  }

  CrossbarImage image;
  image.layout = RowLayout::from_level_counts(dim, level_counts);
  image.rows.reserve(image.layout.row_count());
  for (std::size_t m = 0; m < cims.size(); ++m) {
    for (const auto& level : cims[m].levels) image.rows.push_back(bind(level, im.vectors[m]));
  }
  return image;
}

std::vector<ContinuousItemMemory> EncoderMemories::per_channel_cims() const {
  std::vector<ContinuousItemMemory> out;
  out.reserve(channel_cim.size());
  for (const auto idx : channel_cim) out.push_back(cims[idx]);
  return out;
}

EncoderMemories build_encoder_memories(std::size_t dim, std::span<const std::size_t> level_counts,
                                       std::uint64_t seed) {
  require(!level_counts.empty(), ErrorCode::invalid_argument, "at least one channel is required");
  EncoderMemories mem;
  SeededRng im_rng(derive_seed(seed, 0x1a));
  mem.item_memory = build_item_memory(level_counts.size(), dim, im_rng);

  const bool uniform = std::all_of(level_counts.begin(), level_counts.end(),
                                   [&](std::size_t l) { return l == level_counts.front(); });
  if (uniform) {
    SeededRng cim_rng(derive_seed(seed, 0xc1, 0));
    mem.cims.push_back(build_cim(level_counts.front(), dim, cim_rng));
    mem.channel_cim.assign(level_counts.size(), 0);
  } else {
    for (std::size_t m = 0; m < level_counts.size(); ++m) {
      SeededRng cim_rng(derive_seed(seed, 0xc1, m));
      mem.cims.push_back(build_cim(level_counts[m], dim, cim_rng));
      mem.channel_cim.push_back(m);
    }
  }
  mem.image = rebuild_image(mem);
  return mem;
}

CrossbarImage rebuild_image(const EncoderMemories& mem) {
  const auto cims = mem.per_channel_cims();
  return precompute_channel_bound(mem.item_memory, cims);
}

}  // namespace hdst
