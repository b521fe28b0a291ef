#include "hdst/crossbar.hpp"

#include <algorithm>
#include <string>

#include "hdst/error.hpp"

namespace hdst {

namespace {

constexpr std::uint64_t kProgramStream = 0x9f;
constexpr std::uint64_t kReadStream = 0x7e;
constexpr std::uint64_t kAmStream = 0xa3;

void check_probability(double p, const char* name) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::config,
          std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
}

}  // namespace

NoiseParams NoiseParams::off(std::uint64_t seed) {
  NoiseParams n;
  n.seed = seed;
  return n;
}

NoiseParams NoiseParams::defaults(std::uint64_t seed) {
  NoiseParams n;
  n.p_program_flip = 0.01;
  n.p_read_01 = 0.003;
  n.p_read_10 = 0.003;
  n.am_sigma = 0.0;
  n.seed = seed;
  return n;
}

void NoiseParams::validate() const {
  check_probability(p_program_flip, "p_program_flip");
  check_probability(p_read_01, "p_read_01");
  check_probability(p_read_10, "p_read_10");
  require(am_sigma >= 0.0, ErrorCode::config, "am_sigma must be >= 0");
}

PcmCrossbar::PcmCrossbar(std::vector<Hypervector> ideal, RowLayout layout,
                         const NoiseParams& noise)
    : dim_(layout.dim),
      layout_(std::move(layout)),
      noise_(noise),
      ideal_(std::move(ideal)),
      am_rng_(derive_seed(noise.seed, kAmStream)) {
  noise_.validate();
  const std::size_t rows = ideal_.size();
  const std::size_t per = noise_.subarray_rows == 0 ? (rows == 0 ? 1 : rows) : noise_.subarray_rows;
  const std::size_t subarrays = rows == 0 ? 1 : (rows + per - 1) / per;

  programmed_.reserve(rows);
  for (std::size_t s = 0; s < subarrays; ++s) {
    // Spatial variation: frozen flips, drawn from the subarray's own stream.
    SeededRng program_rng(derive_seed(noise_.seed, kProgramStream, s));
    const std::size_t first = s * per;
    const std::size_t last = std::min(rows, first + per);
    for (std::size_t r = first; r < last; ++r) {
      require(ideal_[r].dim() == dim_, ErrorCode::dimension_mismatch,
              "crossbar rows must share one dimension");
      programmed_.push_back(bind(ideal_[r], bernoulli_hv(dim_, noise_.p_program_flip, program_rng)));
    }
    read_rngs_.emplace_back(derive_seed(noise_.seed, kReadStream, s));
  }
}

PcmCrossbar PcmCrossbar::program(const CrossbarImage& image, const NoiseParams& noise) {
  return PcmCrossbar(image.rows, image.layout, noise);
}

PcmCrossbar PcmCrossbar::program(const std::vector<Hypervector>& rows, const NoiseParams& noise) {
  require(!rows.empty(), ErrorCode::invalid_argument, "crossbar needs at least one row");
  RowLayout layout;
  layout.dim = rows.front().dim();
  return PcmCrossbar(rows, std::move(layout), noise);
}

std::size_t PcmCrossbar::subarray_of(std::size_t row) const noexcept {
  return noise_.subarray_rows == 0 ? 0 : row / noise_.subarray_rows;
}

void PcmCrossbar::check_row(std::size_t row) const {
  require(row < programmed_.size(), ErrorCode::out_of_range,
          "row " + std::to_string(row) + " out of range (" + std::to_string(programmed_.size()) +
              " rows)");
}

const Hypervector& PcmCrossbar::snapshot_row(std::size_t row) const {
  check_row(row);
  return programmed_[row];
}

Hypervector PcmCrossbar::read_row(std::size_t row) {
  check_row(row);
  ++reads_;
  const Hypervector& stored = programmed_[row];
  if (noise_.p_read_01 == 0.0 && noise_.p_read_10 == 0.0) return stored;

  SeededRng& rng = read_rngs_[subarray_of(row)];
  const Hypervector up = bernoulli_hv(dim_, noise_.p_read_01, rng);
  const Hypervector down = bernoulli_hv(dim_, noise_.p_read_10, rng);

  Hypervector out = stored;
  auto ow = out.mutable_words();
  const auto sw = stored.words();
  const auto uw = up.words();
  const auto dw = down.words();
  for (std::size_t i = 0; i < ow.size(); ++i) {
    ow[i] ^= (uw[i] & ~sw[i]) | (dw[i] & sw[i]);
  }
  out.clear_padding();
  return out;
}

std::vector<double> PcmCrossbar::am_search(const Hypervector& query) {
  require(query.dim() == dim_, ErrorCode::dimension_mismatch,
          "query dimension " + std::to_string(query.dim()) + " does not match crossbar " +
              std::to_string(dim_));
  std::vector<double> scores;
  scores.reserve(programmed_.size());
  for (std::size_t c = 0; c < programmed_.size(); ++c) {
    double score = static_cast<double>(dot(query, read_row(c)));
    if (noise_.am_sigma > 0.0) score += am_rng_.gaussian(0.0, noise_.am_sigma);
    scores.push_back(score);
  }
  return scores;
}

}  // namespace hdst
