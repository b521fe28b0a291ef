#include "hdst/encoder.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "hdst/error.hpp"

namespace hdst {

EncoderConfig EncoderConfig::uniform(std::size_t dim, std::size_t channels, std::size_t ngram,
                                     std::size_t levels, std::uint64_t seed) {
  EncoderConfig cfg;
  cfg.dim = dim;
  cfg.ngram.assign(channels, ngram);
  cfg.levels.assign(channels, levels);
  cfg.seed = seed;
  return cfg;
}

std::size_t EncoderConfig::max_ngram() const noexcept {
  return ngram.empty() ? 0 : *std::max_element(ngram.begin(), ngram.end());
}

std::size_t EncoderConfig::total_ngram() const noexcept {
  return std::accumulate(ngram.begin(), ngram.end(), std::size_t{0});
}

std::optional<std::size_t> EncoderConfig::uniform_ngram() const noexcept {
  if (ngram.empty()) return std::nullopt;
  if (std::all_of(ngram.begin(), ngram.end(), [&](std::size_t n) { return n == ngram.front(); })) {
    return ngram.front();
  }
  return std::nullopt;
}

std::optional<std::size_t> EncoderConfig::uniform_levels() const noexcept {
  if (levels.empty()) return std::nullopt;
  if (std::all_of(levels.begin(), levels.end(), [&](std::size_t l) { return l == levels.front(); })) {
    return levels.front();
  }
  return std::nullopt;
}

void EncoderConfig::validate() const {
  require(dim >= 1, ErrorCode::config, "dim must be >= 1");
  require(!ngram.empty(), ErrorCode::config, "at least one channel is required");
  require(levels.size() == ngram.size(), ErrorCode::config,
          "ngram and levels lists must have one entry per channel (" +
              std::to_string(ngram.size()) + " vs " + std::to_string(levels.size()) + ")");
  for (std::size_t m = 0; m < ngram.size(); ++m) {
    require(ngram[m] >= 1, ErrorCode::config,
            "ngram size of channel " + std::to_string(m) + " must be >= 1");
    require(levels[m] >= 2, ErrorCode::config,
            "level count of channel " + std::to_string(m) + " must be >= 2");
  }
  require(dim > max_ngram(), ErrorCode::config,
          "dim (" + std::to_string(dim) + ") must exceed the largest ngram size (" +
              std::to_string(max_ngram()) + ")");
  require(stride >= 1, ErrorCode::config, "stride must be >= 1");
}

void SampleWindow::validate(const EncoderConfig& cfg) const {
  require(levels.size() == cfg.channel_count(), ErrorCode::invalid_argument,
          "window has " + std::to_string(levels.size()) + " channels, config has " +
              std::to_string(cfg.channel_count()));
  for (std::size_t m = 0; m < levels.size(); ++m) {
    require(levels[m].size() == cfg.ngram[m], ErrorCode::invalid_argument,
            "window channel " + std::to_string(m) + " holds " + std::to_string(levels[m].size()) +
                " samples, expected " + std::to_string(cfg.ngram[m]));
    for (const auto s : levels[m]) {
      require(s >= 1 && s <= cfg.levels[m], ErrorCode::out_of_range,
              "level " + std::to_string(s) + " outside 1.." + std::to_string(cfg.levels[m]) +
                  " on channel " + std::to_string(m));
    }
  }
}

namespace {

// Majority with an explicit (possibly absent) tie vector, honoring the
// error-on-tie policy for even counts.
Hypervector bundle_with(std::span<const Hypervector> inputs, TieBreakMode mode,
                        const std::optional<Hypervector>& tie) {
  if (inputs.size() % 2 == 1) return majority(inputs);
  if (mode == TieBreakMode::random_scan_chain) return majority(inputs, tie);

  const std::size_t dim = inputs.front().dim();
  std::vector<std::uint32_t> counts(dim, 0);
  for (const auto& v : inputs) {
    require(v.dim() == dim, ErrorCode::dimension_mismatch, "bundle: dimension mismatch");
    accumulate_bits(v, counts);
  }
  const auto half = static_cast<std::uint32_t>(inputs.size() / 2);
  for (std::size_t d = 0; d < dim; ++d) {
    if (counts[d] == half) {
      fail(ErrorCode::tie, "bundle: tie at dimension " + std::to_string(d) +
                               " with tie_break_mode=error-on-tie");
    }
  }
  return threshold_counts(counts, half + 1);
}

std::optional<Hypervector> draw_tie(std::size_t count, std::size_t dim, TieBreakMode mode,
                                    SeededRng& rng) {
  if (count % 2 == 0 && mode == TieBreakMode::random_scan_chain) return random_hv(dim, rng);
  return std::nullopt;
}

class ImageSource {
 public:
  explicit ImageSource(const CrossbarImage& image) : image_(image) {}
  const RowLayout& layout() const { return image_.layout; }
  const Hypervector& read_row(std::size_t row) { return image_.read_row(row); }

 private:
  const CrossbarImage& image_;
};

class PcmSource {
 public:
  explicit PcmSource(PcmCrossbar& xbar) : xbar_(xbar) {}
  const RowLayout& layout() const { return xbar_.layout(); }
  Hypervector read_row(std::size_t row) { return xbar_.read_row(row); }

 private:
  PcmCrossbar& xbar_;
};

template <typename Source>
Hypervector encode_adapted_impl(const SampleWindow& window, Source source,
                                const EncoderConfig& cfg, SeededRng& rng, EncodeTrace* trace) {
  cfg.validate();
  window.validate(cfg);
  const RowLayout& layout = source.layout();
  require(layout.dim == cfg.dim, ErrorCode::dimension_mismatch,
          "crossbar dimension does not match encoder config");
  require(layout.level_counts == cfg.levels, ErrorCode::invalid_argument,
          "crossbar layout does not match the configured level counts");

  const std::size_t channels = cfg.channel_count();
  // Drawn at the start of the encoding cycle.
  const auto tie = draw_tie(channels, cfg.dim, cfg.tie_break, rng);

  std::vector<Hypervector> temporal;
  temporal.reserve(channels);
  for (std::size_t m = 0; m < channels; ++m) {
    Hypervector binder(cfg.dim);
    for (const auto s : window.levels[m]) {
      binder = permute(binder, 1);
      binder ^= source.read_row(layout.address(m, s));
      if (trace) {
        ++trace->row_reads;
        ++trace->binder_updates;
      }
    }
    temporal.push_back(std::move(binder));
  }
  if (trace) {
    trace->bundle_inputs += channels;
    if (tie) {
      ++trace->bundle_inputs;
      ++trace->tie_vectors;
    }
  }
  return bundle_with(temporal, cfg.tie_break, tie);
}

}  // namespace

Hypervector bundle(std::span<const Hypervector> inputs, TieBreakMode mode, SeededRng& rng) {
  require(!inputs.empty(), ErrorCode::invalid_argument, "bundle: empty input list");
  const auto tie = draw_tie(inputs.size(), inputs.front().dim(), mode, rng);
  return bundle_with(inputs, mode, tie);
}

Hypervector encode_baseline(const SampleWindow& window, const EncoderMemories& memories,
                            const EncoderConfig& cfg, SeededRng& rng) {
  cfg.validate();
  const auto n_opt = cfg.uniform_ngram();
  require(n_opt.has_value(), ErrorCode::unsupported_config,
          "the conventional encoder requires the same ngram size on every channel");
  window.validate(cfg);
  const std::size_t channels = cfg.channel_count();
  require(memories.item_memory.size() == channels, ErrorCode::invalid_argument,
          "item memory size does not match channel count");
  require(memories.item_memory.dim() == cfg.dim, ErrorCode::dimension_mismatch,
          "memories dimension does not match encoder config");
  const std::size_t n_total = *n_opt;

  const auto tie = draw_tie(channels, cfg.dim, cfg.tie_break, rng);

  Hypervector gram(cfg.dim);
  std::vector<Hypervector> bound;
  bound.reserve(channels);
  for (std::size_t n = 0; n < n_total; ++n) {
    bound.clear();
    for (std::size_t m = 0; m < channels; ++m) {
      const auto& cim = memories.cim_for(m);
      require(cim.level_count() == cfg.levels[m], ErrorCode::invalid_argument,
              "CiM level count does not match config on channel " + std::to_string(m));
      bound.push_back(bind(cim.level(window.levels[m][n]), memories.item_memory.vectors[m]));
    }
    const Hypervector spatial = bundle_with(bound, cfg.tie_break, tie);
    gram ^= permute(spatial, n_total - 1 - n);
  }
  return gram;
}

Hypervector encode_adapted(const SampleWindow& window, const CrossbarImage& image,
                           const EncoderConfig& cfg, SeededRng& rng, EncodeTrace* trace) {
  return encode_adapted_impl(window, ImageSource(image), cfg, rng, trace);
}

Hypervector encode_adapted(const SampleWindow& window, PcmCrossbar& xbar,
                           const EncoderConfig& cfg, SeededRng& rng, EncodeTrace* trace) {
  return encode_adapted_impl(window, PcmSource(xbar), cfg, rng, trace);
}

CircularBuffer::CircularBuffer(std::span<const std::size_t> ngram,
                               std::span<const std::size_t> levels)
    : ngram_(ngram.begin(), ngram.end()), levels_(levels.begin(), levels.end()) {
  require(!ngram_.empty() && ngram_.size() == levels_.size(), ErrorCode::invalid_argument,
          "circular buffer needs matching, non-empty ngram and level lists");
  std::size_t offset = 0;
  for (const auto n : ngram_) {
    require(n >= 1, ErrorCode::invalid_argument, "ngram sizes must be >= 1");
    base_.push_back(offset);
    wp_.push_back(offset);
    offset += n;
  }
  filled_.assign(ngram_.size(), 0);
  storage_.assign(offset, 0);
}

void CircularBuffer::push(std::size_t channel, std::uint32_t level) {
  require(channel < ngram_.size(), ErrorCode::out_of_range,
          "channel " + std::to_string(channel) + " out of range");
  require(level >= 1 && level <= levels_[channel], ErrorCode::out_of_range,
          "level " + std::to_string(level) + " outside 1.." + std::to_string(levels_[channel]) +
              " on channel " + std::to_string(channel));
  storage_[wp_[channel]] = level;
  const std::size_t next = wp_[channel] + 1;
  wp_[channel] = next == base_[channel] + ngram_[channel] ? base_[channel] : next;
  filled_[channel] = std::min(filled_[channel] + 1, ngram_[channel]);
}

bool CircularBuffer::ready() const noexcept {
  for (std::size_t m = 0; m < ngram_.size(); ++m) {
    if (filled_[m] < ngram_[m]) return false;
  }
  return true;
}

std::vector<std::size_t> CircularBuffer::read_order() const {
  std::vector<std::size_t> order;
  order.reserve(storage_.size());
  for (std::size_t m = 0; m < ngram_.size(); ++m) {
    // Once full, the write pointer sits on the oldest sample.
    const std::size_t start = wp_[m] - base_[m];
    for (std::size_t k = 0; k < ngram_[m]; ++k) {
      order.push_back(base_[m] + (start + k) % ngram_[m]);
    }
  }
  return order;
}

SampleWindow CircularBuffer::snapshot() const {
  require(ready(), ErrorCode::invalid_argument, "circular buffer is not full yet");
  SampleWindow w;
  w.levels.resize(ngram_.size());
  const auto order = read_order();
  std::size_t k = 0;
  for (std::size_t m = 0; m < ngram_.size(); ++m) {
    w.levels[m].reserve(ngram_[m]);
    for (std::size_t n = 0; n < ngram_[m]; ++n) w.levels[m].push_back(storage_[order[k++]]);
  }
  return w;
}

StreamEncoder::StreamEncoder(EncoderConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))), buffer_(cfg_.ngram, cfg_.levels) {}

void StreamEncoder::push_sample(std::span<const std::uint32_t> levels) {
  require(levels.size() == cfg_.channel_count(), ErrorCode::invalid_argument,
          "sample has " + std::to_string(levels.size()) + " channels, expected " +
              std::to_string(cfg_.channel_count()));
  for (std::size_t m = 0; m < levels.size(); ++m) buffer_.push(m, levels[m]);
}

template <typename Source>
std::optional<EncodedNgram> StreamEncoder::tick_impl(Source& source, SeededRng& rng) {
  const std::uint64_t t = ++tick_;
  if (!buffer_.ready()) return std::nullopt;
  if (!first_ready_) first_ready_ = t;
  if ((t - *first_ready_) % cfg_.stride != 0) return std::nullopt;

  EncodeTrace trace;
  EncodedNgram out{encode_adapted(buffer_.snapshot(), source, cfg_, rng, &trace), t, 0, 0};
  out.row_reads = trace.row_reads;
  out.cycles = trace.row_reads + kPipelineCycles;
  return out;
}

std::optional<EncodedNgram> StreamEncoder::encode_tick(const CrossbarImage& image, SeededRng& rng) {
  return tick_impl(image, rng);
}

std::optional<EncodedNgram> StreamEncoder::encode_tick(PcmCrossbar& xbar, SeededRng& rng) {
  return tick_impl(xbar, rng);
}

}  // namespace hdst
