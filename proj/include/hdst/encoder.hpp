#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hdst/crossbar.hpp"
#include "hdst/hypervector.hpp"
#include "hdst/memories.hpp"
#include "hdst/rng.hpp"

namespace hdst {

enum class TieBreakMode {
  random_scan_chain,  // append one random vector when the bundle size is even
  error_on_tie,       // reject any dimension that ties
};

enum class EncoderKind {
  adapted,   // in-memory encoder: temporal first, majority last
  baseline,  // conventional encoder: spatial majority first
};

// Cycles the bundler adds after the row reads of one N-gram: one
// accumulate-and-compare cycle and one output-latch cycle.
inline constexpr std::uint64_t kPipelineCycles = 2;

struct EncoderConfig {
  std::size_t dim = 10000;
  std::vector<std::size_t> ngram;   // N_m per channel
  std::vector<std::size_t> levels;  // L_m per channel
  std::uint64_t seed = 0;
  TieBreakMode tie_break = TieBreakMode::random_scan_chain;
  std::size_t stride = 1;

  static EncoderConfig uniform(std::size_t dim, std::size_t channels, std::size_t ngram,
                               std::size_t levels, std::uint64_t seed = 0);

  [[nodiscard]] std::size_t channel_count() const noexcept { return ngram.size(); }
  [[nodiscard]] std::size_t max_ngram() const noexcept;
  [[nodiscard]] std::size_t total_ngram() const noexcept;
  // Shared N when all channels agree.
  [[nodiscard]] std::optional<std::size_t> uniform_ngram() const noexcept;
  [[nodiscard]] std::optional<std::size_t> uniform_levels() const noexcept;

  // Throws config errors. Requires D > max N_m so every rho power used is a
  // distinct rotation.
  void validate() const;
};

// levels[m][n]: 1-based level of channel m at relative time n (0 = oldest).
struct SampleWindow {
  std::vector<std::vector<std::uint32_t>> levels;

  void validate(const EncoderConfig& cfg) const;
  friend bool operator==(const SampleWindow&, const SampleWindow&) = default;
};

// Instrumentation filled by encode_adapted.
struct EncodeTrace {
  std::uint64_t row_reads = 0;
  std::uint64_t binder_updates = 0;  // D-wide XOR + register write per update
  std::uint64_t bundle_inputs = 0;   // vectors fed to the bundler accumulators
  std::uint64_t tie_vectors = 0;     // scan-chain vectors drawn
};

// Majority bundling under the configured tie policy. Draws at most one
// tie-break vector from rng.
Hypervector bundle(std::span<const Hypervector> inputs, TieBreakMode mode, SeededRng& rng);

// Conventional encoder: spatial majority per time step, then the
// permute-and-XOR chain across time. Requires a uniform N.
Hypervector encode_baseline(const SampleWindow& window, const EncoderMemories& memories,
                            const EncoderConfig& cfg, SeededRng& rng);

// In-memory encoder: per-channel binder recurrence over channel-bound rows
// fetched from the crossbar, then majority across channels.
Hypervector encode_adapted(const SampleWindow& window, const CrossbarImage& image,
                           const EncoderConfig& cfg, SeededRng& rng,
                           EncodeTrace* trace = nullptr);
Hypervector encode_adapted(const SampleWindow& window, PcmCrossbar& xbar,
                           const EncoderConfig& cfg, SeededRng& rng,
                           EncodeTrace* trace = nullptr);

// Per-channel ring storage of the last N_m samples. Channel m owns slots
// [base(m), base(m) + N_m); write_pointer(m) is the slot the next sample of
// channel m goes to.
class CircularBuffer {
 public:
  CircularBuffer(std::span<const std::size_t> ngram, std::span<const std::size_t> levels);

  void push(std::size_t channel, std::uint32_t level);

  [[nodiscard]] bool ready() const noexcept;
  [[nodiscard]] std::size_t channel_count() const noexcept { return ngram_.size(); }
  [[nodiscard]] std::size_t filled(std::size_t channel) const { return filled_.at(channel); }
  [[nodiscard]] std::size_t base(std::size_t channel) const { return base_.at(channel); }
  [[nodiscard]] std::size_t write_pointer(std::size_t channel) const { return wp_.at(channel); }
  [[nodiscard]] std::span<const std::uint32_t> storage() const noexcept { return storage_; }

  // Slots in read-pointer order: channel-major, chronological within a channel.
  // Only meaningful once ready().
  [[nodiscard]] std::vector<std::size_t> read_order() const;

  [[nodiscard]] SampleWindow snapshot() const;

 private:
  std::vector<std::size_t> ngram_;
  std::vector<std::size_t> levels_;
  std::vector<std::size_t> base_;
  std::vector<std::size_t> wp_;
  std::vector<std::size_t> filled_;
  std::vector<std::uint32_t> storage_;
};

struct EncodedNgram {
  Hypervector ngram;
  std::uint64_t tick = 0;       // external tick at which the newest sample arrived
  std::uint64_t row_reads = 0;  // counted during this encoding
  std::uint64_t cycles = 0;     // row reads + pipeline cycles
};

// Streaming front end: one circular buffer feeding the adapted encoder.
// Each external tick the caller pushes one sample per channel, then calls
// encode_tick. Encoding is recomputed from the full window on every emit.
class StreamEncoder {
 public:
  explicit StreamEncoder(EncoderConfig cfg);

  void push(std::size_t channel, std::uint32_t level) { buffer_.push(channel, level); }
  // One level per channel.
  void push_sample(std::span<const std::uint32_t> levels);

  std::optional<EncodedNgram> encode_tick(const CrossbarImage& image, SeededRng& rng);
  std::optional<EncodedNgram> encode_tick(PcmCrossbar& xbar, SeededRng& rng);

  [[nodiscard]] const CircularBuffer& buffer() const noexcept { return buffer_; }
  [[nodiscard]] const EncoderConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] std::uint64_t ticks() const noexcept { return tick_; }

 private:
  template <typename Source>
  std::optional<EncodedNgram> tick_impl(Source& source, SeededRng& rng);

  EncoderConfig cfg_;
  CircularBuffer buffer_;
  std::uint64_t tick_ = 0;
  std::optional<std::uint64_t> first_ready_;
};

}  // namespace hdst
