#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdst/encoder.hpp"
#include "hdst/rng.hpp"

namespace hdst {

// Multi-channel recording, one row per time frame.
//
// On disk: a CSV with header `t,ch1,...,chM,label` plus a JSON sidecar next
// to it (same stem, `.json`) holding `sample_rate`, `channel_names` and,
// for already-quantized streams, `levels` (one level count per channel).
struct RawRecording {
  double sample_rate = 0.0;
  std::vector<std::string> channel_names;
  std::vector<double> times;
  std::vector<std::vector<double>> channels;  // [channel][frame]
  std::vector<int> labels;
  // Present when the values are integer level indices.
  std::optional<std::vector<std::size_t>> levels;

  [[nodiscard]] std::size_t channel_count() const noexcept { return channels.size(); }
  [[nodiscard]] std::size_t frame_count() const noexcept { return labels.size(); }
  [[nodiscard]] double duration_seconds() const;
  void validate() const;
};

// Quantized stream: level indices in 1..L_m.
struct LevelStream {
  double sample_rate = 0.0;
  std::vector<std::string> channel_names;
  std::vector<std::size_t> level_counts;
  std::vector<std::vector<std::uint32_t>> levels;  // [channel][frame]
  std::vector<int> labels;

  [[nodiscard]] std::size_t channel_count() const noexcept { return levels.size(); }
  [[nodiscard]] std::size_t frame_count() const noexcept { return labels.size(); }
};

struct QuantizerSpec {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<std::size_t> levels;

  void validate() const;
};

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

// Throws parse errors (with line numbers) for malformed rows and schema
// errors for header/channel-count problems. A missing sidecar is allowed
// (sample_rate stays 0).
RawRecording load_recording(const std::filesystem::path& path,
                            std::optional<std::size_t> expected_channels = std::nullopt);
void write_recording(const std::filesystem::path& path, const RawRecording& rec);
void write_levels(const std::filesystem::path& path, const LevelStream& stream);

// Keeps frames 0, factor, 2*factor, ...
RawRecording downsample(const RawRecording& rec, std::size_t factor);
LevelStream downsample(const LevelStream& stream, std::size_t factor);

// Per-channel min/max over the frames where use[t] is true (all frames when
// use is empty). A constant channel gets max = min + 1.
QuantizerSpec fit_quantizer(const RawRecording& rec, std::span<const std::size_t> levels,
                            std::span<const std::uint8_t> use = {});

// 1 + floor(clamp((v - min) / (max - min), 0, 1 - ulp) * L)
std::uint32_t quantize_value(double v, double min, double max, std::size_t levels);
LevelStream quantize(const RawRecording& rec, const QuantizerSpec& spec);

// Interprets a recording whose sidecar declares level counts.
LevelStream as_level_stream(const RawRecording& rec);

struct LabeledWindow {
  SampleWindow window;
  std::size_t label = 0;
  std::size_t end_frame = 0;
  std::uint8_t group = 0;
};

// Sliding windows (channel m uses its last N_m samples ending at frame t).
// A window is kept only when every frame it touches carries the same label
// and the same group tag; groups may be empty (all frames in group 0).
// Stride counts from the first valid end frame of each run.
std::vector<LabeledWindow> extract_windows(const LevelStream& stream,
                                           std::span<const std::size_t> ngram, std::size_t stride,
                                           std::span<const std::uint8_t> groups = {});

struct SynthConfig {
  std::size_t classes = 5;
  std::vector<std::size_t> ngram;   // per channel
  std::vector<std::size_t> levels;  // per channel
  std::size_t windows_per_class = 400;
  std::size_t noise_level = 1;  // max level jitter, in levels

  [[nodiscard]] std::size_t channel_count() const noexcept { return ngram.size(); }
};

struct SyntheticDataset {
  std::vector<SampleWindow> templates;  // one per class
  std::vector<LabeledWindow> windows;   // class-major, windows_per_class each
};

// Each class is a random per-channel level template; windows are the
// template plus i.i.d. integer jitter in [-noise_level, noise_level],
// clamped to the level range.
SyntheticDataset synth_generate(const SynthConfig& cfg, SeededRng& rng);

// Lays synthetic windows end to end as a level stream (one window per
// max(N_m) frames, shorter channels right-aligned and left-padded with their
// first sample).
LevelStream synth_stream(const SynthConfig& cfg, const SyntheticDataset& data,
                         double sample_rate);

}  // namespace hdst
