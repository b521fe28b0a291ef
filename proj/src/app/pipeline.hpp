#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "app/run_config.hpp"
#include "hdst/dataio.hpp"
#include "hdst/learner.hpp"
#include "hdst/model_io.hpp"

namespace hdst::app {

// One subject's windows, split into train and test.
struct SubjectData {
  std::string name;
  EncoderConfig encoder;
  std::size_t classes = 0;
  std::optional<QuantizerSpec> quantizer;
  std::vector<LabeledWindow> train;
  std::vector<LabeledWindow> test;

  [[nodiscard]] std::vector<LabeledWindow> select(EvalSplit split) const;
};

std::size_t subject_count(const RunConfig& cfg);
std::size_t data_channel_count(const RunConfig& cfg);

// CSV subject after downsampling, split tagging and quantization.
struct PreparedStream {
  std::string name;
  LevelStream stream;
  std::vector<std::uint8_t> groups;  // kTrainGroup / kTestGroup per frame
  std::optional<QuantizerSpec> quantizer;
};

inline constexpr std::uint8_t kTrainGroup = 1;
inline constexpr std::uint8_t kTestGroup = 2;

PreparedStream prepare_stream(const RunConfig& cfg, std::size_t subject,
                              std::span<const std::size_t> levels,
                              const std::optional<QuantizerSpec>& frozen = std::nullopt);

// Synthetic source: templates + jitter, split per class by train_fraction.
// CSV source: load, downsample, split each class's frames chronologically
// (first train_fraction to train), fit the quantizer on train frames unless
// one is frozen or configured, then cut sliding windows that stay inside one
// label and one split.
SubjectData load_subject(const RunConfig& cfg, std::size_t subject, const EncoderConfig& enc,
                         const std::optional<QuantizerSpec>& frozen = std::nullopt);

// Noiseless software training: encode every train window, bundle per class.
TrainedModel train_model(const SubjectData& data, EncoderKind kind);

struct EvalResult {
  std::size_t queries = 0;
  std::size_t correct = 0;
  std::vector<std::vector<std::uint64_t>> confusion;  // [true][predicted]
  std::vector<std::size_t> predictions;
  std::vector<std::vector<double>> scores;

  [[nodiscard]] double accuracy() const;
};

// Software path (noise == nullopt): software encoder + dot-product search.
// In-memory path: encoder rows and prototypes programmed into crossbars with
// the given noise; the baseline encoder stays in software and only the
// search runs on the crossbar.
EvalResult evaluate(const TrainedModel& model, std::span<const LabeledWindow> windows,
                    std::size_t classes, const std::optional<NoiseParams>& noise);

// Software encoding of windows with the model's encoder.
std::vector<Hypervector> encode_windows(const TrainedModel& model, EncoderKind kind,
                                        std::span<const LabeledWindow> windows);

}  // namespace hdst::app
