#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdst/costmodel.hpp"
#include "hdst/crossbar.hpp"
#include "hdst/encoder.hpp"

namespace hdst::app {

enum class DataSource { synthetic, csv };
enum class EvalSplit { test, train, all };

struct SyntheticParams {
  std::size_t classes = 5;
  std::size_t channels = 4;
  std::size_t windows_per_class = 400;
  std::size_t noise_level = 1;
  double sample_rate = 500.0;
};

struct DataConfig {
  DataSource source = DataSource::synthetic;
  std::vector<std::filesystem::path> files;  // one per subject
  std::size_t downsample = 1;
  double train_fraction = 0.25;
  EvalSplit eval_split = EvalSplit::test;
  SyntheticParams synthetic;
};

// Everything a command needs. Every field has a default; a JSON config file
// and then CLI overrides are merged on top.
struct RunConfig {
  std::uint64_t seed = 1;

  EncoderKind encoder = EncoderKind::adapted;
  std::size_t dim = 10000;
  std::vector<std::size_t> ngram = {5};    // one entry = same for every channel
  std::vector<std::size_t> levels = {15};  // one entry = same for every channel
  TieBreakMode tie_break = TieBreakMode::random_scan_chain;
  std::size_t stride = 1;

  std::string noise_preset = "off";
  NoiseParams noise;

  EnergyParams energy;

  std::optional<std::vector<double>> quantizer_min;
  std::optional<std::vector<double>> quantizer_max;

  DataConfig data;

  std::vector<std::size_t> sweep_ngram = {3, 5, 9};
  std::vector<std::size_t> sweep_levels = {3, 12, 21};

  std::size_t histogram_bins = 20;

  std::filesystem::path out = "out";
  std::size_t jobs = 1;
  std::optional<std::filesystem::path> model;

  // Which encoder fields were set explicitly (file or flags) rather than defaulted.
  bool dim_explicit = false;
  bool ngram_explicit = false;
  bool levels_explicit = false;
  bool noise_seed_explicit = false;

  void validate() const;

  // Encoder config for a given channel count, broadcasting single-entry lists.
  [[nodiscard]] EncoderConfig encoder_config(std::size_t channels) const;
};

// Merges defaults <- config file (if any) <- overrides. The overrides object
// uses the config file layout, plus an optional top-level "seed_fallback"
// applied only when neither the file nor the overrides set "seed".
RunConfig load_run_config(const std::optional<std::filesystem::path>& file,
                          const nlohmann::json& overrides);
RunConfig parse_run_config(const nlohmann::json& doc);

nlohmann::ordered_json to_json(const RunConfig& cfg);

// Noise seed used when the config does not pin one.
std::uint64_t default_noise_seed(std::uint64_t seed);

const char* to_string(EncoderKind kind);
const char* to_string(TieBreakMode mode);

}  // namespace hdst::app
