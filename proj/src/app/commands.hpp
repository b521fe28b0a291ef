#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "app/run_config.hpp"
#include "hdst/costmodel.hpp"

namespace hdst::app {

struct CommandResult {
  nlohmann::ordered_json report;
  // Set by sweep when one or more grid cells failed; the report is still valid.
  bool partial_failure = false;
};

// Dispatches prepare | train | eval | sweep | compare | cost.
CommandResult run_command(std::string_view verb, const RunConfig& cfg);

CommandResult cmd_prepare(const RunConfig& cfg);
CommandResult cmd_train(const RunConfig& cfg);
CommandResult cmd_eval(const RunConfig& cfg);
CommandResult cmd_sweep(const RunConfig& cfg);
CommandResult cmd_compare(const RunConfig& cfg);
CommandResult cmd_cost(const RunConfig& cfg);

// Model file of subject i: model.bin for a single subject, model_<i>.bin otherwise.
std::filesystem::path model_path(const RunConfig& cfg, std::size_t subject);

// Seed of the (N, L) sweep cell. Running train + eval with this seed and a
// 1x1 grid's N and L reproduces the cell.
std::uint64_t cell_seed(std::uint64_t global_seed, std::size_t ngram, std::size_t levels);

struct SweepCell {
  std::size_t ngram = 0;
  std::size_t levels = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double accuracy_software = 0.0;
  std::optional<double> accuracy_crossbar;
  std::size_t train_windows = 0;
  std::size_t test_windows = 0;
  CostReport cost;
};

// Evaluates grid cells; `order` lists cell indices (row-major over
// ngram x levels) in the order they are handed to workers. Results are
// returned in grid order regardless.
std::vector<SweepCell> run_sweep_cells(const RunConfig& cfg, std::span<const std::size_t> order);

nlohmann::ordered_json to_json(const CostReport& r);

}  // namespace hdst::app
