// hdst command-line front end. Builds a JSON override object from the flags
// and hands it to the C API; the report is printed to stdout.
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdst/hdst.h"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> dim;
  std::vector<std::size_t> ngram;
  std::vector<std::size_t> levels;
  std::string noise_preset;
  std::string out;
  std::optional<std::size_t> jobs;
  std::string model;
  bool quiet = false;
};

nlohmann::json build_overrides(const std::string& verb, const Options& o) {
  nlohmann::json j = nlohmann::json::object();
  if (o.seed) {
    j["seed"] = *o.seed;
  } else if (const char* env = std::getenv("HDST_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used, 0);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      j["seed_fallback"] = value;
    } catch (const std::exception&) {
      throw CLI::ValidationError("HDST_SEED", std::string("not an unsigned integer: ") + env);
    }
  }
  if (o.dim) j["encoder"]["dim"] = *o.dim;
  // For sweeps the lists are the grid axes; elsewhere they are per-channel values.
  if (verb == "sweep") {
    if (!o.ngram.empty()) j["sweep"]["ngram"] = o.ngram;
    if (!o.levels.empty()) j["sweep"]["levels"] = o.levels;
  } else {
    if (!o.ngram.empty()) j["encoder"]["ngram"] = o.ngram;
    if (!o.levels.empty()) j["encoder"]["levels"] = o.levels;
  }
  if (!o.noise_preset.empty()) j["noise"]["preset"] = o.noise_preset;
  if (!o.out.empty()) j["out"] = o.out;
  if (o.jobs) j["jobs"] = *o.jobs;
  if (!o.model.empty()) j["model"] = o.model;
  return j;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "global seed (falls back to $HDST_SEED)");
  cmd->add_option("--dim", o.dim, "hypervector dimension D");
  cmd->add_option("--ngram", o.ngram, "N-gram size(s), comma separated")->delimiter(',');
  cmd->add_option("--levels", o.levels, "quantization level count(s), comma separated")
      ->delimiter(',');
  cmd->add_option("--noise-preset", o.noise_preset, "crossbar noise preset")
      ->check(CLI::IsMember({"off", "default"}));
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--jobs", o.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  cmd->add_option("--model", o.model, "model file (eval, single subject)");
  cmd->add_flag("-q,--quiet", o.quiet, "do not print the report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperdimensional spatio-temporal encoding: train, evaluate and cost models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hdst_version());

  Options opts;
  const std::vector<std::pair<const char*, const char*>> verbs = {
      {"prepare", "down-sample and quantize datasets into level CSV files"},
      {"train", "train per-subject models; writes model file(s) and metrics.json"},
      {"eval", "evaluate trained models; writes eval.json"},
      {"sweep", "accuracy and cost over an N x L grid; writes sweep.csv and sweep.json"},
      {"compare", "baseline vs in-memory encoder divergence; writes compare.json"},
      {"cost", "operation counts and energy; writes cost.json"},
  };
  for (const auto& [name, help] : verbs) add_common(app.add_subcommand(name, help), opts);

  CLI11_PARSE(app, argc, argv);
  const std::string verb = app.get_subcommands().front()->get_name();

  nlohmann::json overrides;
  try {
    overrides = build_overrides(verb, opts);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }

  char* report = nullptr;
  const std::string overrides_text = overrides.dump();
  const hdst_status st = hdst_run_command(verb.c_str(), opts.config.empty() ? nullptr : opts.config.c_str(),
                                          overrides_text.c_str(), &report);
  if (report != nullptr) {
    if (!opts.quiet) std::cout << report << '\n';
    hdst_string_free(report);
  }
  if (st != HDST_OK) {
    std::cerr << "hdst " << verb << ": " << hdst_status_string(st) << ": " << hdst_last_error()
              << '\n';
    return static_cast<int>(st);
  }
  return 0;
}
