#include "app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "app/pipeline.hpp"
#include "hdst/error.hpp"

namespace hdst::app {

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kCellTag = 0xce11;

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  require(out.good(), ErrorCode::io, "error while writing " + path.string());
}

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  require(!ec, ErrorCode::io, "cannot create output directory " + cfg.out.string() + ": " +
                                  ec.message());
}

// JSON has no infinity; encode it as null.
ordered_json number(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Settings that shape results; output location and thread count are left out
// so reports compare byte-for-byte across directories and --jobs values.
ordered_json report_config(const RunConfig& cfg) {
  auto j = to_json(cfg);
  j.erase("out");
  j.erase("jobs");
  j.erase("model");
  return j;
}

ordered_json confusion_json(const EvalResult& r) { return r.confusion; }

EncoderConfig run_encoder(const RunConfig& cfg) {
  return cfg.encoder_config(data_channel_count(cfg));
}

// Eval runs on the model's encoder; explicitly requested values must agree.
void check_model_matches(const RunConfig& cfg, const TrainedModel& model,
                         const std::filesystem::path& path) {
  const auto& mc = model.config;
  if (cfg.dim_explicit && cfg.dim != mc.dim) {
    fail(ErrorCode::dimension_mismatch, path.string() + ": model has dim " +
                                            std::to_string(mc.dim) + ", config asks for " +
                                            std::to_string(cfg.dim));
  }
  const auto expanded = [&](const std::vector<std::size_t>& v) {
    return v.size() == 1 ? std::vector<std::size_t>(mc.channel_count(), v.front()) : v;
  };
  if (cfg.ngram_explicit && expanded(cfg.ngram) != mc.ngram) {
    fail(ErrorCode::config, path.string() + ": model ngram sizes differ from the config");
  }
  if (cfg.levels_explicit && expanded(cfg.levels) != mc.levels) {
    fail(ErrorCode::config, path.string() + ": model level counts differ from the config");
  }
  const std::size_t channels = data_channel_count(cfg);
  if (channels != mc.channel_count()) {
    fail(ErrorCode::dimension_mismatch,
         path.string() + ": model has " + std::to_string(mc.channel_count()) +
             " channels, data has " + std::to_string(channels));
  }
}

RunConfig cell_config(const RunConfig& cfg, std::size_t ngram, std::size_t levels) {
  RunConfig c = cfg;
  c.seed = cell_seed(cfg.seed, ngram, levels);
  if (!c.noise_seed_explicit) c.noise.seed = default_noise_seed(c.seed);
  c.ngram = {ngram};
  c.levels = {levels};
  return c;
}

SweepCell run_cell(const RunConfig& cfg, std::size_t ngram, std::size_t levels) {
  SweepCell cell;
  cell.ngram = ngram;
  cell.levels = levels;
  const RunConfig c = cell_config(cfg, ngram, levels);
  cell.seed = c.seed;
  try {
    const EncoderConfig enc = run_encoder(c);
    cell.cost = estimate(enc, c.energy);
    std::vector<double> software;
    std::vector<double> crossbar;
    for (std::size_t s = 0; s < subject_count(c); ++s) {
      const SubjectData data = load_subject(c, s, enc);
      const TrainedModel model = train_model(data, c.encoder);
      const auto windows = data.select(c.data.eval_split);
      software.push_back(evaluate(model, windows, data.classes, std::nullopt).accuracy());
      if (!c.noise.is_zero()) {
        crossbar.push_back(evaluate(model, windows, data.classes, c.noise).accuracy());
      }
      cell.train_windows += data.train.size();
      cell.test_windows += windows.size();
    }
    cell.accuracy_software = mean(software);
    if (!crossbar.empty()) cell.accuracy_crossbar = mean(crossbar);
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t global_seed, std::size_t ngram, std::size_t levels) {
  return derive_seed(global_seed, kCellTag, ngram, levels);
}

std::filesystem::path model_path(const RunConfig& cfg, std::size_t subject) {
  if (cfg.model && subject_count(cfg) == 1) return *cfg.model;
  if (subject_count(cfg) == 1) return cfg.out / "model.bin";
  return cfg.out / ("model_" + std::to_string(subject) + ".bin");
}

ordered_json to_json(const CostReport& r) {
  ordered_json j;
  j["crossbar_row_reads"] = r.crossbar_row_reads;
  j["xor_ops"] = r.xor_ops;
  j["xor_ops_saved_by_precompute"] = r.xor_ops_saved_by_precompute;
  j["register_writes"] = r.register_writes;
  j["accumulator_ops"] = r.accumulator_ops;
  j["cycles_per_ngram"] = r.cycles_per_ngram;
  j["crossbar_read_energy_J"] = number(r.crossbar_read_energy_J);
  j["energy_per_ngram_J"] = number(r.energy_per_ngram_J);
  j["ngrams_per_second"] = number(r.ngrams_per_second);
  j["ngrams_per_second_per_watt"] = number(r.ngrams_per_second_per_watt);
  return j;
}

CommandResult cmd_prepare(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  CommandResult result;
  auto& rep = result.report;
  rep["command"] = "prepare";
  rep["files"] = ordered_json::array();

  if (cfg.data.source == DataSource::synthetic) {
    const EncoderConfig enc = run_encoder(cfg);
    SynthConfig sc;
    sc.classes = cfg.data.synthetic.classes;
    sc.ngram = enc.ngram;
    sc.levels = enc.levels;
    sc.windows_per_class = cfg.data.synthetic.windows_per_class;
    sc.noise_level = cfg.data.synthetic.noise_level;
    SeededRng rng(derive_seed(cfg.seed, 0xda7a, 0));
    const auto data = synth_generate(sc, rng);
    const auto stream = synth_stream(sc, data, cfg.data.synthetic.sample_rate);
    const auto path = cfg.out / "synthetic.csv";
    write_levels(path, stream);
    rep["files"].push_back({{"path", path.string()},
                            {"frames", stream.frame_count()},
                            {"channels", stream.channel_count()},
                            {"classes", sc.classes}});
    return result;
  }

  const std::size_t channels = data_channel_count(cfg);
  const EncoderConfig enc = cfg.encoder_config(channels);
  for (std::size_t s = 0; s < subject_count(cfg); ++s) {
    const auto prepared = prepare_stream(cfg, s, enc.levels);
    const auto path = cfg.out / (prepared.name + "_levels.csv");
    write_levels(path, prepared.stream);
    ordered_json f = {{"path", path.string()},
                      {"frames", prepared.stream.frame_count()},
                      {"channels", prepared.stream.channel_count()}};
    if (prepared.quantizer) {
      f["quantizer"] = {{"min", prepared.quantizer->min},
                        {"max", prepared.quantizer->max},
                        {"levels", prepared.quantizer->levels}};
    }
    rep["files"].push_back(f);
  }
  return result;
}

CommandResult cmd_train(const RunConfig& cfg) {
  const EncoderConfig enc = run_encoder(cfg);
  ensure_out_dir(cfg);

  CommandResult result;
  auto& rep = result.report;
  rep["command"] = "train";
  rep["config"] = report_config(cfg);
  rep["subjects"] = ordered_json::array();
  std::vector<double> accuracies;
  for (std::size_t s = 0; s < subject_count(cfg); ++s) {
    const SubjectData data = load_subject(cfg, s, enc);
    const TrainedModel model = train_model(data, cfg.encoder);
    const auto path = model_path(cfg, s);
    save_model(path, model);
    const EvalResult fit = evaluate(model, data.train, data.classes, std::nullopt);
    accuracies.push_back(fit.accuracy());
    rep["subjects"].push_back({{"name", data.name},
                               {"model", path.filename().string()},
                               {"classes", data.classes},
                               {"train_windows", data.train.size()},
                               {"test_windows", data.test.size()},
                               {"train_accuracy", fit.accuracy()}});
  }
  rep["mean_train_accuracy"] = mean(accuracies);
  write_json(cfg.out / "metrics.json", rep);
  return result;
}

CommandResult cmd_eval(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  CommandResult result;
  auto& rep = result.report;
  rep["command"] = "eval";
  rep["config"] = report_config(cfg);
  rep["subjects"] = ordered_json::array();
  const bool noisy = !cfg.noise.is_zero();
  std::vector<double> software;
  std::vector<double> crossbar;
  for (std::size_t s = 0; s < subject_count(cfg); ++s) {
    const auto path = model_path(cfg, s);
    const TrainedModel model = load_model(path);
    check_model_matches(cfg, model, path);
    const SubjectData data = load_subject(cfg, s, model.config, model.quantizer);
    const auto windows = data.select(cfg.data.eval_split);
    require(!windows.empty(), ErrorCode::data, data.name + ": no windows to evaluate");

    const EvalResult sw = evaluate(model, windows, data.classes, std::nullopt);
    software.push_back(sw.accuracy());
    ordered_json subj = {{"name", data.name},
                         {"model", path.filename().string()},
                         {"queries", sw.queries},
                         {"accuracy_software", sw.accuracy()},
                         {"confusion_software", confusion_json(sw)}};
    if (noisy) {
      const EvalResult xb = evaluate(model, windows, data.classes, cfg.noise);
      crossbar.push_back(xb.accuracy());
      subj["accuracy_crossbar"] = xb.accuracy();
      subj["confusion_crossbar"] = confusion_json(xb);
    }
    rep["subjects"].push_back(subj);
  }
  rep["mean_accuracy_software"] = mean(software);
  rep["mean_accuracy_crossbar"] = noisy ? ordered_json(mean(crossbar)) : ordered_json(nullptr);
  write_json(cfg.out / "eval.json", rep);
  return result;
}

std::vector<SweepCell> run_sweep_cells(const RunConfig& cfg, std::span<const std::size_t> order) {
  const std::size_t n_levels = cfg.sweep_levels.size();
  const std::size_t total = cfg.sweep_ngram.size() * n_levels;
  std::vector<SweepCell> cells(total);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < order.size(); k = next++) {
      const std::size_t idx = order[k];
      cells[idx] = run_cell(cfg, cfg.sweep_ngram[idx / n_levels], cfg.sweep_levels[idx % n_levels]);
    }
  };
  const std::size_t workers = std::min(cfg.jobs, std::max<std::size_t>(order.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  return cells;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  const std::size_t total = cfg.sweep_ngram.size() * cfg.sweep_levels.size();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto cells = run_sweep_cells(cfg, order);

  CommandResult result;
  auto& rep = result.report;
  rep["command"] = "sweep";
  rep["config"] = report_config(cfg);
  rep["cells"] = ordered_json::array();
  std::size_t failures = 0;

  std::ofstream csv(cfg.out / "sweep.csv", std::ios::trunc);
  require(csv.good(), ErrorCode::io, "cannot write sweep.csv");
  csv << "ngram,levels,seed,status,accuracy_software,accuracy_crossbar,train_windows,"
         "test_windows,crossbar_row_reads,xor_ops,xor_ops_saved_by_precompute,cycles_per_ngram,"
         "energy_per_ngram_J,ngrams_per_second,ngrams_per_second_per_watt,error\n";
  for (const auto& c : cells) {
    if (!c.ok) ++failures;
    ordered_json j = {{"ngram", c.ngram},
                      {"levels", c.levels},
                      {"seed", c.seed},
                      {"status", c.ok ? "ok" : "error"}};
    if (c.ok) {
      j["accuracy_software"] = c.accuracy_software;
      j["accuracy_crossbar"] = c.accuracy_crossbar ? ordered_json(*c.accuracy_crossbar)
                                                   : ordered_json(nullptr);
      j["train_windows"] = c.train_windows;
      j["test_windows"] = c.test_windows;
      j["cost"] = to_json(c.cost);
    } else {
      j["error"] = c.error;
    }
    rep["cells"].push_back(j);

    std::string err = c.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    csv << c.ngram << ',' << c.levels << ',' << c.seed << ',' << (c.ok ? "ok" : "error") << ','
        << (c.ok ? csv_number(c.accuracy_software) : "") << ','
        << (c.accuracy_crossbar ? csv_number(*c.accuracy_crossbar) : "") << ','
        << c.train_windows << ',' << c.test_windows << ',' << c.cost.crossbar_row_reads << ','
        << c.cost.xor_ops << ',' << c.cost.xor_ops_saved_by_precompute << ','
        << c.cost.cycles_per_ngram << ',' << csv_number(c.cost.energy_per_ngram_J) << ','
        << csv_number(c.cost.ngrams_per_second) << ','
        << csv_number(c.cost.ngrams_per_second_per_watt) << ',' << err << '\n';
  }
  require(csv.good(), ErrorCode::io, "error while writing sweep.csv");
  rep["failed_cells"] = failures;
  write_json(cfg.out / "sweep.json", rep);
  result.partial_failure = failures > 0;
  return result;
}

CommandResult cmd_compare(const RunConfig& cfg) {
  const EncoderConfig enc = run_encoder(cfg);
  require(enc.uniform_ngram().has_value(), ErrorCode::unsupported_config,
          "compare needs the same ngram size on every channel (conventional encoder constraint)");
  ensure_out_dir(cfg);

  CommandResult result;
  auto& rep = result.report;
  rep["command"] = "compare";
  rep["config"] = report_config(cfg);
  rep["subjects"] = ordered_json::array();

  const std::size_t bins = cfg.histogram_bins;
  const std::size_t width = (enc.dim + 1 + bins - 1) / bins;
  std::vector<std::uint64_t> histogram(bins, 0);
  std::size_t total = 0;
  std::size_t exact = 0;
  std::size_t agree = 0;
  for (std::size_t s = 0; s < subject_count(cfg); ++s) {
    const SubjectData data = load_subject(cfg, s, enc);
    const TrainedModel base = train_model(data, EncoderKind::baseline);
    const TrainedModel adapted = train_model(data, EncoderKind::adapted);
    const auto windows = data.select(cfg.data.eval_split);
    const auto g = encode_windows(base, EncoderKind::baseline, windows);
    const auto g_adapted = encode_windows(adapted, EncoderKind::adapted, windows);
    const EvalResult eb = evaluate(base, windows, data.classes, std::nullopt);
    const EvalResult ea = evaluate(adapted, windows, data.classes, std::nullopt);

    std::size_t subj_exact = 0;
    std::size_t subj_agree = 0;
    double hamming_sum = 0.0;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const std::size_t h = hamming(g[i], g_adapted[i]);
      hamming_sum += static_cast<double>(h);
      ++histogram[std::min(h / width, bins - 1)];
      if (h == 0) ++subj_exact;
      if (eb.predictions[i] == ea.predictions[i]) ++subj_agree;
    }
    const double n = windows.empty() ? 1.0 : static_cast<double>(windows.size());
    rep["subjects"].push_back({{"name", data.name},
                               {"queries", windows.size()},
                               {"bit_exact_fraction", static_cast<double>(subj_exact) / n},
                               {"mean_hamming", hamming_sum / n},
                               {"prediction_agreement", static_cast<double>(subj_agree) / n},
                               {"accuracy_baseline", eb.accuracy()},
                               {"accuracy_adapted", ea.accuracy()}});
    total += windows.size();
    exact += subj_exact;
    agree += subj_agree;
  }
  const double n = total == 0 ? 1.0 : static_cast<double>(total);
  rep["queries"] = total;
  rep["bit_exact_fraction"] = static_cast<double>(exact) / n;
  rep["prediction_agreement"] = static_cast<double>(agree) / n;
  ordered_json edges = ordered_json::array();
  for (std::size_t b = 0; b <= bins; ++b) edges.push_back(std::min(b * width, enc.dim + 1));
  rep["hamming_histogram"] = {{"bin_edges", edges}, {"counts", histogram}};
  write_json(cfg.out / "compare.json", rep);
  return result;
}

CommandResult cmd_cost(const RunConfig& cfg) {
  // Per-channel lists fix the channel count; no data is needed.
  const std::size_t listed = std::max(cfg.ngram.size(), cfg.levels.size());
  const EncoderConfig enc =
      listed > 1 ? cfg.encoder_config(listed) : run_encoder(cfg);
  enc.validate();
  ensure_out_dir(cfg);
  CommandResult result;
  auto& rep = result.report;
  rep["command"] = "cost";
  rep["dim"] = enc.dim;
  rep["ngram"] = enc.ngram;
  rep["levels"] = enc.levels;
  rep["pipeline_cycles"] = kPipelineCycles;
  rep["energy"] = to_json(cfg)["energy"];
  rep["report"] = to_json(estimate(enc, cfg.energy));
  write_json(cfg.out / "cost.json", rep);
  return result;
}

CommandResult run_command(std::string_view verb, const RunConfig& cfg) {
  if (verb == "prepare") return cmd_prepare(cfg);
  if (verb == "train") return cmd_train(cfg);
  if (verb == "eval") return cmd_eval(cfg);
  if (verb == "sweep") return cmd_sweep(cfg);
  if (verb == "compare") return cmd_compare(cfg);
  if (verb == "cost") return cmd_cost(cfg);
  fail(ErrorCode::invalid_argument, "unknown command '" + std::string(verb) + "'");
}

}  // namespace hdst::app
