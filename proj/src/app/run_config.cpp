#include "app/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "hdst/error.hpp"

namespace hdst::app {

namespace {

using nlohmann::json;

constexpr std::uint64_t kNoiseSeedTag = 0x5e;

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& section) {
  require(obj.is_object(), ErrorCode::config, section + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorCode::config, "unknown key '" + key + "' in " + section);
    }
  }
}

template <typename T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::config, "invalid value for " + where + ": " + j.dump());
  }
}

std::vector<std::size_t> size_list(const json& j, const std::string& where) {
  if (j.is_array()) return get_as<std::vector<std::size_t>>(j, where);
  return {get_as<std::size_t>(j, where)};
}

template <typename T>
void read(const json& obj, const char* key, T& dst, const std::string& section) {
  if (obj.contains(key)) dst = get_as<T>(obj.at(key), section + "." + key);
}

TieBreakMode parse_tie(const std::string& s) {
  if (s == "random" || s == "random-scan-chain") return TieBreakMode::random_scan_chain;
  if (s == "error" || s == "error-on-tie") return TieBreakMode::error_on_tie;
  fail(ErrorCode::config, "encoder.tie_break must be 'random' or 'error', got '" + s + "'");
}

EncoderKind parse_kind(const std::string& s) {
  if (s == "adapted") return EncoderKind::adapted;
  if (s == "baseline") return EncoderKind::baseline;
  fail(ErrorCode::config, "encoder.kind must be 'adapted' or 'baseline', got '" + s + "'");
}

void apply_noise_preset(const std::string& preset, NoiseParams& noise) {
  if (preset == "off") {
    noise = NoiseParams::off();
  } else if (preset == "default") {
    noise = NoiseParams::defaults();
  } else {
    fail(ErrorCode::config, "noise.preset must be 'off' or 'default', got '" + preset + "'");
  }
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open config file " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    fail(ErrorCode::config, path.string() + ": " + e.what());
  }
}

}  // namespace

std::uint64_t default_noise_seed(std::uint64_t seed) { return derive_seed(seed, kNoiseSeedTag); }

const char* to_string(EncoderKind kind) {
  return kind == EncoderKind::adapted ? "adapted" : "baseline";
}

const char* to_string(TieBreakMode mode) {
  return mode == TieBreakMode::random_scan_chain ? "random" : "error";
}

RunConfig parse_run_config(const json& doc) {
  RunConfig cfg;
  if (doc.is_null()) return cfg;
  check_keys(doc, {"seed", "encoder", "noise", "energy", "quantizer", "data", "sweep", "compare",
                   "out", "jobs", "model"},
             "config");
  read(doc, "seed", cfg.seed, "config");

  if (doc.contains("encoder")) {
    const auto& e = doc.at("encoder");
    check_keys(e, {"kind", "dim", "ngram", "levels", "tie_break", "stride"}, "encoder");
    if (e.contains("kind")) cfg.encoder = parse_kind(get_as<std::string>(e.at("kind"), "encoder.kind"));
    if (e.contains("dim")) {
      cfg.dim = get_as<std::size_t>(e.at("dim"), "encoder.dim");
      cfg.dim_explicit = true;
    }
    if (e.contains("ngram")) {
      cfg.ngram = size_list(e.at("ngram"), "encoder.ngram");
      cfg.ngram_explicit = true;
    }
    if (e.contains("levels")) {
      cfg.levels = size_list(e.at("levels"), "encoder.levels");
      cfg.levels_explicit = true;
    }
    if (e.contains("tie_break")) {
      cfg.tie_break = parse_tie(get_as<std::string>(e.at("tie_break"), "encoder.tie_break"));
    }
    read(e, "stride", cfg.stride, "encoder");
  }

  std::optional<std::uint64_t> noise_seed;
  if (doc.contains("noise")) {
    const auto& n = doc.at("noise");
    check_keys(n, {"preset", "p_program_flip", "p_read_01", "p_read_10", "p_read", "am_sigma",
                   "subarray_rows", "seed"},
               "noise");
    read(n, "preset", cfg.noise_preset, "noise");
    apply_noise_preset(cfg.noise_preset, cfg.noise);
    read(n, "p_program_flip", cfg.noise.p_program_flip, "noise");
    if (n.contains("p_read")) {
      cfg.noise.p_read_01 = cfg.noise.p_read_10 = get_as<double>(n.at("p_read"), "noise.p_read");
    }
    read(n, "p_read_01", cfg.noise.p_read_01, "noise");
    read(n, "p_read_10", cfg.noise.p_read_10, "noise");
    read(n, "am_sigma", cfg.noise.am_sigma, "noise");
    read(n, "subarray_rows", cfg.noise.subarray_rows, "noise");
    if (n.contains("seed")) noise_seed = get_as<std::uint64_t>(n.at("seed"), "noise.seed");
  }
  cfg.noise_seed_explicit = noise_seed.has_value();
  cfg.noise.seed = noise_seed.value_or(derive_seed(cfg.seed, kNoiseSeedTag));

  if (doc.contains("energy")) {
    const auto& e = doc.at("energy");
    check_keys(e, {"e_pcm_read_device", "e_xor_gate", "e_register_write", "e_accumulator_inc",
                   "e_sense_amp", "internal_clock_hz"},
               "energy");
    read(e, "e_pcm_read_device", cfg.energy.e_pcm_read_device, "energy");
    read(e, "e_xor_gate", cfg.energy.e_xor_gate, "energy");
    read(e, "e_register_write", cfg.energy.e_register_write, "energy");
    read(e, "e_accumulator_inc", cfg.energy.e_accumulator_inc, "energy");
    read(e, "e_sense_amp", cfg.energy.e_sense_amp, "energy");
    read(e, "internal_clock_hz", cfg.energy.internal_clock_hz, "energy");
  }

  if (doc.contains("quantizer")) {
    const auto& q = doc.at("quantizer");
    check_keys(q, {"min", "max"}, "quantizer");
    if (q.contains("min")) cfg.quantizer_min = get_as<std::vector<double>>(q.at("min"), "quantizer.min");
    if (q.contains("max")) cfg.quantizer_max = get_as<std::vector<double>>(q.at("max"), "quantizer.max");
  }

  if (doc.contains("data")) {
    const auto& d = doc.at("data");
    check_keys(d, {"source", "files", "downsample", "train_fraction", "eval_split", "synthetic"},
               "data");
    if (d.contains("source")) {
      const auto s = get_as<std::string>(d.at("source"), "data.source");
      if (s == "synthetic") {
        cfg.data.source = DataSource::synthetic;
      } else if (s == "csv") {
        cfg.data.source = DataSource::csv;
      } else {
        fail(ErrorCode::config, "data.source must be 'synthetic' or 'csv', got '" + s + "'");
      }
    }
    if (d.contains("files")) {
      cfg.data.files.clear();
      for (const auto& f : get_as<std::vector<std::string>>(d.at("files"), "data.files")) {
        cfg.data.files.emplace_back(f);
      }
      if (!d.contains("source")) cfg.data.source = DataSource::csv;
    }
    read(d, "downsample", cfg.data.downsample, "data");
    read(d, "train_fraction", cfg.data.train_fraction, "data");
    if (d.contains("eval_split")) {
      const auto s = get_as<std::string>(d.at("eval_split"), "data.eval_split");
      if (s == "test") {
        cfg.data.eval_split = EvalSplit::test;
      } else if (s == "train") {
        cfg.data.eval_split = EvalSplit::train;
      } else if (s == "all") {
        cfg.data.eval_split = EvalSplit::all;
      } else {
        fail(ErrorCode::config, "data.eval_split must be 'test', 'train' or 'all', got '" + s + "'");
      }
    }
    if (d.contains("synthetic")) {
      const auto& s = d.at("synthetic");
      check_keys(s, {"classes", "channels", "windows_per_class", "noise_level", "sample_rate"},
                 "data.synthetic");
      read(s, "classes", cfg.data.synthetic.classes, "data.synthetic");
      read(s, "channels", cfg.data.synthetic.channels, "data.synthetic");
      read(s, "windows_per_class", cfg.data.synthetic.windows_per_class, "data.synthetic");
      read(s, "noise_level", cfg.data.synthetic.noise_level, "data.synthetic");
      read(s, "sample_rate", cfg.data.synthetic.sample_rate, "data.synthetic");
    }
  }

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    check_keys(s, {"ngram", "levels"}, "sweep");
    if (s.contains("ngram")) cfg.sweep_ngram = size_list(s.at("ngram"), "sweep.ngram");
    if (s.contains("levels")) cfg.sweep_levels = size_list(s.at("levels"), "sweep.levels");
  }
  if (doc.contains("compare")) {
    const auto& c = doc.at("compare");
    check_keys(c, {"histogram_bins"}, "compare");
    read(c, "histogram_bins", cfg.histogram_bins, "compare");
  }
  if (doc.contains("out")) cfg.out = get_as<std::string>(doc.at("out"), "out");
  read(doc, "jobs", cfg.jobs, "config");
  if (doc.contains("model")) cfg.model = get_as<std::string>(doc.at("model"), "model");
  return cfg;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& file,
                          const json& overrides) {
  json doc = json::object();
  if (file) doc = read_file(*file);
  require(doc.is_object(), ErrorCode::config, "config file must hold a JSON object");

  json patch = overrides.is_null() ? json::object() : overrides;
  require(patch.is_object(), ErrorCode::config, "overrides must be a JSON object");
  std::optional<json> fallback;
  if (patch.contains("seed_fallback")) {
    fallback = patch.at("seed_fallback");
    patch.erase("seed_fallback");
  }
  // A preset given on the command line resets the noise section it overrides.
  if (patch.contains("noise") && patch.at("noise").contains("preset") && doc.contains("noise")) {
    doc.erase("noise");
  }
  doc.merge_patch(patch);
  if (!doc.contains("seed") && fallback) doc["seed"] = *fallback;

  RunConfig cfg = parse_run_config(doc);
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  require(dim >= 1, ErrorCode::config, "encoder.dim must be >= 1");
  require(!ngram.empty() && !levels.empty(), ErrorCode::config,
          "encoder.ngram and encoder.levels must not be empty");
  require(stride >= 1, ErrorCode::config, "encoder.stride must be >= 1");
  noise.validate();
  energy.validate();
  require(data.train_fraction > 0.0 && data.train_fraction <= 1.0, ErrorCode::config,
          "data.train_fraction must lie in (0, 1], got " + std::to_string(data.train_fraction));
  require(data.downsample >= 1, ErrorCode::config, "data.downsample must be >= 1");
  if (data.source == DataSource::csv) {
    require(!data.files.empty(), ErrorCode::config,
            "data.source is 'csv' but data.files is empty");
  } else {
    require(data.synthetic.classes >= 2, ErrorCode::config, "data.synthetic.classes must be >= 2");
    require(data.synthetic.channels >= 1, ErrorCode::config,
            "data.synthetic.channels must be >= 1");
    require(data.synthetic.windows_per_class >= 1, ErrorCode::config,
            "data.synthetic.windows_per_class must be >= 1");
  }
  require(!sweep_ngram.empty() && !sweep_levels.empty(), ErrorCode::config,
          "sweep grids must not be empty");
  require(jobs >= 1, ErrorCode::config, "jobs must be >= 1");
  require(histogram_bins >= 1, ErrorCode::config, "compare.histogram_bins must be >= 1");
  require(quantizer_min.has_value() == quantizer_max.has_value(), ErrorCode::config,
          "quantizer.min and quantizer.max must be given together");
}

EncoderConfig RunConfig::encoder_config(std::size_t channels) const {
  const auto expand = [&](const std::vector<std::size_t>& v, const char* name) {
    if (v.size() == 1) return std::vector<std::size_t>(channels, v.front());
    require(v.size() == channels, ErrorCode::config,
            std::string("encoder.") + name + " lists " + std::to_string(v.size()) +
                " values but the data has " + std::to_string(channels) + " channels");
    return v;
  };
  EncoderConfig enc;
  enc.dim = dim;
  enc.ngram = expand(ngram, "ngram");
  enc.levels = expand(levels, "levels");
  enc.seed = seed;
  enc.tie_break = tie_break;
  enc.stride = stride;
  enc.validate();
  return enc;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["encoder"] = {{"kind", to_string(cfg.encoder)},
                  {"dim", cfg.dim},
                  {"ngram", cfg.ngram},
                  {"levels", cfg.levels},
                  {"tie_break", to_string(cfg.tie_break)},
                  {"stride", cfg.stride}};
  j["noise"] = {{"preset", cfg.noise_preset},
                {"p_program_flip", cfg.noise.p_program_flip},
                {"p_read_01", cfg.noise.p_read_01},
                {"p_read_10", cfg.noise.p_read_10},
                {"am_sigma", cfg.noise.am_sigma},
                {"subarray_rows", cfg.noise.subarray_rows},
                {"seed", cfg.noise.seed}};
  j["energy"] = {{"e_pcm_read_device", cfg.energy.e_pcm_read_device},
                 {"e_xor_gate", cfg.energy.e_xor_gate},
                 {"e_register_write", cfg.energy.e_register_write},
                 {"e_accumulator_inc", cfg.energy.e_accumulator_inc},
                 {"e_sense_amp", cfg.energy.e_sense_amp},
                 {"internal_clock_hz", cfg.energy.internal_clock_hz}};
  if (cfg.quantizer_min) j["quantizer"] = {{"min", *cfg.quantizer_min}, {"max", *cfg.quantizer_max}};
  std::vector<std::string> files;
  for (const auto& f : cfg.data.files) files.push_back(f.string());
  const char* split = cfg.data.eval_split == EvalSplit::test    ? "test"
                      : cfg.data.eval_split == EvalSplit::train ? "train"
                                                                : "all";
  j["data"] = {{"source", cfg.data.source == DataSource::synthetic ? "synthetic" : "csv"},
               {"files", files},
               {"downsample", cfg.data.downsample},
               {"train_fraction", cfg.data.train_fraction},
               {"eval_split", split},
               {"synthetic",
                {{"classes", cfg.data.synthetic.classes},
                 {"channels", cfg.data.synthetic.channels},
                 {"windows_per_class", cfg.data.synthetic.windows_per_class},
                 {"noise_level", cfg.data.synthetic.noise_level},
                 {"sample_rate", cfg.data.synthetic.sample_rate}}}};
  j["sweep"] = {{"ngram", cfg.sweep_ngram}, {"levels", cfg.sweep_levels}};
  j["compare"] = {{"histogram_bins", cfg.histogram_bins}};
  j["out"] = cfg.out.string();
  j["jobs"] = cfg.jobs;
  return j;
}

}  // namespace hdst::app
