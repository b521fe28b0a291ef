#include "hdst/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hdst/error.hpp"

namespace hdst {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    fail(ErrorCode::parse, where(path, line) + "cannot parse number '" + std::string(field) + "'");
  }
  return v;
}

int parse_label(std::string_view field, const std::filesystem::path& path, std::size_t line) {
  int v = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end || v < 0) {
    fail(ErrorCode::parse,
         where(path, line) + "label must be a non-negative integer, got '" + std::string(field) + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_sidecar(const std::filesystem::path& csv, double sample_rate,
                   const std::vector<std::string>& names,
                   const std::optional<std::vector<std::size_t>>& levels) {
  nlohmann::ordered_json j;
  j["sample_rate"] = sample_rate;
  j["channel_names"] = names;
  if (levels) j["levels"] = *levels;
  std::ofstream out(sidecar_path(csv));
  require(out.good(), ErrorCode::io, "cannot write " + sidecar_path(csv).string());
  out << j.dump(2) << '\n';
}

void write_csv(const std::filesystem::path& path, std::size_t channels,
               const std::vector<double>& times, const std::vector<int>& labels,
               const auto& value_at) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  out << 't';
  for (std::size_t m = 0; m < channels; ++m) out << ",ch" << (m + 1);
  out << ",label\n";
  for (std::size_t t = 0; t < labels.size(); ++t) {
    out << format_double(times[t]);
    for (std::size_t m = 0; m < channels; ++m) out << ',' << value_at(m, t);
    out << ',' << labels[t] << '\n';
  }
  require(out.good(), ErrorCode::io, "error while writing " + path.string());
}

std::vector<std::string> default_names(std::size_t channels) {
  std::vector<std::string> names;
  for (std::size_t m = 0; m < channels; ++m) names.push_back("ch" + std::to_string(m + 1));
  return names;
}

template <typename Stream>
Stream downsample_impl(const Stream& in, std::size_t factor, auto&& channels_of) {
  require(factor >= 1, ErrorCode::invalid_argument, "downsample factor must be >= 1");
  Stream out = in;
  auto& out_channels = channels_of(out);
  const auto& in_channels = channels_of(in);
  out.labels.clear();
  for (auto& ch : out_channels) ch.clear();
  for (std::size_t t = 0; t < in.labels.size(); t += factor) {
    out.labels.push_back(in.labels[t]);
    for (std::size_t m = 0; m < in_channels.size(); ++m) out_channels[m].push_back(in_channels[m][t]);
  }
  if (out.sample_rate > 0.0) out.sample_rate = in.sample_rate / static_cast<double>(factor);
  return out;
}

}  // namespace

double RawRecording::duration_seconds() const {
  require(sample_rate > 0.0, ErrorCode::data, "recording has no sample rate");
  return static_cast<double>(frame_count()) / sample_rate;
}

void RawRecording::validate() const {
  require(!channels.empty(), ErrorCode::schema, "recording has no channels");
  for (const auto& ch : channels) {
    require(ch.size() == labels.size(), ErrorCode::schema,
            "channel series and label series differ in length");
  }
  require(times.size() == labels.size(), ErrorCode::schema, "time column length mismatch");
  require(channel_names.size() == channels.size(), ErrorCode::schema,
          "channel name count does not match channel count");
  if (levels) {
    require(levels->size() == channels.size(), ErrorCode::schema,
            "level list does not match channel count");
  }
}

void QuantizerSpec::validate() const {
  require(min.size() == max.size() && min.size() == levels.size() && !min.empty(),
          ErrorCode::config, "quantizer min/max/levels must have one entry per channel");
  for (std::size_t m = 0; m < min.size(); ++m) {
    require(std::isfinite(min[m]) && std::isfinite(max[m]) && min[m] < max[m], ErrorCode::config,
            "quantizer channel " + std::to_string(m) + " needs finite min < max");
    require(levels[m] >= 2, ErrorCode::config, "quantizer level counts must be >= 2");
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

RawRecording load_recording(const std::filesystem::path& path,
                            std::optional<std::size_t> expected_channels) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());

  RawRecording rec;
  std::string line;
  std::size_t lineno = 0;
  std::size_t channels = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      require(fields.size() >= 2 && fields.front() == "t", ErrorCode::schema,
              where(path, lineno) + "header must start with 't'");
      require(fields.back() == "label", ErrorCode::schema,
              where(path, lineno) + "missing 'label' column");
      channels = fields.size() - 2;
      require(channels >= 1, ErrorCode::schema, where(path, lineno) + "no channel columns");
      if (expected_channels && *expected_channels != channels) {
        fail(ErrorCode::schema, where(path, lineno) + "expected " +
                                    std::to_string(*expected_channels) + " channels, found " +
                                    std::to_string(channels));
      }
      rec.channels.resize(channels);
      have_header = true;
      continue;
    }
    if (fields.size() != channels + 2) {
      fail(ErrorCode::parse, where(path, lineno) + "expected " + std::to_string(channels + 2) +
                                 " fields, got " + std::to_string(fields.size()));
    }
    rec.times.push_back(parse_double(fields.front(), path, lineno));
    for (std::size_t m = 0; m < channels; ++m) {
      rec.channels[m].push_back(parse_double(fields[m + 1], path, lineno));
    }
    rec.labels.push_back(parse_label(fields.back(), path, lineno));
  }
  require(have_header, ErrorCode::schema, path.string() + ": empty file");
  rec.channel_names = default_names(channels);

  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream sin(side);
    nlohmann::json j;
    try {
      sin >> j;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse, side.string() + ": " + e.what());
    }
    try {
      rec.sample_rate = j.value("sample_rate", 0.0);
      if (j.contains("channel_names")) {
        rec.channel_names = j.at("channel_names").get<std::vector<std::string>>();
      }
      if (j.contains("levels")) rec.levels = j.at("levels").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::schema, side.string() + ": " + e.what());
    }
  }
  rec.validate();
  return rec;
}

void write_recording(const std::filesystem::path& path, const RawRecording& rec) {
  rec.validate();
  write_csv(path, rec.channel_count(), rec.times, rec.labels,
            [&](std::size_t m, std::size_t t) { return format_double(rec.channels[m][t]); });
  write_sidecar(path, rec.sample_rate, rec.channel_names, rec.levels);
}

void write_levels(const std::filesystem::path& path, const LevelStream& stream) {
  std::vector<double> times(stream.frame_count());
  for (std::size_t t = 0; t < times.size(); ++t) {
    times[t] = stream.sample_rate > 0.0 ? static_cast<double>(t) / stream.sample_rate
                                        : static_cast<double>(t);
  }
  write_csv(path, stream.channel_count(), times, stream.labels,
            [&](std::size_t m, std::size_t t) { return stream.levels[m][t]; });
  write_sidecar(path, stream.sample_rate,
                stream.channel_names.empty() ? default_names(stream.channel_count())
                                             : stream.channel_names,
                stream.level_counts);
}

RawRecording downsample(const RawRecording& rec, std::size_t factor) {
  RawRecording out = downsample_impl(rec, factor, [](auto& r) -> auto& { return r.channels; });
  out.times.clear();
  for (std::size_t t = 0; t < rec.times.size(); t += factor) out.times.push_back(rec.times[t]);
  return out;
}

LevelStream downsample(const LevelStream& stream, std::size_t factor) {
  return downsample_impl(stream, factor, [](auto& s) -> auto& { return s.levels; });
}

QuantizerSpec fit_quantizer(const RawRecording& rec, std::span<const std::size_t> levels,
                            std::span<const std::uint8_t> use) {
  require(levels.size() == rec.channel_count(), ErrorCode::config,
          "quantizer needs one level count per channel");
  require(use.empty() || use.size() == rec.frame_count(), ErrorCode::invalid_argument,
          "frame mask length mismatch");
  QuantizerSpec spec;
  spec.levels.assign(levels.begin(), levels.end());
  for (const auto& ch : rec.channels) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < ch.size(); ++t) {
      if (!use.empty() && use[t] == 0) continue;
      require(std::isfinite(ch[t]), ErrorCode::data, "non-finite sample in recording");
      lo = std::min(lo, ch[t]);
      hi = std::max(hi, ch[t]);
    }
    require(std::isfinite(lo), ErrorCode::data, "no frames available to fit the quantizer");
    if (!(hi > lo)) hi = lo + 1.0;
    spec.min.push_back(lo);
    spec.max.push_back(hi);
  }
  return spec;
}

std::uint32_t quantize_value(double v, double min, double max, std::size_t levels) {
  require(std::isfinite(v), ErrorCode::data, "cannot quantize a non-finite value");
  static const double kBelowOne = std::nextafter(1.0, 0.0);
  const double x = std::clamp((v - min) / (max - min), 0.0, kBelowOne);
  return 1U + static_cast<std::uint32_t>(std::floor(x * static_cast<double>(levels)));
}

LevelStream quantize(const RawRecording& rec, const QuantizerSpec& spec) {
  spec.validate();
  require(spec.levels.size() == rec.channel_count(), ErrorCode::config,
          "quantizer channel count does not match recording");
  LevelStream out;
  out.sample_rate = rec.sample_rate;
  out.channel_names = rec.channel_names;
  out.level_counts = spec.levels;
  out.labels = rec.labels;
  out.levels.resize(rec.channel_count());
  for (std::size_t m = 0; m < rec.channel_count(); ++m) {
    out.levels[m].reserve(rec.frame_count());
    for (const auto v : rec.channels[m]) {
      out.levels[m].push_back(quantize_value(v, spec.min[m], spec.max[m], spec.levels[m]));
    }
  }
  return out;
}

LevelStream as_level_stream(const RawRecording& rec) {
  require(rec.levels.has_value(), ErrorCode::schema, "recording does not declare level counts");
  LevelStream out;
  out.sample_rate = rec.sample_rate;
  out.channel_names = rec.channel_names;
  out.level_counts = *rec.levels;
  out.labels = rec.labels;
  out.levels.resize(rec.channel_count());
  for (std::size_t m = 0; m < rec.channel_count(); ++m) {
    for (std::size_t t = 0; t < rec.frame_count(); ++t) {
      const double v = rec.channels[m][t];
      if (!(v >= 1.0 && v <= static_cast<double>(out.level_counts[m]) && v == std::floor(v))) {
        fail(ErrorCode::data, "frame " + std::to_string(t) + " channel " + std::to_string(m) +
                                  ": value is not a level in 1.." +
                                  std::to_string(out.level_counts[m]));
      }
      out.levels[m].push_back(static_cast<std::uint32_t>(v));
    }
  }
  return out;
}

std::vector<LabeledWindow> extract_windows(const LevelStream& stream,
                                           std::span<const std::size_t> ngram, std::size_t stride,
                                           std::span<const std::uint8_t> groups) {
  require(ngram.size() == stream.channel_count(), ErrorCode::config,
          "ngram list does not match stream channel count");
  require(stride >= 1, ErrorCode::config, "stride must be >= 1");
  require(groups.empty() || groups.size() == stream.frame_count(), ErrorCode::invalid_argument,
          "group list length mismatch");
  const std::size_t span = *std::max_element(ngram.begin(), ngram.end());
  const auto group_of = [&](std::size_t t) -> std::uint8_t { return groups.empty() ? 0 : groups[t]; };

  std::vector<LabeledWindow> out;
  std::size_t run = 0;  // length of the current constant (label, group) run
  for (std::size_t t = 0; t < stream.frame_count(); ++t) {
    const bool same = t > 0 && stream.labels[t] == stream.labels[t - 1] &&
                      group_of(t) == group_of(t - 1);
    run = same ? run + 1 : 1;
    if (run < span || (run - span) % stride != 0) continue;
    LabeledWindow w;
    w.label = static_cast<std::size_t>(stream.labels[t]);
    w.end_frame = t;
    w.group = group_of(t);
    w.window.levels.resize(ngram.size());
    for (std::size_t m = 0; m < ngram.size(); ++m) {
      const auto& ch = stream.levels[m];
      w.window.levels[m].assign(ch.begin() + static_cast<std::ptrdiff_t>(t + 1 - ngram[m]),
                                ch.begin() + static_cast<std::ptrdiff_t>(t + 1));
    }
    out.push_back(std::move(w));
  }
  return out;
}

SyntheticDataset synth_generate(const SynthConfig& cfg, SeededRng& rng) {
  require(cfg.classes >= 2, ErrorCode::config, "synthetic data needs >= 2 classes");
  require(cfg.channel_count() >= 1 && cfg.levels.size() == cfg.channel_count(), ErrorCode::config,
          "synthetic data needs matching per-channel ngram and level lists");
  SyntheticDataset data;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    SampleWindow tpl;
    tpl.levels.resize(cfg.channel_count());
    for (std::size_t m = 0; m < cfg.channel_count(); ++m) {
      for (std::size_t n = 0; n < cfg.ngram[m]; ++n) {
        tpl.levels[m].push_back(static_cast<std::uint32_t>(1 + rng.below(cfg.levels[m])));
      }
    }
    data.templates.push_back(std::move(tpl));
  }

  const auto jitter = static_cast<std::int64_t>(cfg.noise_level);
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    for (std::size_t k = 0; k < cfg.windows_per_class; ++k) {
      LabeledWindow w;
      w.label = c;
      w.window = data.templates[c];
      if (jitter > 0) {
        for (std::size_t m = 0; m < cfg.channel_count(); ++m) {
          const auto top = static_cast<std::int64_t>(cfg.levels[m]);
          for (auto& s : w.window.levels[m]) {
            const auto delta = static_cast<std::int64_t>(rng.below(2 * jitter + 1)) - jitter;
            s = static_cast<std::uint32_t>(std::clamp<std::int64_t>(s + delta, 1, top));
          }
        }
      }
      data.windows.push_back(std::move(w));
    }
  }
  return data;
}

LevelStream synth_stream(const SynthConfig& cfg, const SyntheticDataset& data,
                         double sample_rate) {
  LevelStream out;
  out.sample_rate = sample_rate;
  out.channel_names = default_names(cfg.channel_count());
  out.level_counts = cfg.levels;
  out.levels.resize(cfg.channel_count());
  const std::size_t span = *std::max_element(cfg.ngram.begin(), cfg.ngram.end());
  for (const auto& w : data.windows) {
    for (std::size_t m = 0; m < cfg.channel_count(); ++m) {
      const auto& samples = w.window.levels[m];
      for (std::size_t k = samples.size(); k < span; ++k) out.levels[m].push_back(samples.front());
      out.levels[m].insert(out.levels[m].end(), samples.begin(), samples.end());
    }
    for (std::size_t k = 0; k < span; ++k) out.labels.push_back(static_cast<int>(w.label));
  }
  return out;
}

}  // namespace hdst
