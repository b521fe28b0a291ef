#include "app/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hdst/crossbar.hpp"
#include "hdst/error.hpp"

namespace hdst::app {

namespace {

constexpr std::uint64_t kSynthTag = 0xda7a;
constexpr std::uint64_t kTrainEncodeTag = 0x7e1;
constexpr std::uint64_t kFinalizeTag = 0xf1;
constexpr std::uint64_t kEvalEncodeTag = 0xe7a1;
constexpr std::uint64_t kEncoderArrayTag = 1;
constexpr std::uint64_t kSearchArrayTag = 2;

std::size_t train_quota(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
}

SubjectData load_synthetic(const RunConfig& cfg, std::size_t subject, const EncoderConfig& enc) {
  const auto& s = cfg.data.synthetic;
  require(enc.channel_count() == s.channels, ErrorCode::config,
          "encoder channel count does not match data.synthetic.channels");
  SynthConfig sc;
  sc.classes = s.classes;
  sc.ngram = enc.ngram;
  sc.levels = enc.levels;
  sc.windows_per_class = s.windows_per_class;
  sc.noise_level = s.noise_level;
  SeededRng rng(derive_seed(cfg.seed, kSynthTag, subject));
  auto data = synth_generate(sc, rng);

  SubjectData out;
  out.name = "synthetic";
  out.encoder = enc;
  out.classes = s.classes;
  const std::size_t quota = train_quota(s.windows_per_class, cfg.data.train_fraction);
  for (std::size_t i = 0; i < data.windows.size(); ++i) {
    auto& w = data.windows[i];
    const bool train = (i % s.windows_per_class) < quota;
    w.group = train ? kTrainGroup : kTestGroup;
    (train ? out.train : out.test).push_back(std::move(w));
  }
  return out;
}

SubjectData load_csv(const RunConfig& cfg, std::size_t subject, const EncoderConfig& enc,
                     const std::optional<QuantizerSpec>& frozen) {
  auto prepared = prepare_stream(cfg, subject, enc.levels, frozen);
  require(prepared.stream.channel_count() == enc.channel_count(), ErrorCode::schema,
          prepared.name + ": has " + std::to_string(prepared.stream.channel_count()) +
              " channels, encoder expects " + std::to_string(enc.channel_count()));

  SubjectData out;
  out.name = prepared.name;
  out.encoder = enc;
  out.quantizer = prepared.quantizer;
  for (auto& w : extract_windows(prepared.stream, enc.ngram, enc.stride, prepared.groups)) {
    (w.group == kTrainGroup ? out.train : out.test).push_back(std::move(w));
  }
  std::size_t max_label = 0;
  for (const auto l : prepared.stream.labels) {
    max_label = std::max(max_label, static_cast<std::size_t>(l));
  }
  out.classes = max_label + 1;
  return out;
}

Hypervector encode_one(const TrainedModel& model, EncoderKind kind, const SampleWindow& w,
                       SeededRng& rng) {
  return kind == EncoderKind::adapted
             ? encode_adapted(w, model.memories.image, model.config, rng)
             : encode_baseline(w, model.memories, model.config, rng);
}

}  // namespace

PreparedStream prepare_stream(const RunConfig& cfg, std::size_t subject,
                              std::span<const std::size_t> levels,
                              const std::optional<QuantizerSpec>& frozen) {
  require(cfg.data.source == DataSource::csv, ErrorCode::config,
          "prepare_stream needs data.source = 'csv'");
  const auto& path = cfg.data.files.at(subject);
  const RawRecording rec = downsample(load_recording(path), cfg.data.downsample);
  require(rec.frame_count() > 0, ErrorCode::data, path.string() + ": no frames");
  require(levels.size() == rec.channel_count(), ErrorCode::schema,
          path.string() + ": has " + std::to_string(rec.channel_count()) +
              " channels, configuration expects " + std::to_string(levels.size()));

  PreparedStream out;
  out.name = path.stem().string();

  // Per class, the first train_fraction of its frames (in time order) train.
  std::map<int, std::size_t> class_frames;
  for (const auto l : rec.labels) ++class_frames[l];
  std::map<int, std::size_t> seen;
  out.groups.resize(rec.frame_count());
  for (std::size_t t = 0; t < rec.frame_count(); ++t) {
    const int l = rec.labels[t];
    out.groups[t] = seen[l]++ < train_quota(class_frames[l], cfg.data.train_fraction)
                        ? kTrainGroup
                        : kTestGroup;
  }

  const std::vector<std::size_t> level_list(levels.begin(), levels.end());
  if (rec.levels) {
    require(*rec.levels == level_list, ErrorCode::config,
            path.string() + ": data is already quantized with level counts that differ from "
                            "encoder.levels");
    out.stream = as_level_stream(rec);
    return out;
  }

  QuantizerSpec spec;
  if (frozen) {
    spec = *frozen;
  } else if (cfg.quantizer_min) {
    spec.min = *cfg.quantizer_min;
    spec.max = *cfg.quantizer_max;
    spec.levels = level_list;
  } else {
    std::vector<std::uint8_t> use(out.groups.size());
    for (std::size_t t = 0; t < use.size(); ++t) use[t] = out.groups[t] == kTrainGroup ? 1 : 0;
    spec = fit_quantizer(rec, level_list, use);
  }
  require(spec.levels == level_list, ErrorCode::config,
          "quantizer level counts do not match encoder.levels");
  out.stream = quantize(rec, spec);
  out.quantizer = std::move(spec);
  return out;
}

std::vector<LabeledWindow> SubjectData::select(EvalSplit split) const {
  switch (split) {
    case EvalSplit::train:
      return train;
    case EvalSplit::test:
      return test;
    case EvalSplit::all:
      break;
  }
  std::vector<LabeledWindow> all = train;
  all.insert(all.end(), test.begin(), test.end());
  return all;
}

std::size_t subject_count(const RunConfig& cfg) {
  return cfg.data.source == DataSource::synthetic ? 1 : cfg.data.files.size();
}

std::size_t data_channel_count(const RunConfig& cfg) {
  if (cfg.data.source == DataSource::synthetic) return cfg.data.synthetic.channels;
  return load_recording(cfg.data.files.at(0)).channel_count();
}

SubjectData load_subject(const RunConfig& cfg, std::size_t subject, const EncoderConfig& enc,
                         const std::optional<QuantizerSpec>& frozen) {
  enc.validate();
  return cfg.data.source == DataSource::synthetic ? load_synthetic(cfg, subject, enc)
                                                  : load_csv(cfg, subject, enc, frozen);
}

TrainedModel train_model(const SubjectData& data, EncoderKind kind) {
  const auto& enc = data.encoder;
  enc.validate();
  require(data.classes >= 1, ErrorCode::data, data.name + ": no classes");
  require(!data.train.empty(), ErrorCode::data, data.name + ": no training windows");

  TrainedModel model;
  model.config = enc;
  model.kind = kind;
  model.quantizer = data.quantizer;
  model.memories = build_encoder_memories(enc.dim, enc.levels, enc.seed);

  AssociativeMemory am(data.classes, enc.dim);
  SeededRng rng(derive_seed(enc.seed, kTrainEncodeTag));
  for (const auto& w : data.train) {
    require(w.label < data.classes, ErrorCode::data, "window label out of range");
    am.accumulate(w.label, encode_one(model, kind, w.window, rng));
  }
  for (std::size_t c = 0; c < data.classes; ++c) {
    require(am.count(c) > 0, ErrorCode::empty_class,
            data.name + ": class " + std::to_string(c) + " has no training windows");
  }
  SeededRng finalize_rng(derive_seed(enc.seed, kFinalizeTag));
  model.prototypes = am.finalize(finalize_rng);
  return model;
}

double EvalResult::accuracy() const {
  return queries == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(queries);
}

std::vector<Hypervector> encode_windows(const TrainedModel& model, EncoderKind kind,
                                        std::span<const LabeledWindow> windows) {
  SeededRng rng(derive_seed(model.config.seed, kEvalEncodeTag));
  std::vector<Hypervector> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(encode_one(model, kind, w.window, rng));
  return out;
}

EvalResult evaluate(const TrainedModel& model, std::span<const LabeledWindow> windows,
                    std::size_t classes, const std::optional<NoiseParams>& noise) {
  const std::size_t c_count = std::max(classes, model.prototypes.size());
  EvalResult r;
  r.confusion.assign(c_count, std::vector<std::uint64_t>(c_count, 0));

  SeededRng rng(derive_seed(model.config.seed, kEvalEncodeTag));
  std::optional<PcmCrossbar> encoder_array;
  std::optional<PcmCrossbar> search_array;
  if (noise) {
    NoiseParams enc_noise = *noise;
    enc_noise.seed = derive_seed(noise->seed, kEncoderArrayTag);
    NoiseParams am_noise = *noise;
    am_noise.seed = derive_seed(noise->seed, kSearchArrayTag);
    if (model.kind == EncoderKind::adapted) {
      encoder_array = PcmCrossbar::program(model.memories.image, enc_noise);
    }
    search_array = PcmCrossbar::program(model.prototypes, am_noise);
  }

  for (const auto& w : windows) {
    const Hypervector query =
        encoder_array ? encode_adapted(w.window, *encoder_array, model.config, rng)
                      : encode_one(model, model.kind, w.window, rng);
    const Prediction p = search_array ? predict(*search_array, query) : predict(model.prototypes, query);
    ++r.queries;
    if (p.label == w.label) ++r.correct;
    if (w.label < c_count) ++r.confusion[w.label][p.label];
    r.predictions.push_back(p.label);
    r.scores.push_back(p.scores);
  }
  return r;
}

}  // namespace hdst::app
