// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "app/commands.hpp"
#include "app/pipeline.hpp"
#include "hdst/costmodel.hpp"
#include "hdst/crossbar.hpp"
#include "hdst/learner.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  enum Status { pass, fail, skip } status = fail;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::skip, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

hdst::SampleWindow random_window(const hdst::EncoderConfig& cfg, hdst::SeededRng& r) {
  hdst::SampleWindow w;
  for (std::size_t m = 0; m < cfg.channel_count(); ++m) {
    std::vector<std::uint32_t> s;
    for (std::size_t n = 0; n < cfg.ngram[m]; ++n) {
      s.push_back(1 + static_cast<std::uint32_t>(r.below(cfg.levels[m])));
    }
    w.levels.push_back(std::move(s));
  }
  return w;
}

hdst::app::RunConfig synthetic_config(std::uint64_t seed) {
  json j = {{"seed", seed},
            {"encoder", {{"dim", 2048}, {"ngram", 5}, {"levels", 8}}},
            {"data",
             {{"train_fraction", 0.5},
              {"synthetic",
               {{"classes", 5}, {"channels", 4}, {"windows_per_class", 400}, {"noise_level", 1}}}}}};
  return hdst::app::load_run_config(std::nullopt, j);
}

// 1. Algebraic properties.
Outcome algebra() {
  const auto t0 = std::chrono::steady_clock::now();
  hdst::SeededRng r(101);
  std::size_t failures = 0;
  constexpr int kCases = 10000;
  for (int i = 0; i < kCases; ++i) {
    const std::size_t dim = 1 + r.below(1024);
    const auto a = hdst::random_hv(dim, r);
    const auto b = hdst::random_hv(dim, r);
    const auto c = hdst::random_hv(dim, r);
    const std::size_t k = r.below(3 * dim + 1);
    failures += hdst::bind(hdst::bind(a, b), b) != a;
    failures += hdst::bind(a, b) != hdst::bind(b, a);
    failures += hdst::bind(hdst::bind(a, b), c) != hdst::bind(a, hdst::bind(b, c));
    failures += hdst::permute(hdst::bind(a, b), k) != hdst::bind(hdst::permute(a, k), hdst::permute(b, k));
    failures += hdst::permute(a, dim) != a;
    const std::vector<hdst::Hypervector> same(1 + r.below(8), a);
    std::optional<hdst::Hypervector> tie;
    if (same.size() % 2 == 0) tie = c;
    failures += hdst::majority(same, tie) != a;
  }
  const double t = seconds_since(t0);
  const auto d = fmt("%.0f cases x 6 properties, %.0f failures, %.2f s", kCases, failures, t);
  return failures == 0 && t < 10.0 ? pass(d) : fail(d);
}

// 2. CiM distance law.
Outcome cim_law() {
  std::size_t violations = 0;
  std::string where;
  for (const auto& [dim, levels] : std::vector<std::pair<std::size_t, std::size_t>>{
           {10000, 15}, {10000, 21}, {8, 5}, {64, 4}}) {
    hdst::SeededRng r(hdst::derive_seed(202, dim, levels));
    const auto cim = hdst::build_cim(levels, dim, r);
    for (std::size_t i = 1; i <= levels; ++i) {
      for (std::size_t j = i + 1; j <= levels; ++j) {
        const auto h = hdst::hamming(cim.level(i), cim.level(j));
        const auto e = oracle::cim_distance(dim, levels, i, j);
        const bool exact = i == 1;
        const bool ok = exact ? h == e : (h + 1 >= e && h <= e + 1);
        if (!ok) {
          ++violations;
          where = "D=" + std::to_string(dim) + " L=" + std::to_string(levels);
        }
      }
    }
    if (hdst::hamming(cim.level(1), cim.level(levels)) != dim / 2) ++violations;
  }
  const std::string d = "4 (D,L) shapes, " + std::to_string(violations) + " violations " + where;
  return violations == 0 ? pass(d) : fail(d);
}

// 3. Binder recurrence vs direct temporal evaluation, per channel and bundled.
Outcome binder() {
  hdst::SeededRng r(303);
  std::size_t mismatches = 0;
  constexpr int kInstances = 1000;
  for (int i = 0; i < kInstances; ++i) {
    hdst::EncoderConfig cfg;
    const std::size_t channels = 1 + r.below(8);
    for (std::size_t m = 0; m < channels; ++m) {
      cfg.ngram.push_back(1 + r.below(16));
      cfg.levels.push_back(2 + r.below(10));
    }
    cfg.dim = cfg.max_ngram() + 1 + r.below(128 - cfg.max_ngram());
    cfg.seed = r.next_u64();
    const auto mem = hdst::build_encoder_memories(cfg.dim, cfg.levels, cfg.seed);
    const auto ref = oracle::Memories::from(mem);
    const auto w = random_window(cfg, r);

    for (std::size_t m = 0; m < channels; ++m) {
      hdst::CrossbarImage one;
      const std::vector<std::size_t> lm = {cfg.levels[m]};
      one.layout = hdst::RowLayout::from_level_counts(cfg.dim, lm);
      const auto first = mem.image.rows.begin() + static_cast<std::ptrdiff_t>(mem.image.layout.offsets[m]);
      one.rows.assign(first, first + static_cast<std::ptrdiff_t>(cfg.levels[m]));
      hdst::EncoderConfig c1 = cfg;
      c1.ngram = {cfg.ngram[m]};
      c1.levels = lm;
      hdst::SampleWindow w1;
      w1.levels = {w.levels[m]};
      hdst::SeededRng unused(0);
      mismatches += oracle::bits_of(hdst::encode_adapted(w1, one, c1, unused)) != oracle::temporal(ref, w, m);
    }

    const auto seed = r.next_u64();
    hdst::SeededRng enc(seed), replay(seed);
    const auto tie = oracle::bits_of(hdst::random_hv(cfg.dim, replay));
    mismatches += oracle::bits_of(hdst::encode_adapted(w, mem.image, cfg, enc)) != oracle::adapted(ref, w, tie);
  }
  const auto d = fmt("%.0f instances (D<=128, N<=16, M<=8), %.0f mismatches", kInstances, mismatches);
  return mismatches == 0 ? pass(d) : fail(d);
}

// 4. Degenerate equivalence and a non-equivalence witness.
Outcome degenerate() {
  hdst::SeededRng r(404);
  std::size_t mismatches = 0;
  for (int i = 0; i < 2000; ++i) {
    const bool n_is_one = i < 1000;
    const std::size_t channels = n_is_one ? 1 + r.below(8) : 1;
    const std::size_t ngram = n_is_one ? 1 : 1 + r.below(16);
    const auto cfg = hdst::EncoderConfig::uniform(64 + r.below(512), channels, ngram, 2 + r.below(20),
                                                  r.next_u64());
    const auto mem = hdst::build_encoder_memories(cfg.dim, cfg.levels, cfg.seed);
    const auto w = random_window(cfg, r);
    const auto seed = r.next_u64();
    hdst::SeededRng a(seed), b(seed);
    mismatches += hdst::encode_baseline(w, mem, cfg, a) != hdst::encode_adapted(w, mem.image, cfg, b);
  }
  const auto cfg = hdst::EncoderConfig::uniform(512, 3, 3, 8, 7);
  const auto mem = hdst::build_encoder_memories(cfg.dim, cfg.levels, cfg.seed);
  int tried = 0;
  std::size_t distance = 0;
  while (distance == 0 && tried < 1000) {
    ++tried;
    const auto w = random_window(cfg, r);
    hdst::SeededRng a(1), b(1);
    distance = hdst::hamming(hdst::encode_baseline(w, mem, cfg, a), hdst::encode_adapted(w, mem.image, cfg, b));
  }
  const auto d = fmt("2000 degenerate windows, %.0f mismatches; witness N=3 M=3 after %.0f tries, "
                     "hamming(G, G')=%.0f",
                     mismatches, tried, distance);
  return mismatches == 0 && distance > 0 ? pass(d) : fail(d);
}

// 5. Zero-noise transparency of the whole in-memory pipeline.
Outcome transparency() {
  auto cfg = synthetic_config(505);
  const auto enc = cfg.encoder_config(4);
  const auto data = hdst::app::load_subject(cfg, 0, enc);
  const auto model = hdst::app::train_model(data, hdst::EncoderKind::adapted);

  auto encoder_array = hdst::PcmCrossbar::program(model.memories.image, hdst::NoiseParams::off(1));
  auto search_array = hdst::PcmCrossbar::program(model.prototypes, hdst::NoiseParams::off(2));
  hdst::StreamEncoder stream(enc);
  hdst::SeededRng samples(55), hw_rng(56), sw_rng(56);

  std::size_t queries = 0, label_mismatch = 0, score_mismatch = 0;
  while (queries < 1000) {
    std::vector<std::uint32_t> s;
    for (std::size_t m = 0; m < 4; ++m) s.push_back(1 + static_cast<std::uint32_t>(samples.below(8)));
    stream.push_sample(s);
    const auto out = stream.encode_tick(encoder_array, hw_rng);
    if (!out) continue;
    ++queries;
    const auto hw = hdst::predict(search_array, out->ngram);
    const auto q = hdst::encode_adapted(stream.buffer().snapshot(), model.memories.image, enc, sw_rng);
    const auto sw = hdst::predict(model.prototypes, q);
    label_mismatch += hw.label != sw.label;
    score_mismatch += hw.scores != sw.scores;
  }
  const auto d = fmt("%.0f streamed queries, %.0f label / %.0f score mismatches", queries,
                     label_mismatch, score_mismatch);
  return label_mismatch == 0 && score_mismatch == 0 ? pass(d) : fail(d);
}

// 6. XOR savings and read counts.
Outcome xor_savings() {
  hdst::SeededRng r(606);
  std::size_t bad = 0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t m = 1 + r.below(8);
    const std::size_t n = 1 + r.below(12);
    const std::size_t dim = n + 1 + r.below(4000);
    const auto cfg = hdst::EncoderConfig::uniform(dim, m, n, 2 + r.below(20), r.next_u64());
    const auto report = hdst::count_ops(cfg);
    bad += report.xor_ops_saved_by_precompute != dim * n * m;

    const auto mem = hdst::build_encoder_memories(cfg.dim, cfg.levels, cfg.seed);
    auto xbar = hdst::PcmCrossbar::program(mem.image, hdst::NoiseParams::off());
    hdst::StreamEncoder stream(cfg);
    std::uint64_t emitted = 0;
    for (std::size_t t = 0; t < n + 5; ++t) {
      std::vector<std::uint32_t> s(m);
      for (auto& v : s) v = 1 + static_cast<std::uint32_t>(r.below(cfg.levels[0]));
      stream.push_sample(s);
      xbar.reset_read_count();
      if (auto out = stream.encode_tick(xbar, r)) {
        ++emitted;
        bad += out->row_reads != report.crossbar_row_reads;
        bad += xbar.read_count() != report.crossbar_row_reads;
        bad += out->cycles != report.cycles_per_ngram;
      }
    }
    bad += emitted != 6;
  }
  const auto d = fmt("20 uniform configs, %.0f discrepancies", bad);
  return bad == 0 ? pass(d) : fail(d);
}

// 7. Synthetic classification, clean and at chance-level read noise.
Outcome synthetic() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = synthetic_config(707);
  const auto enc = cfg.encoder_config(4);
  const auto data = hdst::app::load_subject(cfg, 0, enc);
  const auto model = hdst::app::train_model(data, hdst::EncoderKind::adapted);
  const auto clean = hdst::app::evaluate(model, data.test, data.classes, std::nullopt);
  const double t = seconds_since(t0);

  hdst::NoiseParams noise;
  noise.p_read_01 = noise.p_read_10 = 0.5;
  noise.seed = 77;
  const auto noisy = hdst::app::evaluate(model, data.test, data.classes, noise);
  const bool ok = data.train.size() == 1000 && data.test.size() == 1000 && clean.accuracy() >= 0.95 &&
                  t < 60.0 && noisy.queries >= 1000 && noisy.accuracy() >= 0.15 &&
                  noisy.accuracy() <= 0.25;
  const auto d = fmt("clean acc %.4f (>=0.95) in %.2f s; p_read=0.5 acc %.4f over %.0f queries "
                     "(in [0.15, 0.25])",
                     clean.accuracy(), t, noisy.accuracy(), static_cast<double>(noisy.queries));
  return ok ? pass(d) : fail(d);
}

// 8. Accuracy vs program-time flip probability.
Outcome noise_trend() {
  const std::vector<double> flips = {0.0, 0.01, 0.05, 0.15};
  std::vector<double> mean(flips.size(), 0.0);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto cfg = synthetic_config(800 + s);
    const auto enc = cfg.encoder_config(4);
    const auto data = hdst::app::load_subject(cfg, 0, enc);
    const auto model = hdst::app::train_model(data, hdst::EncoderKind::adapted);
    for (std::size_t k = 0; k < flips.size(); ++k) {
      hdst::NoiseParams n;
      n.p_program_flip = flips[k];
      n.seed = hdst::derive_seed(900, s);
      mean[k] += hdst::app::evaluate(model, data.test, data.classes, n).accuracy() / 5.0;
    }
  }
  bool ok = true;
  for (std::size_t k = 1; k < flips.size(); ++k) ok = ok && mean[k] <= mean[k - 1] + 0.01;
  const auto d = fmt("mean acc over 5 seeds: %.4f, %.4f, %.4f, %.4f", mean[0], mean[1], mean[2], mean[3]);
  return ok ? pass(d) : fail(d);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 9. Every command twice with the same config and seed.
Outcome determinism() {
  const auto root = fs::temp_directory_path() / "hdst_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> outputs[2];
  for (int run = 0; run < 2; ++run) {
    const auto out = root / std::to_string(run);
    json j = {{"seed", 909},
              {"encoder", {{"dim", 1024}, {"ngram", 4}, {"levels", 6}}},
              {"noise", {{"preset", "default"}}},
              {"data", {{"synthetic", {{"classes", 4}, {"windows_per_class", 60}}}}},
              {"sweep", {{"ngram", {2, 4}}, {"levels", {3, 6}}}},
              {"jobs", run == 0 ? 1 : 4},
              {"out", out.string()}};
    const auto cfg = hdst::app::load_run_config(std::nullopt, j);
    for (const char* verb : {"prepare", "train", "eval", "sweep", "compare", "cost"}) {
      hdst::app::run_command(verb, cfg);
    }
    for (const char* f : {"synthetic.csv", "synthetic.json", "model.bin", "metrics.json", "eval.json",
                          "sweep.csv", "sweep.json", "compare.json", "cost.json"}) {
      outputs[run].push_back(slurp(out / f));
    }
  }
  std::size_t differing = 0;
  for (std::size_t i = 0; i < outputs[0].size(); ++i) {
    differing += outputs[0][i].empty() || outputs[0][i] != outputs[1][i];
  }
  const auto d = fmt("9 output files from 6 commands (jobs 1 vs 4), %.0f differ", differing);
  return differing == 0 ? pass(d) : fail(d);
}

// 10. Optional EMG dataset, one CSV per subject.
Outcome emg() {
  const char* dir = std::getenv("HDST_EMG_DIR");
  if (dir == nullptr || *dir == '\0') return skip("HDST_EMG_DIR not set; dataset not supplied");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) return skip(std::string("no .csv files in ") + dir);
  json j = {{"seed", 1},
            {"encoder", {{"dim", 10000}, {"ngram", 9}, {"levels", 15}}},
            {"data", {{"files", files}, {"downsample", 175}, {"train_fraction", 0.25}}}};
  const auto cfg = hdst::app::load_run_config(std::nullopt, j);
  const auto enc = cfg.encoder_config(hdst::app::data_channel_count(cfg));
  double sum = 0;
  for (std::size_t s = 0; s < files.size(); ++s) {
    const auto data = hdst::app::load_subject(cfg, s, enc);
    const auto model = hdst::app::train_model(data, hdst::EncoderKind::adapted);
    sum += hdst::app::evaluate(model, data.test, data.classes, std::nullopt).accuracy();
  }
  const double acc = sum / static_cast<double>(files.size());
  const auto d = fmt("%.0f subjects, mean accuracy %.4f (target 0.989 +/- 0.02)",
                     static_cast<double>(files.size()), acc);
  return std::abs(acc - 0.989) <= 0.02 ? pass(d) : fail(d);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"algebraic properties", algebra},
      {"CiM distance law", cim_law},
      {"binder recurrence equals direct evaluation", binder},
      {"degenerate encoder equivalence + witness", degenerate},
      {"zero-noise pipeline transparency", transparency},
      {"XOR savings and read counts", xor_savings},
      {"synthetic classification", synthetic},
      {"noise degradation trend", noise_trend},
      {"determinism", determinism},
      {"EMG dataset accuracy (conditional)", emg},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
    std::printf("[%s] criterion %zu: %s: %s\n", tag, i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    failed += o.status == Outcome::fail;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
