#include "hdst/hdst.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "app/commands.hpp"
#include "hdst/costmodel.hpp"
#include "hdst/crossbar.hpp"
#include "hdst/error.hpp"
#include "hdst/learner.hpp"
#include "hdst/model_io.hpp"

struct hdst_rng {
  hdst::SeededRng rng;
};
struct hdst_hv {
  hdst::Hypervector hv;
};
struct hdst_model {
  hdst::TrainedModel model;
};
struct hdst_crossbar {
  hdst::PcmCrossbar xbar;
};

namespace {

thread_local std::string g_last_error;

hdst_status to_status(hdst::ErrorCode code) { return static_cast<hdst_status>(code); }

template <typename F>
hdst_status guard(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const hdst::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return HDST_E_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HDST_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HDST_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HDST_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  hdst::require(p != nullptr, hdst::ErrorCode::invalid_argument,
                std::string(what) + " must not be NULL");
}

hdst_status emit(hdst::Hypervector hv, hdst_hv** out) {
  *out = new hdst_hv{std::move(hv)};
  return HDST_OK;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* hdst_version(void) { return "1.0.0"; }

const char* hdst_status_string(hdst_status status) {
  switch (status) {
    case HDST_OK: return "ok";
    case HDST_E_INVALID_ARGUMENT: return "invalid argument";
    case HDST_E_DIMENSION_MISMATCH: return "dimension mismatch";
    case HDST_E_OUT_OF_RANGE: return "out of range";
    case HDST_E_UNSUPPORTED_CONFIG: return "unsupported configuration";
    case HDST_E_TIE: return "tie in majority";
    case HDST_E_EMPTY_CLASS: return "empty class";
    case HDST_E_PARSE: return "parse error";
    case HDST_E_SCHEMA: return "schema error";
    case HDST_E_DATA: return "data error";
    case HDST_E_IO: return "I/O error";
    case HDST_E_CONFIG: return "configuration error";
    case HDST_E_PARTIAL: return "partial failure";
    case HDST_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* hdst_last_error(void) { return g_last_error.c_str(); }

void hdst_string_free(char* s) { std::free(s); }

hdst_status hdst_rng_create(uint64_t seed, hdst_rng** out) {
  return guard([&] {
    need(out, "out");
    *out = new hdst_rng{hdst::SeededRng(seed)};
    return HDST_OK;
  });
}

void hdst_rng_destroy(hdst_rng* rng) { delete rng; }

hdst_status hdst_hv_create(size_t dim, hdst_hv** out) {
  return guard([&] {
    need(out, "out");
    return emit(hdst::Hypervector(dim), out);
  });
}

hdst_status hdst_hv_random(size_t dim, hdst_rng* rng, hdst_hv** out) {
  return guard([&] {
    need(rng, "rng");
    need(out, "out");
    return emit(hdst::random_hv(dim, rng->rng), out);
  });
}

hdst_status hdst_hv_from_bits(const uint8_t* bits, size_t dim, hdst_hv** out) {
  return guard([&] {
    need(bits, "bits");
    need(out, "out");
    hdst::Hypervector hv(dim);
    for (size_t i = 0; i < dim; ++i) hv.set(i, bits[i] != 0);
    return emit(std::move(hv), out);
  });
}

hdst_status hdst_hv_get_bits(const hdst_hv* hv, uint8_t* bits, size_t capacity) {
  return guard([&] {
    need(hv, "hv");
    need(bits, "bits");
    hdst::require(capacity >= hv->hv.dim(), hdst::ErrorCode::out_of_range,
                  "bit buffer smaller than the vector dimension");
    for (size_t i = 0; i < hv->hv.dim(); ++i) bits[i] = hv->hv.get(i) ? 1 : 0;
    return HDST_OK;
  });
}

size_t hdst_hv_dim(const hdst_hv* hv) { return hv == nullptr ? 0 : hv->hv.dim(); }

void hdst_hv_destroy(hdst_hv* hv) { delete hv; }

hdst_status hdst_hv_bind(const hdst_hv* a, const hdst_hv* b, hdst_hv** out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    return emit(hdst::bind(a->hv, b->hv), out);
  });
}

hdst_status hdst_hv_permute(const hdst_hv* a, size_t k, hdst_hv** out) {
  return guard([&] {
    need(a, "a");
    need(out, "out");
    return emit(hdst::permute(a->hv, k), out);
  });
}

hdst_status hdst_hv_majority(const hdst_hv* const* inputs, size_t count, const hdst_hv* tie_break,
                             hdst_hv** out) {
  return guard([&] {
    need(inputs, "inputs");
    need(out, "out");
    std::vector<hdst::Hypervector> v;
    v.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      need(inputs[i], "inputs[i]");
      v.push_back(inputs[i]->hv);
    }
    std::optional<hdst::Hypervector> tie;
    if (tie_break != nullptr) tie = tie_break->hv;
    return emit(hdst::majority(v, tie), out);
  });
}

hdst_status hdst_hv_hamming(const hdst_hv* a, const hdst_hv* b, size_t* out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = hdst::hamming(a->hv, b->hv);
    return HDST_OK;
  });
}

hdst_status hdst_hv_dot(const hdst_hv* a, const hdst_hv* b, size_t* out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = hdst::dot(a->hv, b->hv);
    return HDST_OK;
  });
}

hdst_status hdst_model_load(const char* path, hdst_model** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new hdst_model{hdst::load_model(path)};
    return HDST_OK;
  });
}

void hdst_model_destroy(hdst_model* model) { delete model; }

size_t hdst_model_dim(const hdst_model* model) {
  return model == nullptr ? 0 : model->model.config.dim;
}

size_t hdst_model_channels(const hdst_model* model) {
  return model == nullptr ? 0 : model->model.config.channel_count();
}

size_t hdst_model_classes(const hdst_model* model) {
  return model == nullptr ? 0 : model->model.prototypes.size();
}

size_t hdst_model_ngram(const hdst_model* model, size_t channel) {
  if (model == nullptr || channel >= model->model.config.channel_count()) return 0;
  return model->model.config.ngram[channel];
}

hdst_status hdst_model_encode(const hdst_model* model, const uint32_t* levels, size_t count,
                              hdst_rng* rng, hdst_hv** out) {
  return guard([&] {
    need(model, "model");
    need(levels, "levels");
    need(rng, "rng");
    need(out, "out");
    const auto& m = model->model;
    hdst::require(count == m.config.total_ngram(), hdst::ErrorCode::dimension_mismatch,
                  "expected " + std::to_string(m.config.total_ngram()) + " levels, got " +
                      std::to_string(count));
    hdst::SampleWindow w;
    const uint32_t* p = levels;
    for (const auto n : m.config.ngram) {
      w.levels.emplace_back(p, p + n);
      p += n;
    }
    return emit(m.kind == hdst::EncoderKind::adapted
                    ? hdst::encode_adapted(w, m.memories.image, m.config, rng->rng)
                    : hdst::encode_baseline(w, m.memories, m.config, rng->rng),
                out);
  });
}

hdst_status hdst_model_predict(const hdst_model* model, const hdst_hv* query, size_t* label,
                               double* scores) {
  return guard([&] {
    need(model, "model");
    need(query, "query");
    need(label, "label");
    const auto p = hdst::predict(model->model.prototypes, query->hv);
    *label = p.label;
    if (scores != nullptr) std::copy(p.scores.begin(), p.scores.end(), scores);
    return HDST_OK;
  });
}

void hdst_noise_defaults(hdst_noise* noise) {
  if (noise == nullptr) return;
  const auto d = hdst::NoiseParams::defaults();
  *noise = {d.p_program_flip, d.p_read_01, d.p_read_10, d.am_sigma, d.subarray_rows, d.seed};
}

hdst_status hdst_crossbar_from_prototypes(const hdst_model* model, const hdst_noise* noise,
                                          hdst_crossbar** out) {
  return guard([&] {
    need(model, "model");
    need(noise, "noise");
    need(out, "out");
    hdst::NoiseParams params;
    params.p_program_flip = noise->p_program_flip;
    params.p_read_01 = noise->p_read_01;
    params.p_read_10 = noise->p_read_10;
    params.am_sigma = noise->am_sigma;
    params.subarray_rows = noise->subarray_rows;
    params.seed = noise->seed;
    *out = new hdst_crossbar{hdst::PcmCrossbar::program(model->model.prototypes, params)};
    return HDST_OK;
  });
}

void hdst_crossbar_destroy(hdst_crossbar* xbar) { delete xbar; }

size_t hdst_crossbar_rows(const hdst_crossbar* xbar) {
  return xbar == nullptr ? 0 : xbar->xbar.row_count();
}

hdst_status hdst_crossbar_read_row(hdst_crossbar* xbar, size_t row, hdst_hv** out) {
  return guard([&] {
    need(xbar, "xbar");
    need(out, "out");
    return emit(xbar->xbar.read_row(row), out);
  });
}

hdst_status hdst_crossbar_search(hdst_crossbar* xbar, const hdst_hv* query, double* scores) {
  return guard([&] {
    need(xbar, "xbar");
    need(query, "query");
    need(scores, "scores");
    const auto s = xbar->xbar.am_search(query->hv);
    std::copy(s.begin(), s.end(), scores);
    return HDST_OK;
  });
}

hdst_status hdst_cost_estimate(size_t dim, size_t channels, const size_t* ngram,
                               const size_t* levels, hdst_cost* out) {
  return guard([&] {
    need(ngram, "ngram");
    need(levels, "levels");
    need(out, "out");
    hdst::EncoderConfig cfg;
    cfg.dim = dim;
    cfg.ngram.assign(ngram, ngram + channels);
    cfg.levels.assign(levels, levels + channels);
    const auto r = hdst::estimate(cfg, hdst::EnergyParams{});
    *out = {r.crossbar_row_reads,    r.xor_ops,
            r.xor_ops_saved_by_precompute, r.register_writes,
            r.accumulator_ops,       r.cycles_per_ngram,
            r.crossbar_read_energy_J, r.energy_per_ngram_J,
            r.ngrams_per_second,     r.ngrams_per_second_per_watt};
    return HDST_OK;
  });
}

hdst_status hdst_run_command(const char* verb, const char* config_path, const char* overrides_json,
                             char** report_json) {
  return guard([&] {
    need(verb, "verb");
    nlohmann::json overrides = nlohmann::json::object();
    if (overrides_json != nullptr && *overrides_json != '\0') {
      try {
        overrides = nlohmann::json::parse(overrides_json);
      } catch (const nlohmann::json::exception& e) {
        hdst::fail(hdst::ErrorCode::config, std::string("overrides: ") + e.what());
      }
    }
    std::optional<std::filesystem::path> file;
    if (config_path != nullptr && *config_path != '\0') file = config_path;
    const auto cfg = hdst::app::load_run_config(file, overrides);
    const auto result = hdst::app::run_command(verb, cfg);
    if (report_json != nullptr) *report_json = dup_string(result.report.dump(2));
    if (result.partial_failure) {
      g_last_error = "one or more sweep cells failed";
      return HDST_E_PARTIAL;
    }
    return HDST_OK;
  });
}

}  // extern "C"
