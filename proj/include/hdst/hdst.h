/* C interface to the hdst library. All handles are opaque; every function
 * that can fail returns an hdst_status and leaves a message retrievable with
 * hdst_last_error() on the calling thread. */
#ifndef HDST_H
#define HDST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(HDST_BUILDING)
#define HDST_API __declspec(dllexport)
#else
#define HDST_API __declspec(dllimport)
#endif
#else
#define HDST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hdst_status {
  HDST_OK = 0,
  HDST_E_INVALID_ARGUMENT = 1,
  HDST_E_DIMENSION_MISMATCH = 2,
  HDST_E_OUT_OF_RANGE = 3,
  HDST_E_UNSUPPORTED_CONFIG = 4,
  HDST_E_TIE = 5,
  HDST_E_EMPTY_CLASS = 6,
  HDST_E_PARSE = 7,
  HDST_E_SCHEMA = 8,
  HDST_E_DATA = 9,
  HDST_E_IO = 10,
  HDST_E_CONFIG = 11,
  HDST_E_PARTIAL = 12, /* sweep finished but some cells failed */
  HDST_E_INTERNAL = 99
} hdst_status;

typedef enum hdst_tie_mode { HDST_TIE_RANDOM = 0, HDST_TIE_ERROR = 1 } hdst_tie_mode;

typedef struct hdst_rng hdst_rng;
typedef struct hdst_hv hdst_hv;
typedef struct hdst_model hdst_model;
typedef struct hdst_crossbar hdst_crossbar;

HDST_API const char* hdst_version(void);
HDST_API const char* hdst_status_string(hdst_status status);
/* Message of the last failed call on this thread; empty string if none. */
HDST_API const char* hdst_last_error(void);

/* Releases strings returned through char** out-parameters. */
HDST_API void hdst_string_free(char* s);

/* ---- random source ---- */
HDST_API hdst_status hdst_rng_create(uint64_t seed, hdst_rng** out);
HDST_API void hdst_rng_destroy(hdst_rng* rng);

/* ---- hypervectors ---- */
HDST_API hdst_status hdst_hv_create(size_t dim, hdst_hv** out);
HDST_API hdst_status hdst_hv_random(size_t dim, hdst_rng* rng, hdst_hv** out);
/* bits[i] != 0 sets bit i. */
HDST_API hdst_status hdst_hv_from_bits(const uint8_t* bits, size_t dim, hdst_hv** out);
HDST_API hdst_status hdst_hv_get_bits(const hdst_hv* hv, uint8_t* bits, size_t capacity);
HDST_API size_t hdst_hv_dim(const hdst_hv* hv);
HDST_API void hdst_hv_destroy(hdst_hv* hv);

HDST_API hdst_status hdst_hv_bind(const hdst_hv* a, const hdst_hv* b, hdst_hv** out);
HDST_API hdst_status hdst_hv_permute(const hdst_hv* a, size_t k, hdst_hv** out);
/* tie_break must be non-NULL exactly when count is even. */
HDST_API hdst_status hdst_hv_majority(const hdst_hv* const* inputs, size_t count,
                                      const hdst_hv* tie_break, hdst_hv** out);
HDST_API hdst_status hdst_hv_hamming(const hdst_hv* a, const hdst_hv* b, size_t* out);
HDST_API hdst_status hdst_hv_dot(const hdst_hv* a, const hdst_hv* b, size_t* out);

/* ---- trained models ---- */
HDST_API hdst_status hdst_model_load(const char* path, hdst_model** out);
HDST_API void hdst_model_destroy(hdst_model* model);
HDST_API size_t hdst_model_dim(const hdst_model* model);
HDST_API size_t hdst_model_channels(const hdst_model* model);
HDST_API size_t hdst_model_classes(const hdst_model* model);
HDST_API size_t hdst_model_ngram(const hdst_model* model, size_t channel);

/* Encodes one window. levels holds, for each channel m in order, N_m
 * 1-based levels from oldest to newest (total sum of N_m entries). */
HDST_API hdst_status hdst_model_encode(const hdst_model* model, const uint32_t* levels,
                                       size_t count, hdst_rng* rng, hdst_hv** out);
/* Software associative search. scores may be NULL; otherwise it receives
 * hdst_model_classes() dot products. */
HDST_API hdst_status hdst_model_predict(const hdst_model* model, const hdst_hv* query,
                                        size_t* label, double* scores);

/* ---- noisy crossbar ---- */
typedef struct hdst_noise {
  double p_program_flip;
  double p_read_01;
  double p_read_10;
  double am_sigma;
  size_t subarray_rows; /* 0 = whole array is one subarray */
  uint64_t seed;
} hdst_noise;

/* Fills the default noise preset. */
HDST_API void hdst_noise_defaults(hdst_noise* noise);

/* Programs the model's class prototypes into a crossbar. */
HDST_API hdst_status hdst_crossbar_from_prototypes(const hdst_model* model,
                                                   const hdst_noise* noise,
                                                   hdst_crossbar** out);
HDST_API void hdst_crossbar_destroy(hdst_crossbar* xbar);
HDST_API size_t hdst_crossbar_rows(const hdst_crossbar* xbar);
HDST_API hdst_status hdst_crossbar_read_row(hdst_crossbar* xbar, size_t row, hdst_hv** out);
/* scores receives hdst_crossbar_rows() values. */
HDST_API hdst_status hdst_crossbar_search(hdst_crossbar* xbar, const hdst_hv* query,
                                          double* scores);

/* ---- cost model ---- */
typedef struct hdst_cost {
  uint64_t crossbar_row_reads;
  uint64_t xor_ops;
  uint64_t xor_ops_saved_by_precompute;
  uint64_t register_writes;
  uint64_t accumulator_ops;
  uint64_t cycles_per_ngram;
  double crossbar_read_energy_j;
  double energy_per_ngram_j;
  double ngrams_per_second;
  double ngrams_per_second_per_watt;
} hdst_cost;

/* Default energy constants. ngram and levels have `channels` entries. */
HDST_API hdst_status hdst_cost_estimate(size_t dim, size_t channels, const size_t* ngram,
                                        const size_t* levels, hdst_cost* out);

/* ---- commands ----
 * Runs prepare | train | eval | sweep | compare | cost. config_path may be
 * NULL. overrides_json may be NULL or a JSON object in config-file layout,
 * optionally with "seed_fallback". On HDST_OK or HDST_E_PARTIAL, *report_json
 * (if report_json is non-NULL) receives the report; free it with
 * hdst_string_free. */
HDST_API hdst_status hdst_run_command(const char* verb, const char* config_path,
                                      const char* overrides_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
