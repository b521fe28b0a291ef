/* Exercises the C interface from C. Returns non-zero on the first failure. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "hdst/hdst.h"

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
              hdst_last_error());                                 \
      return 1;                                                   \
    }                                                             \
  } while (0)

int main(int argc, char** argv) {
  const char* workdir = argc > 1 ? argv[1] : ".";
  hdst_rng* rng = NULL;
  hdst_hv *a = NULL, *b = NULL, *x = NULL, *p = NULL, *maj = NULL;
  size_t n = 0;
  uint8_t bits[8];
  const uint8_t pattern[8] = {1, 0, 0, 1, 0, 0, 0, 0};

  EXPECT(strlen(hdst_version()) > 0);
  EXPECT(hdst_rng_create(7, &rng) == HDST_OK);
  EXPECT(hdst_hv_random(1000, rng, &a) == HDST_OK);
  EXPECT(hdst_hv_random(1000, rng, &b) == HDST_OK);
  EXPECT(hdst_hv_dim(a) == 1000);

  EXPECT(hdst_hv_bind(a, b, &x) == HDST_OK);
  EXPECT(hdst_hv_hamming(a, b, &n) == HDST_OK);
  {
    size_t pop = 0;
    hdst_hv* zero = NULL;
    EXPECT(hdst_hv_create(1000, &zero) == HDST_OK);
    EXPECT(hdst_hv_hamming(x, zero, &pop) == HDST_OK);
    EXPECT(pop == n);
    hdst_hv_destroy(zero);
  }

  EXPECT(hdst_hv_from_bits(pattern, 8, &p) == HDST_OK);
  {
    hdst_hv* r = NULL;
    EXPECT(hdst_hv_permute(p, 1, &r) == HDST_OK);
    EXPECT(hdst_hv_get_bits(r, bits, sizeof bits) == HDST_OK);
    EXPECT(bits[0] == 0 && bits[1] == 1 && bits[4] == 1 && bits[3] == 0);
    hdst_hv_destroy(r);
  }

  {
    const hdst_hv* three[3];
    three[0] = a;
    three[1] = a;
    three[2] = b;
    EXPECT(hdst_hv_majority(three, 3, NULL, &maj) == HDST_OK);
    EXPECT(hdst_hv_hamming(maj, a, &n) == HDST_OK);
    EXPECT(n == 0);
    EXPECT(hdst_hv_majority(three, 2, NULL, &maj) == HDST_E_INVALID_ARGUMENT);
    EXPECT(strlen(hdst_last_error()) > 0);
  }

  EXPECT(hdst_hv_bind(a, p, &x) == HDST_E_DIMENSION_MISMATCH);
  EXPECT(hdst_hv_create(0, &x) == HDST_E_INVALID_ARGUMENT);
  EXPECT(hdst_hv_bind(NULL, b, &x) == HDST_E_INVALID_ARGUMENT);
  EXPECT(strcmp(hdst_status_string(HDST_E_CONFIG), "configuration error") == 0);

  {
    hdst_cost cost;
    const size_t ngram[3] = {2, 3, 4};
    const size_t levels[3] = {4, 4, 4};
    EXPECT(hdst_cost_estimate(10000, 3, ngram, levels, &cost) == HDST_OK);
    EXPECT(cost.crossbar_row_reads == 9);
    EXPECT(cost.cycles_per_ngram == 11);
  }

  {
    char overrides[1024];
    char* report = NULL;
    char model_path[1024];
    hdst_model* model = NULL;
    hdst_hv* q = NULL;
    hdst_crossbar* xbar = NULL;
    hdst_noise noise;
    uint32_t window[12];
    double sw_scores[8], hw_scores[8];
    size_t label = 99, i;

    snprintf(overrides, sizeof overrides,
             "{\"seed\": 3, \"out\": \"%s/c_api\", \"encoder\": {\"dim\": 512, \"ngram\": 3, "
             "\"levels\": 4}, \"data\": {\"synthetic\": {\"classes\": 3, \"channels\": 4, "
             "\"windows_per_class\": 20}}}",
             workdir);
    EXPECT(hdst_run_command("train", NULL, overrides, &report) == HDST_OK);
    EXPECT(report != NULL && strstr(report, "\"train\"") != NULL);
    hdst_string_free(report);
    EXPECT(hdst_run_command("nope", NULL, overrides, NULL) == HDST_E_INVALID_ARGUMENT);
    EXPECT(hdst_run_command("train", NULL, "{\"data\": {\"train_fraction\": 0}}", NULL) ==
           HDST_E_CONFIG);
    EXPECT(hdst_run_command("train", NULL, "{not json", NULL) == HDST_E_CONFIG);

    snprintf(model_path, sizeof model_path, "%s/c_api/model.bin", workdir);
    EXPECT(hdst_model_load(model_path, &model) == HDST_OK);
    EXPECT(hdst_model_dim(model) == 512);
    EXPECT(hdst_model_channels(model) == 4);
    EXPECT(hdst_model_classes(model) == 3);
    EXPECT(hdst_model_ngram(model, 0) == 3);

    for (i = 0; i < 12; ++i) window[i] = (uint32_t)(1 + i % 4);
    EXPECT(hdst_model_encode(model, window, 12, rng, &q) == HDST_OK);
    EXPECT(hdst_model_encode(model, window, 11, rng, &x) == HDST_E_DIMENSION_MISMATCH);
    window[0] = 9;
    EXPECT(hdst_model_encode(model, window, 12, rng, &x) != HDST_OK);
    EXPECT(hdst_model_predict(model, q, &label, sw_scores) == HDST_OK);
    EXPECT(label < 3);

    hdst_noise_defaults(&noise);
    EXPECT(noise.p_program_flip == 0.01);
    memset(&noise, 0, sizeof noise);
    EXPECT(hdst_crossbar_from_prototypes(model, &noise, &xbar) == HDST_OK);
    EXPECT(hdst_crossbar_rows(xbar) == 3);
    EXPECT(hdst_crossbar_search(xbar, q, hw_scores) == HDST_OK);
    for (i = 0; i < 3; ++i) EXPECT(hw_scores[i] == sw_scores[i]);

    hdst_hv_destroy(q);
    hdst_crossbar_destroy(xbar);
    hdst_model_destroy(model);
    EXPECT(hdst_model_load("/nonexistent/model.bin", &model) == HDST_E_IO);
  }

  hdst_hv_destroy(a);
  hdst_hv_destroy(b);
  hdst_hv_destroy(x);
  hdst_hv_destroy(p);
  hdst_hv_destroy(maj);
  hdst_rng_destroy(rng);
  printf("c api smoke test passed\n");
  return 0;
}
