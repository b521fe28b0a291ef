#pragma once

#include <cstdint>

#include "hdst/encoder.hpp"

namespace hdst {

// Per-event energies in joules. Only e_pcm_read_device has a measured
// default (23 fJ per device per read); the rest default to 0 and are
// what-if knobs.
struct EnergyParams {
  double e_pcm_read_device = 23e-15;
  double e_xor_gate = 0.0;
  double e_register_write = 0.0;
  double e_accumulator_inc = 0.0;
  double e_sense_amp = 0.0;
  double internal_clock_hz = 440e6;

  void validate() const;
};

// Counts are per encoded N-gram of the in-memory encoder.
//
//   crossbar_row_reads          = sum_m N_m
//   xor_ops                     = D * sum_m N_m            (binder)
//   xor_ops_saved_by_precompute = D * sum_m N_m            (D*N*M when uniform)
//   register_writes             = D * sum_m N_m + D        (binder + output latch)
//   accumulator_ops             = D * M (+ D for the scan-chain input when M is even)
//   cycles_per_ngram            = sum_m N_m + kPipelineCycles
struct CostReport {
  std::uint64_t crossbar_row_reads = 0;
  std::uint64_t xor_ops = 0;
  std::uint64_t xor_ops_saved_by_precompute = 0;
  std::uint64_t register_writes = 0;
  std::uint64_t accumulator_ops = 0;
  std::uint64_t cycles_per_ngram = 0;
  double crossbar_read_energy_J = 0.0;
  double energy_per_ngram_J = 0.0;
  double ngrams_per_second = 0.0;
  // Equals 1 / energy_per_ngram; +inf when every energy constant is zero.
  double ngrams_per_second_per_watt = 0.0;
};

CostReport count_ops(const EncoderConfig& cfg);
CostReport estimate(const EncoderConfig& cfg, const EnergyParams& energy);

}  // namespace hdst
