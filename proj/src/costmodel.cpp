#include "hdst/costmodel.hpp"

#include <limits>

#include "hdst/error.hpp"

namespace hdst {

void EnergyParams::validate() const {
  require(e_pcm_read_device >= 0.0 && e_xor_gate >= 0.0 && e_register_write >= 0.0 &&
              e_accumulator_inc >= 0.0 && e_sense_amp >= 0.0,
          ErrorCode::config, "energy parameters must be non-negative");
  require(internal_clock_hz > 0.0, ErrorCode::config, "internal_clock_hz must be positive");
}

CostReport count_ops(const EncoderConfig& cfg) {
  cfg.validate();
  const std::uint64_t d = cfg.dim;
  const std::uint64_t m = cfg.channel_count();
  const std::uint64_t reads = cfg.total_ngram();

  CostReport r;
  r.crossbar_row_reads = reads;
  r.xor_ops = d * reads;
  // The conventional encoder binds every (sample, channel) pair on the fly.
  r.xor_ops_saved_by_precompute = d * reads;
  r.register_writes = d * reads + d;
  r.accumulator_ops = d * m + (m % 2 == 0 ? d : 0);
  r.cycles_per_ngram = reads + kPipelineCycles;
  return r;
}

CostReport estimate(const EncoderConfig& cfg, const EnergyParams& energy) {
  energy.validate();
  CostReport r = count_ops(cfg);
  const auto device_reads = static_cast<double>(r.crossbar_row_reads) * static_cast<double>(cfg.dim);
  r.crossbar_read_energy_J = device_reads * energy.e_pcm_read_device;
  r.energy_per_ngram_J = r.crossbar_read_energy_J +
                         static_cast<double>(r.xor_ops) * energy.e_xor_gate +
                         static_cast<double>(r.register_writes) * energy.e_register_write +
                         static_cast<double>(r.accumulator_ops) * energy.e_accumulator_inc +
                         device_reads * energy.e_sense_amp;
  r.ngrams_per_second = energy.internal_clock_hz / static_cast<double>(r.cycles_per_ngram);
  // power = energy_per_ngram * ngrams_per_second, so throughput / power reduces
  // to ngrams per joule.
  r.ngrams_per_second_per_watt = r.energy_per_ngram_J > 0.0
                                     ? 1.0 / r.energy_per_ngram_J
                                     : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace hdst
