#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hdst/dataio.hpp"
#include "hdst/encoder.hpp"
#include "hdst/memories.hpp"

namespace hdst {

// Binary layout, all integers little-endian:
//
//   memories section
//     char[8]  "HDSTMEM\0"
//     u32      version (1)
//     u32      reserved (0)
//     u64      D
//     u64      M
//     u64[M]   L_m
//     rows     E_1..E_M, CiM levels of every channel (sum L_m), crossbar rows (sum L_m)
//   classifier section (model files only)
//     char[8]  "HDSTAM\0\0"
//     u32      version (1)
//     u32      encoder kind (0 adapted, 1 baseline)
//     u64      seed
//     u64[M]   N_m
//     u32      tie-break mode (0 random scan chain, 1 error on tie)
//     u32      has quantizer
//     f64[M]   quantizer min, f64[M] quantizer max (when present)
//     u64      C
//     rows     P_1..P_C
//
// Each row is ceil(D / 64) u64 words, word 0 first, bit d at word d/64, bit d%64.
inline constexpr std::uint32_t kFormatVersion = 1;

struct TrainedModel {
  EncoderConfig config;
  EncoderKind kind = EncoderKind::adapted;
  EncoderMemories memories;
  std::optional<QuantizerSpec> quantizer;
  std::vector<Hypervector> prototypes;
};

void write_memories(std::ostream& out, const EncoderMemories& mem);
EncoderMemories read_memories(std::istream& in);

void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace hdst
