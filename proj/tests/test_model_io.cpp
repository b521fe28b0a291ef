#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "hdst/error.hpp"
#include "hdst/learner.hpp"
#include "hdst/model_io.hpp"

namespace {

hdst::TrainedModel sample_model(std::vector<std::size_t> levels, std::size_t dim) {
  hdst::TrainedModel m;
  m.config.dim = dim;
  m.config.ngram.assign(levels.size(), 3);
  m.config.ngram[0] = 2;
  m.config.levels = levels;
  m.config.seed = 1234;
  m.config.tie_break = hdst::TieBreakMode::error_on_tie;
  m.kind = hdst::EncoderKind::adapted;
  m.memories = hdst::build_encoder_memories(dim, levels, m.config.seed);
  hdst::QuantizerSpec q;
  q.min.assign(levels.size(), -1.25);
  q.max.assign(levels.size(), 3.5);
  q.levels = levels;
  m.quantizer = q;
  hdst::SeededRng r(3);
  for (int c = 0; c < 4; ++c) m.prototypes.push_back(hdst::random_hv(dim, r));
  return m;
}

std::string serialize(const hdst::TrainedModel& m) {
  std::ostringstream out;
  hdst::write_model(out, m);
  return out.str();
}

hdst::ErrorCode read_error(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    (void)hdst::read_model(in);
  } catch (const hdst::Error& e) {
    return e.code();
  }
  FAIL("read succeeded unexpectedly");
  return hdst::ErrorCode::invalid_argument;
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("round trip, shared and per-channel memories") {
  for (const auto& levels : std::vector<std::vector<std::size_t>>{{8, 8, 8}, {3, 7, 5, 2}}) {
    for (std::size_t dim : {65, 1000}) {
      const auto m = sample_model(levels, dim);
      const auto bytes = serialize(m);
      std::istringstream in(bytes);
      const auto back = hdst::read_model(in);
      CHECK(back.config.dim == dim);
      CHECK(back.config.ngram == m.config.ngram);
      CHECK(back.config.levels == m.config.levels);
      CHECK(back.config.seed == m.config.seed);
      CHECK(back.config.tie_break == m.config.tie_break);
      CHECK(back.kind == m.kind);
      CHECK(back.memories.item_memory.vectors == m.memories.item_memory.vectors);
      CHECK(back.memories.image.rows == m.memories.image.rows);
      CHECK(back.memories.cims.size() == m.memories.cims.size());
      REQUIRE(back.quantizer.has_value());
      CHECK(back.quantizer->min == m.quantizer->min);
      CHECK(back.quantizer->max == m.quantizer->max);
      CHECK(back.prototypes == m.prototypes);
      CHECK(serialize(back) == bytes);
    }
  }
}

TEST_CASE("header layout") {
  const auto m = sample_model({4, 4}, 128);
  const auto bytes = serialize(m);
  CHECK(bytes.compare(0, 8, std::string("HDSTMEM\0", 8)) == 0);
  CHECK(static_cast<unsigned char>(bytes[8]) == 1);  // version, little-endian
  CHECK(static_cast<unsigned char>(bytes[16]) == 128);  // D
  CHECK(static_cast<unsigned char>(bytes[24]) == 2);    // M
  // Rows of 2 words: 2 IM, 8 CiM levels (written per channel), 8 crossbar rows.
  const std::size_t mem_bytes = 8 + 4 + 4 + 8 + 8 + 2 * 8 + (2 + 8 + 8) * 2 * 8;
  CHECK(bytes.compare(mem_bytes, 8, std::string("HDSTAM\0\0", 8)) == 0);
}

TEST_CASE("corrupt files are rejected") {
  const auto m = sample_model({4, 4}, 128);
  const auto bytes = serialize(m);
  CHECK(read_error(bytes.substr(0, bytes.size() - 1)) == hdst::ErrorCode::parse);
  CHECK(read_error(bytes.substr(0, 10)) == hdst::ErrorCode::parse);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(read_error(bad_magic) == hdst::ErrorCode::parse);

  auto bad_version = bytes;
  bad_version[8] = 2;
  CHECK(read_error(bad_version) == hdst::ErrorCode::parse);

  // Flip one bit of the first crossbar row: no longer consistent with IM x CiM.
  auto bad_row = bytes;
  const std::size_t first_row = 8 + 4 + 4 + 8 + 8 + 2 * 8 + (2 + 8) * 2 * 8;
  bad_row[first_row] ^= 1;
  CHECK(read_error(bad_row) == hdst::ErrorCode::parse);

  // Set a padding bit in the first IM row (D = 128 has none; use D = 100).
  const auto odd = serialize(sample_model({4, 4}, 100));
  auto bad_pad = odd;
  const std::size_t im_row = 8 + 4 + 4 + 8 + 8 + 2 * 8;
  bad_pad[im_row + 15] = static_cast<char>(0x80);
  CHECK(read_error(bad_pad) == hdst::ErrorCode::parse);
}

TEST_CASE("files on disk") {
  const auto path = std::filesystem::temp_directory_path() / "hdst_model_io.bin";
  const auto m = sample_model({5, 5, 5}, 300);
  hdst::save_model(path, m);
  CHECK(hdst::load_model(path).prototypes == m.prototypes);
  CHECK_THROWS_AS(hdst::load_model(path.string() + ".missing"), hdst::Error);
}

TEST_CASE("memories section alone") {
  const std::vector<std::size_t> levels = {6, 6};
  const auto mem = hdst::build_encoder_memories(200, levels, 8);
  std::stringstream s;
  hdst::write_memories(s, mem);
  const auto back = hdst::read_memories(s);
  CHECK(back.image.rows == mem.image.rows);
  CHECK(back.cims.size() == 1);
}

}
