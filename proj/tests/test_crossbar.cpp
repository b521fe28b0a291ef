#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "hdst/crossbar.hpp"
#include "hdst/error.hpp"
#include "oracle.hpp"

namespace {

hdst::CrossbarImage image_60x10000() {
  const std::vector<std::size_t> levels(4, 15);
  return hdst::build_encoder_memories(10000, levels, 17).image;
}

std::size_t flipped_devices(const hdst::PcmCrossbar& x) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < x.row_count(); ++r) {
    n += hdst::hamming(x.ideal()[r], x.programmed()[r]);
  }
  return n;
}

hdst::NoiseParams program_only(double p, std::uint64_t seed, std::size_t subarray = 0) {
  hdst::NoiseParams n;
  n.p_program_flip = p;
  n.seed = seed;
  n.subarray_rows = subarray;
  return n;
}

}  // namespace

TEST_SUITE("crossbar") {

TEST_CASE("noise parameter validation") {
  CHECK_NOTHROW(hdst::NoiseParams::defaults().validate());
  hdst::NoiseParams n;
  n.p_read_01 = 1.5;
  CHECK_THROWS_AS(n.validate(), hdst::Error);
  n = {};
  n.p_program_flip = -0.1;
  CHECK_THROWS_AS(n.validate(), hdst::Error);
  n = {};
  n.am_sigma = -1.0;
  CHECK_THROWS_AS(n.validate(), hdst::Error);
  const auto d = hdst::NoiseParams::defaults();
  CHECK(d.p_program_flip == 0.01);
  CHECK(d.p_read_01 == 0.003);
  CHECK(d.p_read_10 == 0.003);
  CHECK(d.am_sigma == 0.0);
}

TEST_CASE("program-time flips") {
  const auto image = image_60x10000();
  const auto clean = hdst::PcmCrossbar::program(image, program_only(0.0, 1));
  CHECK(clean.programmed() == image.rows);
  CHECK(clean.row_count() == image.row_count());
  CHECK(clean.dim() == 10000);

  const auto inverted = hdst::PcmCrossbar::program(image, program_only(1.0, 1));
  for (std::size_t r = 0; r < image.row_count(); ++r) {
    CHECK(inverted.programmed()[r] == image.rows[r].complement());
  }

  const auto noisy = hdst::PcmCrossbar::program(image, program_only(0.01, 1));
  const double flips = static_cast<double>(flipped_devices(noisy));
  CHECK(std::abs(flips - 6000.0) <= 4.0 * std::sqrt(600000 * 0.01 * 0.99));
}

TEST_CASE("read-time flips") {
  std::vector<hdst::Hypervector> rows = {hdst::Hypervector(10000).complement()};
  hdst::NoiseParams n;
  n.p_read_10 = 1.0;
  auto all_zero = hdst::PcmCrossbar::program(rows, n);
  CHECK(all_zero.read_row(0).popcount() == 0);
  CHECK(all_zero.snapshot_row(0) == rows[0]);

  hdst::SeededRng r(3);
  rows = {hdst::random_hv(10000, r)};
  auto ideal = hdst::PcmCrossbar::program(rows, hdst::NoiseParams::off(5));
  for (int i = 0; i < 20; ++i) CHECK(ideal.read_row(0) == rows[0]);
  CHECK(ideal.read_count() == 20);
  ideal.reset_read_count();
  CHECK(ideal.read_count() == 0);

  n = {};
  n.p_read_01 = n.p_read_10 = 0.003;
  n.seed = 9;
  auto xbar = hdst::PcmCrossbar::program(rows, n);
  double total = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto h = static_cast<double>(hdst::hamming(xbar.read_row(0), rows[0]));
    REQUIRE(std::abs(h - 30.0) <= 4.0 * std::sqrt(10000 * 0.003 * 0.997));
    total += h;
  }
  CHECK(std::abs(total / 1000.0 - 30.0) < 1.0);
  CHECK(xbar.programmed() == rows);
}

TEST_CASE("asymmetric read flips act on the stored state") {
  hdst::SeededRng r(4);
  std::vector<hdst::Hypervector> rows = {hdst::random_hv(20000, r)};
  hdst::NoiseParams n;
  n.p_read_01 = 0.2;
  n.seed = 2;
  auto xbar = hdst::PcmCrossbar::program(rows, n);
  const auto read = xbar.read_row(0);
  const auto ones = rows[0].popcount();
  // Stored ones never flip; stored zeros flip at 0.2.
  CHECK(hdst::dot(read, rows[0]) == ones);
  const auto gained = read.popcount() - ones;
  CHECK(oracle::within_binomial(static_cast<double>(gained), static_cast<double>(20000 - ones), 0.2));
}

TEST_CASE("row bounds") {
  auto xbar = hdst::PcmCrossbar::program(std::vector<hdst::Hypervector>{hdst::Hypervector(8)},
                                         hdst::NoiseParams::off());
  CHECK_THROWS_AS(xbar.read_row(1), hdst::Error);
  CHECK_THROWS_AS(xbar.am_search(hdst::Hypervector(9)), hdst::Error);
}

TEST_CASE("associative search") {
  hdst::SeededRng r(10);
  std::vector<hdst::Hypervector> protos;
  for (int c = 0; c < 6; ++c) protos.push_back(hdst::random_hv(2000, r));
  auto xbar = hdst::PcmCrossbar::program(protos, hdst::NoiseParams::off(1));

  const auto self = xbar.am_search(protos[2]);
  CHECK(self[2] == static_cast<double>(protos[2].popcount()));
  for (std::size_t c = 0; c < protos.size(); ++c) {
    if (c != 2) CHECK(self[c] < self[2]);
  }
  for (double s : xbar.am_search(hdst::Hypervector(2000))) CHECK(s == 0.0);

  for (int q = 0; q < 100; ++q) {
    const auto query = hdst::random_hv(2000, r);
    const auto scores = xbar.am_search(query);
    for (std::size_t c = 0; c < protos.size(); ++c) {
      CHECK(scores[c] ==
            static_cast<double>(oracle::dot_bits(oracle::bits_of(query), oracle::bits_of(protos[c]))));
    }
  }
  CHECK(xbar.read_count() == 102 * protos.size());
}

TEST_CASE("analog search noise") {
  hdst::SeededRng r(11);
  std::vector<hdst::Hypervector> protos = {hdst::random_hv(1000, r)};
  hdst::NoiseParams n;
  n.am_sigma = 5.0;
  n.seed = 3;
  auto xbar = hdst::PcmCrossbar::program(protos, n);
  const double exact = static_cast<double>(protos[0].popcount());
  double sum = 0, sq = 0;
  const int trials = 4000;
  for (int i = 0; i < trials; ++i) {
    const double e = xbar.am_search(protos[0])[0] - exact;
    sum += e;
    sq += e * e;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt(sq / trials - mean * mean);
  CHECK(std::abs(mean) < 4 * 5.0 / std::sqrt(trials));
  CHECK(sd == doctest::Approx(5.0).epsilon(0.08));
}

TEST_CASE("seed determinism") {
  const auto image = image_60x10000();
  const auto noise = hdst::NoiseParams::defaults(77);
  auto a = hdst::PcmCrossbar::program(image, noise);
  auto b = hdst::PcmCrossbar::program(image, noise);
  CHECK(a.programmed() == b.programmed());
  for (std::size_t i = 0; i < 30; ++i) CHECK(a.read_row(i % 60) == b.read_row(i % 60));
  auto c = hdst::PcmCrossbar::program(image, hdst::NoiseParams::defaults(78));
  CHECK(c.programmed() != a.programmed());
}

TEST_CASE("subarray partition leaves flip statistics unchanged") {
  const auto image = image_60x10000();
  std::vector<double> whole, split;
  for (std::uint64_t s = 0; s < 20; ++s) {
    whole.push_back(static_cast<double>(
        flipped_devices(hdst::PcmCrossbar::program(image, program_only(0.01, s)))));
    split.push_back(static_cast<double>(
        flipped_devices(hdst::PcmCrossbar::program(image, program_only(0.01, s, 16)))));
  }
  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  // Mean of 20 Binomial(600000, 0.01) draws: sd = sqrt(5940 / 20) ~ 17.
  CHECK(std::abs(mean(whole) - 6000.0) < 4 * 17.3);
  CHECK(std::abs(mean(split) - 6000.0) < 4 * 17.3);
  for (double f : split) CHECK(oracle::within_binomial(f, 600000, 0.01));

  // Each subarray's devices are drawn from its own stream.
  auto a = hdst::PcmCrossbar::program(image, program_only(0.01, 3, 16));
  auto b = hdst::PcmCrossbar::program(image, program_only(0.01, 3, 0));
  CHECK(a.programmed() != b.programmed());
}

}
