#include "hdst/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "hdst/error.hpp"

namespace hdst {

namespace {

constexpr std::array<char, 8> kMemMagic = {'H', 'D', 'S', 'T', 'M', 'E', 'M', '\0'};
constexpr std::array<char, 8> kModelMagic = {'H', 'D', 'S', 'T', 'A', 'M', '\0', '\0'};
// Guards against absurd allocations when reading corrupt files.
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 32;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

  template <typename T>
  void le(T value) {
    std::array<char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffU);
    }
    bytes(buf.data(), buf.size());
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }

  void row(const Hypervector& v) {
    for (const auto w : v.words()) le(w);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    require(static_cast<std::size_t>(in_.gcount()) == n, ErrorCode::parse,
            "model file truncated");
  }

  template <typename T>
  T le() {
    std::array<unsigned char, sizeof(T)> buf{};
    bytes(reinterpret_cast<char*>(buf.data()), buf.size());
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<T>(v);
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }

  std::uint64_t count(const char* what) {
    const auto n = le<std::uint64_t>();
    require(n <= kMaxCount, ErrorCode::parse, std::string("implausible ") + what + " in model file");
    return n;
  }

  Hypervector row(std::size_t dim) {
    Hypervector v(dim);
    for (auto& w : v.mutable_words()) w = le<std::uint64_t>();
    require((v.words().back() & ~v.tail_mask()) == 0, ErrorCode::parse,
            "model file row has non-zero padding bits");
    return v;
  }

  void magic(const std::array<char, 8>& expected, const char* what) {
    std::array<char, 8> got{};
    bytes(got.data(), got.size());
    require(got == expected, ErrorCode::parse, std::string("bad magic: not a ") + what);
  }

 private:
  std::istream& in_;
};

}  // namespace

void write_memories(std::ostream& out, const EncoderMemories& mem) {
  Writer w(out);
  const auto& layout = mem.image.layout;
  w.bytes(kMemMagic.data(), kMemMagic.size());
  w.le<std::uint32_t>(kFormatVersion);
  w.le<std::uint32_t>(0);
  w.le<std::uint64_t>(layout.dim);
  w.le<std::uint64_t>(layout.channel_count());
  for (const auto l : layout.level_counts) w.le<std::uint64_t>(l);
  for (const auto& e : mem.item_memory.vectors) w.row(e);
  for (std::size_t m = 0; m < layout.channel_count(); ++m) {
    for (const auto& level : mem.cim_for(m).levels) w.row(level);
  }
  for (const auto& row : mem.image.rows) w.row(row);
}

EncoderMemories read_memories(std::istream& in) {
  Reader r(in);
  r.magic(kMemMagic, "memories file");
  const auto version = r.le<std::uint32_t>();
  require(version == kFormatVersion, ErrorCode::parse,
          "unsupported format version " + std::to_string(version));
  (void)r.le<std::uint32_t>();
  const auto dim = r.count("dimension");
  const auto channels = r.count("channel count");
  require(dim >= 1 && channels >= 1, ErrorCode::parse, "empty memories header");
  std::vector<std::size_t> level_counts;
  for (std::uint64_t m = 0; m < channels; ++m) level_counts.push_back(r.count("level count"));

  EncoderMemories mem;
  for (std::uint64_t m = 0; m < channels; ++m) mem.item_memory.vectors.push_back(r.row(dim));
  std::vector<ContinuousItemMemory> per_channel(channels);
  for (std::uint64_t m = 0; m < channels; ++m) {
    for (std::size_t l = 0; l < level_counts[m]; ++l) per_channel[m].levels.push_back(r.row(dim));
  }
  // Collapse identical per-channel CiMs back into one shared instance.
  bool shared = true;
  for (const auto& cim : per_channel) shared = shared && cim.levels == per_channel.front().levels;
  if (shared) {
    mem.cims.push_back(per_channel.front());
    mem.channel_cim.assign(channels, 0);
  } else {
    mem.cims = std::move(per_channel);
    for (std::uint64_t m = 0; m < channels; ++m) mem.channel_cim.push_back(m);
  }

  mem.image.layout = RowLayout::from_level_counts(dim, level_counts);
  for (std::size_t i = 0; i < mem.image.layout.row_count(); ++i) mem.image.rows.push_back(r.row(dim));
  require(mem.image.rows == rebuild_image(mem).rows, ErrorCode::parse,
          "crossbar rows are inconsistent with item memory and CiM");
  return mem;
}

void write_model(std::ostream& out, const TrainedModel& model) {
  write_memories(out, model.memories);
  Writer w(out);
  const auto& cfg = model.config;
  w.bytes(kModelMagic.data(), kModelMagic.size());
  w.le<std::uint32_t>(kFormatVersion);
  w.le<std::uint32_t>(model.kind == EncoderKind::adapted ? 0 : 1);
  w.le<std::uint64_t>(cfg.seed);
  for (const auto n : cfg.ngram) w.le<std::uint64_t>(n);
  w.le<std::uint32_t>(cfg.tie_break == TieBreakMode::random_scan_chain ? 0 : 1);
  w.le<std::uint32_t>(model.quantizer ? 1 : 0);
  if (model.quantizer) {
    for (const auto v : model.quantizer->min) w.f64(v);
    for (const auto v : model.quantizer->max) w.f64(v);
  }
  w.le<std::uint64_t>(model.prototypes.size());
  for (const auto& p : model.prototypes) w.row(p);
  require(out.good(), ErrorCode::io, "error while writing model");
}

TrainedModel read_model(std::istream& in) {
  TrainedModel model;
  model.memories = read_memories(in);
  const auto& layout = model.memories.image.layout;
  const std::size_t channels = layout.channel_count();

  Reader r(in);
  r.magic(kModelMagic, "model file");
  const auto version = r.le<std::uint32_t>();
  require(version == kFormatVersion, ErrorCode::parse,
          "unsupported model version " + std::to_string(version));
  const auto kind = r.le<std::uint32_t>();
  require(kind <= 1, ErrorCode::parse, "unknown encoder kind in model file");
  model.kind = kind == 0 ? EncoderKind::adapted : EncoderKind::baseline;

  auto& cfg = model.config;
  cfg.dim = layout.dim;
  cfg.levels = layout.level_counts;
  cfg.seed = r.le<std::uint64_t>();
  for (std::size_t m = 0; m < channels; ++m) cfg.ngram.push_back(r.count("ngram size"));
  const auto tie = r.le<std::uint32_t>();
  require(tie <= 1, ErrorCode::parse, "unknown tie-break mode in model file");
  cfg.tie_break = tie == 0 ? TieBreakMode::random_scan_chain : TieBreakMode::error_on_tie;
  if (r.le<std::uint32_t>() != 0) {
    QuantizerSpec q;
    q.levels = cfg.levels;
    for (std::size_t m = 0; m < channels; ++m) q.min.push_back(r.f64());
    for (std::size_t m = 0; m < channels; ++m) q.max.push_back(r.f64());
    q.validate();
    model.quantizer = std::move(q);
  }
  const auto classes = r.count("class count");
  for (std::uint64_t c = 0; c < classes; ++c) model.prototypes.push_back(r.row(layout.dim));
  cfg.validate();
  return model;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  write_model(out, model);
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  return read_model(in);
}

}  // namespace hdst
