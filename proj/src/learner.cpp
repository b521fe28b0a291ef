#include "hdst/learner.hpp"

#include <string>

#include "hdst/error.hpp"

namespace hdst {

AssociativeMemory::AssociativeMemory(std::size_t classes, std::size_t dim)
    : dim_(dim), counts_(classes, 0), counters_(classes * dim, 0) {
  require(classes >= 1, ErrorCode::invalid_argument, "associative memory needs >= 1 class");
  require(dim >= 1, ErrorCode::invalid_argument, "hypervector dimension must be >= 1");
}

void AssociativeMemory::accumulate(std::size_t cls, const Hypervector& ngram) {
  require(cls < counts_.size(), ErrorCode::out_of_range,
          "class " + std::to_string(cls) + " out of range (" + std::to_string(counts_.size()) +
              " classes)");
  require(ngram.dim() == dim_, ErrorCode::dimension_mismatch,
          "ngram dimension does not match associative memory");
  accumulate_bits(ngram, std::span<std::uint32_t>(counters_).subspan(cls * dim_, dim_));
  ++counts_[cls];
  prototypes_.clear();
}

std::span<const std::uint32_t> AssociativeMemory::counters(std::size_t cls) const {
  require(cls < counts_.size(), ErrorCode::out_of_range, "class out of range");
  return std::span<const std::uint32_t>(counters_).subspan(cls * dim_, dim_);
}

const std::vector<Hypervector>& AssociativeMemory::finalize(SeededRng& rng) {
  for (std::size_t c = 0; c < counts_.size(); ++c) {
    require(counts_[c] > 0, ErrorCode::empty_class,
            "class " + std::to_string(c) + " has no training ngrams");
  }
  std::vector<Hypervector> out;
  out.reserve(counts_.size());
  std::vector<std::uint32_t> scratch(dim_);
  for (std::size_t c = 0; c < counts_.size(); ++c) {
    const auto row = counters(c);
    scratch.assign(row.begin(), row.end());
    const std::uint64_t n = counts_[c];
    if (n % 2 == 0) accumulate_bits(random_hv(dim_, rng), scratch);
    // ceil((n + 1) / 2) ones out of the (possibly augmented) bundle.
    out.push_back(threshold_counts(scratch, static_cast<std::uint32_t>((n + 2) / 2)));
  }
  prototypes_ = std::move(out);
  return prototypes_;
}

const std::vector<Hypervector>& AssociativeMemory::prototypes() const {
  require(finalized(), ErrorCode::invalid_argument, "associative memory is not finalized");
  return prototypes_;
}

std::size_t argmax(std::span<const double> scores) {
  require(!scores.empty(), ErrorCode::invalid_argument, "argmax of an empty score list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

Prediction predict(std::span<const Hypervector> prototypes, const Hypervector& query) {
  require(!prototypes.empty(), ErrorCode::invalid_argument, "no prototypes to search");
  Prediction p;
  p.scores.reserve(prototypes.size());
  for (const auto& proto : prototypes) p.scores.push_back(static_cast<double>(dot(query, proto)));
  p.label = argmax(p.scores);
  return p;
}

Prediction predict(PcmCrossbar& prototypes, const Hypervector& query) {
  Prediction p;
  p.scores = prototypes.am_search(query);
  p.label = argmax(p.scores);
  return p;
}

}  // namespace hdst
