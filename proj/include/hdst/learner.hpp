#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdst/crossbar.hpp"
#include "hdst/hypervector.hpp"
#include "hdst/rng.hpp"

namespace hdst {

// Class prototypes bundled from training N-grams. Accumulation keeps
// per-class, per-dimension counters; finalize() thresholds them.
class AssociativeMemory {
 public:
  AssociativeMemory(std::size_t classes, std::size_t dim);

  void accumulate(std::size_t cls, const Hypervector& ngram);

  // Per-dimension majority per class. A class with an even N-gram count gets
  // one random vector from rng appended (classes visited in index order).
  // Throws empty_class when a class has no N-grams.
  const std::vector<Hypervector>& finalize(SeededRng& rng);

  [[nodiscard]] std::size_t class_count() const noexcept { return counts_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::uint64_t count(std::size_t cls) const { return counts_.at(cls); }
  [[nodiscard]] std::span<const std::uint32_t> counters(std::size_t cls) const;
  [[nodiscard]] bool finalized() const noexcept { return !prototypes_.empty(); }
  [[nodiscard]] const std::vector<Hypervector>& prototypes() const;

 private:
  std::size_t dim_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint32_t> counters_;  // classes x dim, row-major
  std::vector<Hypervector> prototypes_;
};

struct Prediction {
  std::size_t label = 0;
  std::vector<double> scores;
};

// Index of the maximum score; ties go to the lowest index.
std::size_t argmax(std::span<const double> scores);

// Software search: binary dot product against each prototype.
Prediction predict(std::span<const Hypervector> prototypes, const Hypervector& query);

// In-memory search over a programmed prototype array.
Prediction predict(PcmCrossbar& prototypes, const Hypervector& query);

}  // namespace hdst
