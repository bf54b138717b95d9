#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vccgm/errors.hpp"
#include "vccgm/rng.hpp"

namespace vccgm {

// Snap a normalized label to the 1e-12 grid used throughout the vicinity
// math, so duplicate merging and extension-distance ties compare exactly.
double snap_unit(double y);

// Sorted distinct-label structure over a training set; the substrate for
// all vicinity math. Labels are normalized to [0, 1] at construction and
// snapped to a 1e-12 grid so float equality (duplicate merging, extension
// ties) is deterministic. Immutable after construction; safe for
// concurrent read access.
class LabelIndex {
 public:
  std::span<const double> distinct() const { return distinct_; }
  std::span<const std::int64_t> counts() const { return counts_; }
  std::span<const std::int64_t> prefix_counts() const { return prefix_; }
  std::int64_t total() const { return total_; }
  std::int64_t num_distinct() const { return static_cast<std::int64_t>(distinct_.size()); }

  double raw_min() const { return raw_min_; }
  double raw_max() const { return raw_max_; }
  double normalize(double raw) const { return (raw - raw_min_) / (raw_max_ - raw_min_); }
  double denormalize(double y) const { return raw_min_ + y * (raw_max_ - raw_min_); }

  // Index of the distinct label equal to y, or -1.
  std::int64_t find(double y) const;
  // Index of the largest distinct label strictly below y, or -1.
  std::int64_t lower_neighbor(double y) const;

  // Normalized label of a sample drawn uniformly over samples (not over
  // distinct values).
  double pick_sample_label(Rng& rng) const;

  // Largest gap between adjacent distinct labels. Requires >= 2 labels.
  double max_gap() const;
  // Sample standard deviation of the expanded (repeated-by-count) labels.
  double expanded_std() const;

  friend LabelIndex build_index(std::span<const double> labels, double raw_min, double raw_max);

 private:
  std::vector<double> distinct_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> prefix_;
  std::int64_t total_ = 0;
  double raw_min_ = 0.0;
  double raw_max_ = 1.0;
};

struct GlobalHyperparams {
  double sigma = 0.0;       // label-noise std, normalized units
  double kappa_base = 0.0;  // fixed-vicinity radius
  std::int64_t n_av = 1;    // minimum effective sample count
};

struct NavHeuristic {
  double s_bar = 0.0;            // mean of adjacent-pair count sums
  std::int64_t suggested = 0;  // round(s_bar)
};

// Builds the index from raw labels. Labels are mapped to
// (y - raw_min) / (raw_max - raw_min) and duplicates merged into counts.
LabelIndex build_index(std::span<const double> labels, double raw_min, double raw_max);

// Adjacent-pair count heuristic: S_i = counts[i] + counts[i+1],
// S_bar = mean(S). The suggestion is round(S_bar); callers may adjust it
// and the trainer never applies it silently.
NavHeuristic nav_heuristic(const LabelIndex& index);

// Stand-in rule of thumb (the originating formula is not restated in our
// sources): sigma = sample std of normalized labels * total^(-1/5),
// kappa_base = maximum adjacent-label gap. Both are overridable in
// configs. n_av in the result is left at its default.
GlobalHyperparams rule_of_thumb(const LabelIndex& index);

}  // namespace vccgm
