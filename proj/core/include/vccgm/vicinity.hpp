#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vccgm/label_index.hpp"

namespace vccgm {

// Result of the adaptive-vicinity construction for one conditional label.
struct VicinityParams {
  double kappa_left = 0.0;
  double kappa_right = 0.0;
  double kappa = 0.0;    // max(kappa_left, kappa_right)
  double nu = 0.0;       // weight decay rate, 1 / kappa^decay_exponent
  std::int64_t n_c = 0;  // accumulated effective sample count
};

// Normalized per-sample weights for one conditional label. `indices`
// address positions in the label sequence the weights were built from.
struct WeightVector {
  std::vector<std::int64_t> indices;
  std::vector<double> weights;  // positive, sum to 1

  std::size_t size() const { return indices.size(); }
};

constexpr double kDefaultWeightThreshold = 1e-3;

// Extends the vicinity around y_c label-by-label toward the nearer
// external distinct label (exact distance ties extend both directions)
// until the accumulated count reaches n_av, then sets
// kappa = max(kappa_left, kappa_right) and nu = 1 / kappa^decay_exponent.
// If y_c coincides with a distinct label, that label's count seeds n_c at
// radius zero and at least one extension is forced so kappa stays
// positive. decay_exponent is 2 per the main-text decay rate; 1 matches
// the alternative form (see README).
VicinityParams build_adaptive(const LabelIndex& index, double y_c, std::int64_t n_av,
                              int decay_exponent = 2);

// Exponential-decay weights w_i = exp(-nu (y_i - y_c)^2); raw weights
// below `threshold` are dropped and the survivors renormalized to sum 1.
// `labels_sorted` enables a binary-searched scan window; indices returned
// are positions in `sample_labels` either way.
WeightVector soft_weights(std::span<const double> sample_labels, double y_c, double nu,
                          double threshold = kDefaultWeightThreshold, bool labels_sorted = false);

// Soft weights truncated to zero outside [y_c - kappa, y_c + kappa]
// (closed interval), then thresholded and renormalized.
WeightVector hybrid_weights(std::span<const double> sample_labels, double y_c,
                            const VicinityParams& params,
                            double threshold = kDefaultWeightThreshold, bool labels_sorted = false);

// Uniform weights over samples with |y_i - y_c| <= kappa (closed interval).
WeightVector hard_weights(std::span<const double> sample_labels, double y_c, double kappa,
                          bool labels_sorted = false);

}  // namespace vccgm
