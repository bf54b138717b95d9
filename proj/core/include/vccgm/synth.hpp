#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vccgm/dataset.hpp"

namespace vccgm {

// Imbalanced label-count profile: per-label mean count decays
// exponentially with distance from the mode(s), then a clamped Gaussian
// perturbation is applied. Distances are measured in the same (raw) units
// as the labels handed to the count functions, matching decay rates
// quoted against raw-unit distances.
struct ImbalanceSpec {
  enum class Pattern { unimodal, bimodal, trimodal };

  Pattern pattern = Pattern::unimodal;
  std::vector<double> modes;
  double decay_rate = 0.1;      // per raw label unit
  std::int64_t peak_count = 49;
  double noise_std = 5.0;       // 0 disables perturbation
  bool sum_kernels = false;     // multimodal: sum instead of max of kernels

  void validate() const;

  static Pattern parse_pattern(const std::string& name);
  static std::string pattern_name(Pattern p);
};

// Count profile for a single mode. The mode label keeps peak_count
// unperturbed; every other label gets
//   mean = max(1, int(peak * exp(-decay * d))),
//   count = min(peak, max(0, int(mean + noise))),
// with one seeded Gaussian draw per label. Labels ending at 0 are dropped
// downstream by subsample().
std::vector<std::int64_t> unimodal_counts(std::span<const double> distinct_labels, double mode,
                                          const ImbalanceSpec& spec, std::uint64_t seed);

// Multi-mode profile: per-label mean is the max (or, behind the flag, the
// peak-clamped sum) of the single-mode kernels, then the same
// noise/clamp/drop pipeline.
std::vector<std::int64_t> multimodal_counts(std::span<const double> distinct_labels,
                                            std::span<const double> modes,
                                            const ImbalanceSpec& spec, std::uint64_t seed);

// Keeps counts[i] uniformly chosen samples (without replacement) at the
// i-th distinct label of `full`; counts must align with the sorted
// distinct labels of the dataset.
ToyDataset subsample(const ToyDataset& full, std::span<const std::int64_t> counts,
                     std::uint64_t seed);

}  // namespace vccgm
