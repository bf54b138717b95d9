#include "vccgm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace vccgm {

namespace {

std::int64_t expected_modes(ImbalanceSpec::Pattern p) {
  switch (p) {
    case ImbalanceSpec::Pattern::unimodal: return 1;
    case ImbalanceSpec::Pattern::bimodal: return 2;
    case ImbalanceSpec::Pattern::trimodal: return 3;
  }
  return 1;
}

std::int64_t find_exact(std::span<const double> labels, double value) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == value) return static_cast<std::int64_t>(i);
  return -1;
}

double kernel_mean(double distance, const ImbalanceSpec& spec) {
  return static_cast<double>(spec.peak_count) * std::exp(-spec.decay_rate * distance);
}

// mean -> noisy count: min(peak, max(0, int(mean + draw)))
std::vector<std::int64_t> perturb(const std::vector<double>& means,
                                  const std::vector<bool>& is_mode, const ImbalanceSpec& spec,
                                  std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::int64_t> counts(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (is_mode[i]) {
      counts[i] = spec.peak_count;
      continue;
    }
    auto mean = static_cast<std::int64_t>(std::max(1.0, std::trunc(means[i])));
    double noisy = static_cast<double>(mean);
    if (spec.noise_std > 0.0) noisy += rng.normal() * spec.noise_std;
    auto c = static_cast<std::int64_t>(std::trunc(noisy));
    counts[i] = std::min(spec.peak_count, std::max<std::int64_t>(0, c));
  }
  return counts;
}

}  // namespace

ImbalanceSpec::Pattern ImbalanceSpec::parse_pattern(const std::string& name) {
  if (name == "unimodal") return Pattern::unimodal;
  if (name == "bimodal") return Pattern::bimodal;
  if (name == "trimodal") return Pattern::trimodal;
  throw InvalidMode("unknown imbalance pattern '" + name + "'");
}

std::string ImbalanceSpec::pattern_name(Pattern p) {
  switch (p) {
    case Pattern::unimodal: return "unimodal";
    case Pattern::bimodal: return "bimodal";
    case Pattern::trimodal: return "trimodal";
  }
  return "unimodal";
}

void ImbalanceSpec::validate() const {
  if (peak_count < 1) throw InvalidSpec("imbalance spec: peak_count must be >= 1");
  if (!(decay_rate > 0.0)) throw InvalidSpec("imbalance spec: decay_rate must be positive");
  if (noise_std < 0.0) throw InvalidSpec("imbalance spec: noise_std must be >= 0");
  if (static_cast<std::int64_t>(modes.size()) != expected_modes(pattern))
    throw InvalidMode("imbalance spec: pattern expects " +
                      std::to_string(expected_modes(pattern)) + " mode(s), got " +
                      std::to_string(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = i + 1; j < modes.size(); ++j)
      if (modes[i] == modes[j]) throw InvalidMode("imbalance spec: duplicate modes");
}

std::vector<std::int64_t> unimodal_counts(std::span<const double> distinct_labels, double mode,
                                          const ImbalanceSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (find_exact(distinct_labels, mode) < 0)
    throw InvalidMode("unimodal_counts: mode is not a distinct label");

  std::vector<double> means(distinct_labels.size());
  std::vector<bool> is_mode(distinct_labels.size(), false);
  for (std::size_t i = 0; i < distinct_labels.size(); ++i) {
    if (distinct_labels[i] == mode) {
      is_mode[i] = true;
    } else {
      means[i] = kernel_mean(std::fabs(distinct_labels[i] - mode), spec);
    }
  }
  return perturb(means, is_mode, spec, seed);
}

std::vector<std::int64_t> multimodal_counts(std::span<const double> distinct_labels,
                                            std::span<const double> modes,
                                            const ImbalanceSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (modes.size() < 2 || modes.size() > 3)
    throw InvalidMode("multimodal_counts: expected 2 or 3 modes");
  for (double m : modes)
    if (find_exact(distinct_labels, m) < 0)
      throw InvalidMode("multimodal_counts: mode is not a distinct label");
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = i + 1; j < modes.size(); ++j)
      if (modes[i] == modes[j]) throw InvalidMode("multimodal_counts: duplicate modes");

  std::vector<double> means(distinct_labels.size());
  std::vector<bool> is_mode(distinct_labels.size(), false);
  for (std::size_t i = 0; i < distinct_labels.size(); ++i) {
    double combined = 0.0;
    for (double m : modes) {
      if (distinct_labels[i] == m) is_mode[i] = true;
      double k = kernel_mean(std::fabs(distinct_labels[i] - m), spec);
      combined = spec.sum_kernels ? combined + k : std::max(combined, k);
    }
    if (spec.sum_kernels) combined = std::min(combined, static_cast<double>(spec.peak_count));
    means[i] = combined;
  }
  return perturb(means, is_mode, spec, seed);
}

ToyDataset subsample(const ToyDataset& full, std::span<const std::int64_t> counts,
                     std::uint64_t seed) {
  // Group sample rows by distinct label, sorted.
  std::map<double, std::vector<std::int64_t>> by_label;
  for (std::int64_t i = 0; i < full.data.n(); ++i)
    by_label[full.data.labels[static_cast<std::size_t>(i)]].push_back(i);
  if (counts.size() != by_label.size())
    throw InvalidSpec("subsample: counts size " + std::to_string(counts.size()) +
                      " does not match " + std::to_string(by_label.size()) + " distinct labels");

  Rng rng(seed);
  ToyDataset out;
  out.family = full.family;
  out.data.d = full.data.d;
  std::size_t li = 0;
  for (auto& [label, rows] : by_label) {
    std::int64_t want = counts[li++];
    auto avail = static_cast<std::int64_t>(rows.size());
    if (want > avail)
      throw InsufficientSamples("subsample: requested " + std::to_string(want) +
                                " samples at label " + std::to_string(label) + ", only " +
                                std::to_string(avail) + " available");
    // Partial Fisher-Yates: the first `want` slots become the selection.
    for (std::int64_t k = 0; k < want; ++k) {
      auto j = k + static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(avail - k)));
      std::swap(rows[static_cast<std::size_t>(k)], rows[static_cast<std::size_t>(j)]);
    }
    std::sort(rows.begin(), rows.begin() + want);
    for (std::int64_t k = 0; k < want; ++k) {
      std::int64_t src = rows[static_cast<std::size_t>(k)];
      out.data.labels.push_back(label);
      auto r = full.data.row(src);
      out.data.x.insert(out.data.x.end(), r.begin(), r.end());
    }
  }
  return out;
}

}  // namespace vccgm
