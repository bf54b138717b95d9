#include "vccgm/label_index.hpp"

#include <algorithm>
#include <cmath>

namespace vccgm {

double snap_unit(double y) { return std::nearbyint(y * 1e12) * 1e-12; }

LabelIndex build_index(std::span<const double> labels, double raw_min, double raw_max) {
  if (labels.empty()) throw EmptyDataset("build_index: no labels");
  if (!(raw_min < raw_max))
    throw OutOfRange("build_index: raw_min must be strictly below raw_max");
  LabelIndex index;
  index.raw_min_ = raw_min;
  index.raw_max_ = raw_max;

  std::vector<double> norm;
  norm.reserve(labels.size());
  for (double raw : labels) {
    if (!(raw >= raw_min && raw <= raw_max))
      throw OutOfRange("build_index: label " + std::to_string(raw) + " outside [" +
                       std::to_string(raw_min) + ", " + std::to_string(raw_max) + "]");
    norm.push_back(snap_unit((raw - raw_min) / (raw_max - raw_min)));
  }
  std::sort(norm.begin(), norm.end());

  for (double y : norm) {
    if (!index.distinct_.empty() && index.distinct_.back() == y) {
      ++index.counts_.back();
    } else {
      index.distinct_.push_back(y);
      index.counts_.push_back(1);
    }
  }
  index.prefix_.resize(index.counts_.size());
  std::int64_t running = 0;
  for (std::size_t i = 0; i < index.counts_.size(); ++i) {
    running += index.counts_[i];
    index.prefix_[i] = running;
  }
  index.total_ = running;
  return index;
}

std::int64_t LabelIndex::find(double y) const {
  auto it = std::lower_bound(distinct_.begin(), distinct_.end(), y);
  if (it != distinct_.end() && *it == y) return it - distinct_.begin();
  return -1;
}

std::int64_t LabelIndex::lower_neighbor(double y) const {
  auto it = std::lower_bound(distinct_.begin(), distinct_.end(), y);
  return static_cast<std::int64_t>(it - distinct_.begin()) - 1;
}

double LabelIndex::pick_sample_label(Rng& rng) const {
  std::int64_t k = static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(total_)));
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), k);
  return distinct_[static_cast<std::size_t>(it - prefix_.begin())];
}

double LabelIndex::max_gap() const {
  if (num_distinct() < 2) throw InsufficientLabels("max_gap: need at least 2 distinct labels");
  double best = 0.0;
  for (std::size_t i = 1; i < distinct_.size(); ++i)
    best = std::max(best, distinct_[i] - distinct_[i - 1]);
  return best;
}

double LabelIndex::expanded_std() const {
  if (total_ < 2) throw InsufficientLabels("expanded_std: need at least 2 samples");
  double mean = 0.0;
  for (std::size_t i = 0; i < distinct_.size(); ++i)
    mean += static_cast<double>(counts_[i]) * distinct_[i];
  mean /= static_cast<double>(total_);
  double ss = 0.0;
  for (std::size_t i = 0; i < distinct_.size(); ++i) {
    double d = distinct_[i] - mean;
    ss += static_cast<double>(counts_[i]) * d * d;
  }
  return std::sqrt(ss / static_cast<double>(total_ - 1));
}

NavHeuristic nav_heuristic(const LabelIndex& index) {
  const std::int64_t m = index.num_distinct();
  if (m < 2) throw InsufficientLabels("nav_heuristic: need at least 2 distinct labels");
  auto counts = index.counts();
  double sum = 0.0;
  for (std::int64_t i = 0; i + 1 < m; ++i)
    sum += static_cast<double>(counts[static_cast<std::size_t>(i)] +
                               counts[static_cast<std::size_t>(i + 1)]);
  NavHeuristic h;
  h.s_bar = sum / static_cast<double>(m - 1);
  h.suggested = std::llround(h.s_bar);
  return h;
}

GlobalHyperparams rule_of_thumb(const LabelIndex& index) {
  if (index.num_distinct() < 2)
    throw InsufficientLabels("rule_of_thumb: need at least 2 distinct labels");
  GlobalHyperparams hp;
  hp.kappa_base = index.max_gap();
  hp.sigma = index.expanded_std() *
             std::pow(static_cast<double>(index.total()), -0.2);
  return hp;
}

}  // namespace vccgm
