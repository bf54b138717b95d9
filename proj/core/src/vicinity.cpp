#include "vccgm/vicinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vccgm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void normalize_weights(WeightVector& w) {
  double total = 0.0;
  for (double v : w.weights) total += v;
  for (double& v : w.weights) v /= total;
}

// [lo, hi) index range of sample_labels intersecting [y_c - r, y_c + r].
std::pair<std::int64_t, std::int64_t> scan_range(std::span<const double> labels, double y_c,
                                                 double r, bool sorted) {
  if (!sorted) return {0, static_cast<std::int64_t>(labels.size())};
  auto lo = std::lower_bound(labels.begin(), labels.end(), y_c - r);
  auto hi = std::upper_bound(labels.begin(), labels.end(), y_c + r);
  return {lo - labels.begin(), hi - labels.begin()};
}

}  // namespace

VicinityParams build_adaptive(const LabelIndex& index, double y_c, std::int64_t n_av,
                              int decay_exponent) {
  if (n_av < 1) throw InsufficientSamples("build_adaptive: n_av must be >= 1");
  if (n_av > index.total())
    throw InsufficientSamples("build_adaptive: n_av " + std::to_string(n_av) +
                              " exceeds dataset size " + std::to_string(index.total()));
  if (!(y_c >= 0.0 && y_c <= 1.0))
    throw OutOfRange("build_adaptive: y_c must lie in [0, 1]");
  if (decay_exponent != 1 && decay_exponent != 2)
    throw InvalidSpec("build_adaptive: decay_exponent must be 1 or 2");
  if (index.num_distinct() < 2)
    throw InsufficientLabels("build_adaptive: need at least 2 distinct labels");

  auto labels = index.distinct();
  auto counts = index.counts();
  const std::int64_t m = index.num_distinct();

  VicinityParams p;
  std::int64_t t_left, t_right;
  bool force_extension = false;

  std::int64_t at = index.find(y_c);
  if (at >= 0) {
    // y_c sits on a distinct label: its count seeds n_c at radius zero and
    // one extension is forced so kappa > 0 keeps nu finite.
    p.n_c = counts[static_cast<std::size_t>(at)];
    t_left = at - 1;
    t_right = at + 1;
    force_extension = true;
  } else {
    t_left = index.lower_neighbor(y_c);
    t_right = t_left + 1;
  }

  while (p.n_c < n_av || force_extension) {
    double d_left = t_left >= 0 ? y_c - labels[static_cast<std::size_t>(t_left)] : kInf;
    double d_right = t_right < m ? labels[static_cast<std::size_t>(t_right)] - y_c : kInf;
    if (d_left == kInf && d_right == kInf) {
      // Unreachable when n_av <= total and m >= 2; guards the forced
      // extension against a fully consumed index.
      throw InsufficientLabels("build_adaptive: index exhausted during extension");
    }
    if (d_left < d_right) {
      p.kappa_left = d_left;
      p.n_c += counts[static_cast<std::size_t>(t_left)];
      --t_left;
    } else if (d_left > d_right) {
      p.kappa_right = d_right;
      p.n_c += counts[static_cast<std::size_t>(t_right)];
      ++t_right;
    } else {
      p.kappa_left = d_left;
      p.kappa_right = d_right;
      p.n_c += counts[static_cast<std::size_t>(t_left)] + counts[static_cast<std::size_t>(t_right)];
      --t_left;
      ++t_right;
    }
    force_extension = false;
  }

  p.kappa = std::max(p.kappa_left, p.kappa_right);
  p.nu = decay_exponent == 2 ? 1.0 / (p.kappa * p.kappa) : 1.0 / p.kappa;
  return p;
}

WeightVector soft_weights(std::span<const double> sample_labels, double y_c, double nu,
                          double threshold, bool labels_sorted) {
  if (!(nu > 0.0)) throw InvalidSpec("soft_weights: nu must be positive");
  if (!(threshold >= 0.0 && threshold < 1.0))
    throw InvalidSpec("soft_weights: threshold must lie in [0, 1)");

  WeightVector w;
  // exp(-nu d^2) >= threshold  <=>  d <= sqrt(ln(1/threshold) / nu)
  double reach = threshold > 0.0 ? std::sqrt(std::log(1.0 / threshold) / nu) : kInf;
  auto [lo, hi] = scan_range(sample_labels, y_c, reach, labels_sorted && threshold > 0.0);
  for (std::int64_t i = lo; i < hi; ++i) {
    double d = sample_labels[static_cast<std::size_t>(i)] - y_c;
    double raw = std::exp(-nu * d * d);
    if (raw >= threshold && raw > 0.0) {
      w.indices.push_back(i);
      w.weights.push_back(raw);
    }
  }
  if (w.indices.empty()) throw EmptyVicinity("soft_weights: no weight above threshold");
  normalize_weights(w);
  return w;
}

WeightVector hybrid_weights(std::span<const double> sample_labels, double y_c,
                            const VicinityParams& params, double threshold, bool labels_sorted) {
  if (!(params.nu > 0.0) || !(params.kappa > 0.0))
    throw InvalidSpec("hybrid_weights: vicinity params not built");
  if (!(threshold >= 0.0 && threshold < 1.0))
    throw InvalidSpec("hybrid_weights: threshold must lie in [0, 1)");

  WeightVector w;
  auto [lo, hi] = scan_range(sample_labels, y_c, params.kappa, labels_sorted);
  for (std::int64_t i = lo; i < hi; ++i) {
    double d = sample_labels[static_cast<std::size_t>(i)] - y_c;
    if (std::fabs(d) > params.kappa) continue;  // zero weight outside the interval
    double raw = std::exp(-params.nu * d * d);
    if (raw >= threshold && raw > 0.0) {
      w.indices.push_back(i);
      w.weights.push_back(raw);
    }
  }
  if (w.indices.empty()) throw EmptyVicinity("hybrid_weights: no sample inside the interval");
  normalize_weights(w);
  return w;
}

WeightVector hard_weights(std::span<const double> sample_labels, double y_c, double kappa,
                          bool labels_sorted) {
  if (!(kappa > 0.0)) throw InvalidSpec("hard_weights: kappa must be positive");
  WeightVector w;
  auto [lo, hi] = scan_range(sample_labels, y_c, kappa, labels_sorted);
  for (std::int64_t i = lo; i < hi; ++i) {
    if (std::fabs(sample_labels[static_cast<std::size_t>(i)] - y_c) <= kappa)
      w.indices.push_back(i);
  }
  if (w.indices.empty()) throw EmptyVicinity("hard_weights: empty interval");
  w.weights.assign(w.indices.size(), 1.0 / static_cast<double>(w.indices.size()));
  return w;
}

}  // namespace vccgm
