#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vccgm/errors.hpp"
#include "vccgm/rng.hpp"
#include "vccgm/tensor.hpp"

namespace vccgm {

// Flat labeled dataset: n samples of (y, x) with x of dimension d. Labels
// are stored in whatever units the producer used; normalization happens
// when an index is built over them.
struct Dataset {
  std::int64_t d = 0;
  std::vector<double> labels;  // n
  std::vector<double> x;       // n x d, row-major

  std::int64_t n() const { return static_cast<std::int64_t>(labels.size()); }
  std::span<const double> row(std::int64_t i) const {
    return {x.data() + i * d, static_cast<std::size_t>(d)};
  }
  Tensor rows(std::span<const std::int64_t> which) const;
};

// Conditional-Gaussian family with closed-form moments:
//   x | y ~ N(m(y), s(y)^2 I),  s(y) = base_std + std_slope * y.
struct ToyFamily {
  enum class Kind { circle2, line1, helix3 };

  Kind kind = Kind::circle2;
  double base_std = 0.05;
  double std_slope = 0.05;

  std::int64_t dim() const;
  void mean(double y, std::span<double> out) const;
  double stddev(double y) const { return base_std + std_slope * y; }
  // Throws InvalidSpec when the covariance degenerates on [0, 1].
  void validate() const;

  std::string name() const;
  static ToyFamily parse(const std::string& name, double base_std, double std_slope);
};

struct ToyDataset {
  Dataset data;
  ToyFamily family;
};

// Labels on a uniform grid over [0, 1] (endpoints included), per_label
// draws from the family's conditional at each grid point.
ToyDataset make_toy_dataset(std::int64_t n_labels, std::int64_t per_label,
                            const ToyFamily& family, std::uint64_t seed);

// Binary dataset format: little-endian header (magic "VCDS", u32 version,
// u32 d, u64 n) followed by n records of (y: f64, x: d x f64).
void save_dataset_binary(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset_binary(const std::filesystem::path& path);

// CSV mirror of the binary format, header "label,x0,x1,...".
void save_dataset_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset_csv(const std::filesystem::path& path);

// Dispatches on the binary magic, falling back to CSV.
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace vccgm
