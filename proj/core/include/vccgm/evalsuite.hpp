#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vccgm/dataset.hpp"
#include "vccgm/models.hpp"

namespace vccgm {

// Squared Frechet distance between two Gaussians:
// ||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1 S2)^{1/2}), with the matrix square
// root taken through an eigendecomposition of the symmetrized product.
// Covariances must be symmetric positive semidefinite.
double frechet_gaussian(const Tensor& mu1, const Tensor& cov1, const Tensor& mu2,
                        const Tensor& cov2);

// Column means and sample covariance (n - 1 denominator) of a row batch.
void batch_moments(const Tensor& x, Tensor& mu, Tensor& cov);

// Anything that can draw n conditional samples at label y. Model-backed,
// oracle (true conditional) and constant-output samplers all plug in here.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual Tensor sample(double y, std::int64_t n, Rng& rng) const = 0;
  virtual std::int64_t dim() const = 0;
};

class ModelSampler : public Sampler {
 public:
  ModelSampler(ParamStore params, GeneratorConfig cfg)
      : params_(std::move(params)), cfg_(std::move(cfg)) {}
  Tensor sample(double y, std::int64_t n, Rng& rng) const override;
  std::int64_t dim() const override { return cfg_.data_dim; }

 private:
  ParamStore params_;
  GeneratorConfig cfg_;
};

class OracleSampler : public Sampler {
 public:
  explicit OracleSampler(ToyFamily family) : family_(family) {}
  Tensor sample(double y, std::int64_t n, Rng& rng) const override;
  std::int64_t dim() const override { return family_.dim(); }

 private:
  ToyFamily family_;
};

class ConstantSampler : public Sampler {
 public:
  explicit ConstantSampler(Tensor point) : point_(std::move(point)) {}
  Tensor sample(double y, std::int64_t n, Rng& rng) const override;
  std::int64_t dim() const override { return point_.cols; }

 private:
  Tensor point_;
};

// Label predictor used by label_score: either the trained surrogate or an
// oracle function.
using LabelRegressor = std::function<Tensor(const Tensor& x)>;

LabelRegressor surrogate_regressor_fn(ParamStore params);

struct EvalConfig {
  std::vector<double> centers;          // normalized labels
  double window_radius = 0.0;           // 0 -> 2 / #centers
  std::int64_t n_fake_per_center = 200;
  std::uint64_t seed = 1;
  double label_scale = 1.0;             // raw units per normalized unit
};

std::vector<double> default_centers(std::int64_t count = 101);

// Per-center Frechet distance between windowed real moments and fake
// moments at the center, computed in raw data space. Centers whose window
// holds fewer than d + 1 reals are skipped and flagged (NaN entry).
struct SlidingFdResult {
  std::vector<double> fd;
  std::vector<std::int64_t> n_real_window;
  std::vector<std::uint8_t> skipped;
};
SlidingFdResult sliding_fd(const Sampler& sampler, const Dataset& ds,
                           std::span<const double> norm_labels, const EvalConfig& cfg);

// Mean |regressor(x_fake) - center| per center, reported in raw label
// units via cfg.label_scale.
std::vector<double> label_score(const Sampler& sampler, const LabelRegressor& regressor,
                                const EvalConfig& cfg);

// Mean pairwise Euclidean distance among the fakes at each center.
std::vector<double> diversity(const Sampler& sampler, const EvalConfig& cfg);

struct EvalReport {
  std::vector<double> centers;
  std::vector<double> fd;
  std::vector<double> label_score;
  std::vector<double> diversity;
  std::vector<std::int64_t> n_real_window;
  std::vector<std::uint8_t> skipped;
  double mean_fd = 0.0;           // over non-skipped centers
  double mean_label_score = 0.0;
  double mean_diversity = 0.0;
  std::int64_t n_skipped = 0;
  std::string checkpoint_id;
  std::int64_t n_fake_per_center = 0;
  double window_radius = 0.0;
};

// Runs all three metrics. norm_labels are the dataset labels mapped to
// [0, 1] (same normalization the centers use).
EvalReport evaluate(const Sampler& sampler, const Dataset& ds,
                    std::span<const double> norm_labels, const LabelRegressor& regressor,
                    const EvalConfig& cfg);

// CSV columns: center,fd,label_score,diversity,n_real_window
void write_report_csv(const std::filesystem::path& path, const EvalReport& report);
EvalReport load_report_csv(const std::filesystem::path& path);

// Diagnostic for the DRE branch against two known Gaussians: fraction of
// p_g-distributed test points whose estimated ratio is within a factor F
// of the analytic ratio, for F in {1.5, 2}.
struct GaussianSpec {
  Tensor mu;   // 1 x d
  Tensor cov;  // d x d
};

struct DreCoverage {
  double at_1_5 = 0.0;
  double at_2 = 0.0;
};

using DreFn = std::function<Tensor(const Tensor& x)>;  // n x d -> n x 1 positive

DreCoverage dre_diagnostic(const DreFn& dre, const GaussianSpec& p_real,
                           const GaussianSpec& p_gen, std::int64_t n_test, Rng& rng);

// Draws n samples from a Gaussian spec (Cholesky of cov).
Tensor sample_gaussian(const GaussianSpec& spec, std::int64_t n, Rng& rng);
// log density of x rows under the spec.
std::vector<double> gaussian_logpdf(const GaussianSpec& spec, const Tensor& x);

}  // namespace vccgm
