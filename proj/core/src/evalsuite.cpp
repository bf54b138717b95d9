#include "vccgm/evalsuite.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "vccgm/threads.hpp"

namespace vccgm {

namespace {

Eigen::MatrixXd to_eigen(const Tensor& t) {
  Eigen::MatrixXd m(t.rows, t.cols);
  for (std::int64_t i = 0; i < t.rows; ++i)
    for (std::int64_t j = 0; j < t.cols; ++j) m(i, j) = t.at(i, j);
  return m;
}

void require_symmetric_psd(const Eigen::MatrixXd& s, const char* which) {
  double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw InvalidCovariance(std::string("frechet_gaussian: ") + which + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()),
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    throw InvalidCovariance(std::string("frechet_gaussian: ") + which +
                            " is not positive semidefinite");
}

// PSD square root via eigendecomposition, negative roundoff clamped to 0.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

double frechet_gaussian(const Tensor& mu1, const Tensor& cov1, const Tensor& mu2,
                        const Tensor& cov2) {
  if (mu1.size() != mu2.size())
    throw ShapeError("frechet_gaussian: mean dimensions differ");
  const std::int64_t d = mu1.size();
  if (cov1.rows != d || cov1.cols != d || cov2.rows != d || cov2.cols != d)
    throw ShapeError("frechet_gaussian: covariance shape does not match mean dimension");

  Eigen::MatrixXd s1 = to_eigen(cov1);
  Eigen::MatrixXd s2 = to_eigen(cov2);
  require_symmetric_psd(s1, "cov1");
  require_symmetric_psd(s2, "cov2");

  double mean_term = 0.0;
  for (std::int64_t i = 0; i < d; ++i) {
    double diff = mu1.data[static_cast<std::size_t>(i)] - mu2.data[static_cast<std::size_t>(i)];
    mean_term += diff * diff;
  }

  // tr((S1 S2)^{1/2}) = tr((sqrt(S1) S2 sqrt(S1))^{1/2}), the symmetrized
  // product form.
  Eigen::MatrixXd r1 = psd_sqrt(s1);
  Eigen::MatrixXd inner = r1 * s2 * r1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (inner + inner.transpose()),
                                                    Eigen::EigenvaluesOnly);
  double tr_sqrt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  double fd = mean_term + s1.trace() + s2.trace() - 2.0 * tr_sqrt;
  return std::max(0.0, fd);  // roundoff floor
}

void batch_moments(const Tensor& x, Tensor& mu, Tensor& cov) {
  const std::int64_t n = x.rows, d = x.cols;
  if (n < 2) throw ShapeError("batch_moments: need at least 2 rows");
  mu = Tensor::zeros(1, d);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < d; ++j) mu.data[static_cast<std::size_t>(j)] += x.at(i, j);
  for (std::int64_t j = 0; j < d; ++j) mu.data[static_cast<std::size_t>(j)] /= static_cast<double>(n);

  cov = Tensor::zeros(d, d);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t a = 0; a < d; ++a) {
      double da = x.at(i, a) - mu.data[static_cast<std::size_t>(a)];
      for (std::int64_t b = a; b < d; ++b) {
        cov.at(a, b) += da * (x.at(i, b) - mu.data[static_cast<std::size_t>(b)]);
      }
    }
  }
  for (std::int64_t a = 0; a < d; ++a)
    for (std::int64_t b = a; b < d; ++b) {
      double v = cov.at(a, b) / static_cast<double>(n - 1);
      cov.at(a, b) = v;
      cov.at(b, a) = v;
    }
}

Tensor ModelSampler::sample(double y, std::int64_t n, Rng& rng) const {
  Tensor z = Tensor::randn(n, cfg_.noise_dim, rng);
  std::vector<double> ys(static_cast<std::size_t>(n), y);
  return generator_sample(params_, cfg_, z, ys);
}

Tensor OracleSampler::sample(double y, std::int64_t n, Rng& rng) const {
  const std::int64_t d = family_.dim();
  Tensor out(n, d);
  std::vector<double> mu(static_cast<std::size_t>(d));
  family_.mean(y, mu);
  double s = family_.stddev(y);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < d; ++j)
      out.at(i, j) = mu[static_cast<std::size_t>(j)] + s * rng.normal();
  return out;
}

Tensor ConstantSampler::sample(double /*y*/, std::int64_t n, Rng& /*rng*/) const {
  Tensor out(n, point_.cols);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < point_.cols; ++j) out.at(i, j) = point_.data[static_cast<std::size_t>(j)];
  return out;
}

LabelRegressor surrogate_regressor_fn(ParamStore params) {
  auto shared = std::make_shared<ParamStore>(std::move(params));
  return [shared](const Tensor& x) { return surrogate_predict(*shared, x); };
}

std::vector<double> default_centers(std::int64_t count) {
  std::vector<double> c(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i)
    c[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(count - 1);
  return c;
}

SlidingFdResult sliding_fd(const Sampler& sampler, const Dataset& ds,
                           std::span<const double> norm_labels, const EvalConfig& cfg) {
  if (norm_labels.size() != static_cast<std::size_t>(ds.n()))
    throw ShapeError("sliding_fd: normalized labels do not match dataset");
  const std::int64_t d = ds.d;
  if (sampler.dim() != d) throw ShapeError("sliding_fd: sampler dimension mismatch");
  double radius = cfg.window_radius > 0.0
                      ? cfg.window_radius
                      : 2.0 / static_cast<double>(cfg.centers.size());

  SlidingFdResult res;
  const auto n_centers = static_cast<std::int64_t>(cfg.centers.size());
  res.fd.assign(cfg.centers.size(), std::numeric_limits<double>::quiet_NaN());
  res.n_real_window.assign(cfg.centers.size(), 0);
  res.skipped.assign(cfg.centers.size(), 0);

  parallel_for(n_centers, [&](std::int64_t ci) {
    double center = cfg.centers[static_cast<std::size_t>(ci)];
    std::vector<std::int64_t> window;
    for (std::int64_t i = 0; i < ds.n(); ++i)
      if (std::fabs(norm_labels[static_cast<std::size_t>(i)] - center) <= radius)
        window.push_back(i);
    res.n_real_window[static_cast<std::size_t>(ci)] = static_cast<std::int64_t>(window.size());
    if (static_cast<std::int64_t>(window.size()) < d + 1) {
      res.skipped[static_cast<std::size_t>(ci)] = 1;
      return;
    }
    Tensor real_x = ds.rows(window);
    Tensor mu_r, cov_r;
    batch_moments(real_x, mu_r, cov_r);

    Rng rng = Rng(cfg.seed).child(0x5fdULL * 1000003ULL + static_cast<std::uint64_t>(ci));
    Tensor fake = sampler.sample(center, cfg.n_fake_per_center, rng);
    Tensor mu_f, cov_f;
    batch_moments(fake, mu_f, cov_f);
    res.fd[static_cast<std::size_t>(ci)] = frechet_gaussian(mu_r, cov_r, mu_f, cov_f);
  });
  return res;
}

std::vector<double> label_score(const Sampler& sampler, const LabelRegressor& regressor,
                                const EvalConfig& cfg) {
  std::vector<double> scores(cfg.centers.size(), 0.0);
  parallel_for(static_cast<std::int64_t>(cfg.centers.size()), [&](std::int64_t ci) {
    double center = cfg.centers[static_cast<std::size_t>(ci)];
    Rng rng = Rng(cfg.seed).child(0x15cULL * 1000003ULL + static_cast<std::uint64_t>(ci));
    Tensor fake = sampler.sample(center, cfg.n_fake_per_center, rng);
    Tensor pred = regressor(fake);
    double mae = 0.0;
    for (std::int64_t i = 0; i < pred.rows; ++i)
      mae += std::fabs(pred.data[static_cast<std::size_t>(i)] - center);
    scores[static_cast<std::size_t>(ci)] =
        cfg.label_scale * mae / static_cast<double>(pred.rows);
  });
  return scores;
}

std::vector<double> diversity(const Sampler& sampler, const EvalConfig& cfg) {
  if (cfg.n_fake_per_center < 2) throw InvalidSpec("diversity: need at least 2 fakes per center");
  std::vector<double> out(cfg.centers.size(), 0.0);
  parallel_for(static_cast<std::int64_t>(cfg.centers.size()), [&](std::int64_t ci) {
    double center = cfg.centers[static_cast<std::size_t>(ci)];
    Rng rng = Rng(cfg.seed).child(0xd17ULL * 1000003ULL + static_cast<std::uint64_t>(ci));
    Tensor fake = sampler.sample(center, cfg.n_fake_per_center, rng);
    const std::int64_t n = fake.rows, d = fake.cols;
    double total = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = i + 1; j < n; ++j) {
        double ss = 0.0;
        for (std::int64_t k = 0; k < d; ++k) {
          double diff = fake.at(i, k) - fake.at(j, k);
          ss += diff * diff;
        }
        total += std::sqrt(ss);
      }
    }
    out[static_cast<std::size_t>(ci)] =
        total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
  });
  return out;
}

EvalReport evaluate(const Sampler& sampler, const Dataset& ds,
                    std::span<const double> norm_labels, const LabelRegressor& regressor,
                    const EvalConfig& cfg) {
  EvalReport report;
  report.centers = cfg.centers;
  report.n_fake_per_center = cfg.n_fake_per_center;
  report.window_radius = cfg.window_radius > 0.0
                             ? cfg.window_radius
                             : 2.0 / static_cast<double>(cfg.centers.size());

  SlidingFdResult fd = sliding_fd(sampler, ds, norm_labels, cfg);
  report.fd = std::move(fd.fd);
  report.n_real_window = std::move(fd.n_real_window);
  report.skipped = std::move(fd.skipped);
  report.label_score = label_score(sampler, regressor, cfg);
  report.diversity = diversity(sampler, cfg);

  std::vector<double> kept_fd;
  for (std::size_t i = 0; i < report.fd.size(); ++i) {
    if (report.skipped[i]) {
      ++report.n_skipped;
    } else {
      kept_fd.push_back(report.fd[i]);
    }
  }
  report.mean_fd = mean_of(kept_fd);
  report.mean_label_score = mean_of(report.label_score);
  report.mean_diversity = mean_of(report.diversity);
  return report;
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  os << "center,fd,label_score,diversity,n_real_window\n";
  char buf[160];
  for (std::size_t i = 0; i < report.centers.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%lld\n", report.centers[i],
                  report.fd[i], report.label_score[i], report.diversity[i],
                  static_cast<long long>(report.n_real_window[i]));
    os << buf;
  }
  if (!os) throw DataError("write failed for '" + path.string() + "'");
}

EvalReport load_report_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(is, line) || line.rfind("center,", 0) != 0)
    throw DataError("'" + path.string() + "' is not an eval report");
  EvalReport report;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double vals[4];
    for (int k = 0; k < 4; ++k) {
      if (!std::getline(ss, cell, ',')) throw DataError("malformed report row: '" + line + "'");
      vals[k] = std::stod(cell);
    }
    if (!std::getline(ss, cell, ',')) throw DataError("malformed report row: '" + line + "'");
    report.centers.push_back(vals[0]);
    report.fd.push_back(vals[1]);
    report.label_score.push_back(vals[2]);
    report.diversity.push_back(vals[3]);
    report.n_real_window.push_back(std::stoll(cell));
    report.skipped.push_back(std::isnan(vals[1]) ? 1 : 0);
  }
  std::vector<double> kept;
  for (std::size_t i = 0; i < report.fd.size(); ++i) {
    if (report.skipped[i])
      ++report.n_skipped;
    else
      kept.push_back(report.fd[i]);
  }
  report.mean_fd = mean_of(kept);
  report.mean_label_score = mean_of(report.label_score);
  report.mean_diversity = mean_of(report.diversity);
  return report;
}

Tensor sample_gaussian(const GaussianSpec& spec, std::int64_t n, Rng& rng) {
  const std::int64_t d = spec.mu.size();
  Eigen::MatrixXd cov = to_eigen(spec.cov);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw InvalidCovariance("sample_gaussian: covariance not positive definite");
  Eigen::MatrixXd chol = llt.matrixL();
  Tensor out(n, d);
  Eigen::VectorXd z(d);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < d; ++j) z(j) = rng.normal();
    Eigen::VectorXd x = chol * z;
    for (std::int64_t j = 0; j < d; ++j)
      out.at(i, j) = spec.mu.data[static_cast<std::size_t>(j)] + x(j);
  }
  return out;
}

std::vector<double> gaussian_logpdf(const GaussianSpec& spec, const Tensor& x) {
  const std::int64_t d = spec.mu.size();
  if (x.cols != d) throw ShapeError("gaussian_logpdf: dimension mismatch");
  Eigen::MatrixXd cov = to_eigen(spec.cov);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw InvalidCovariance("gaussian_logpdf: covariance not positive definite");
  Eigen::MatrixXd l = llt.matrixL();
  double log_det = 0.0;
  for (std::int64_t i = 0; i < d; ++i) log_det += 2.0 * std::log(l(i, i));
  double norm = -0.5 * (static_cast<double>(d) * std::log(2.0 * M_PI) + log_det);

  std::vector<double> out(static_cast<std::size_t>(x.rows));
  Eigen::VectorXd diff(d);
  for (std::int64_t i = 0; i < x.rows; ++i) {
    for (std::int64_t j = 0; j < d; ++j)
      diff(j) = x.at(i, j) - spec.mu.data[static_cast<std::size_t>(j)];
    Eigen::VectorXd sol = llt.solve(diff);
    out[static_cast<std::size_t>(i)] = norm - 0.5 * diff.dot(sol);
  }
  return out;
}

DreCoverage dre_diagnostic(const DreFn& dre, const GaussianSpec& p_real,
                           const GaussianSpec& p_gen, std::int64_t n_test, Rng& rng) {
  Tensor x = sample_gaussian(p_gen, n_test, rng);
  std::vector<double> log_r = gaussian_logpdf(p_real, x);
  std::vector<double> log_g = gaussian_logpdf(p_gen, x);
  Tensor est = dre(x);
  if (est.rows != n_test) throw ShapeError("dre_diagnostic: estimator output size mismatch");

  DreCoverage cov;
  std::int64_t hit_15 = 0, hit_2 = 0;
  for (std::int64_t i = 0; i < n_test; ++i) {
    double truth = std::exp(log_r[static_cast<std::size_t>(i)] - log_g[static_cast<std::size_t>(i)]);
    double got = est.data[static_cast<std::size_t>(i)];
    if (!(got > 0.0)) continue;  // counts as a miss
    double factor = got > truth ? got / truth : truth / got;
    if (factor <= 1.5) ++hit_15;
    if (factor <= 2.0) ++hit_2;
  }
  cov.at_1_5 = static_cast<double>(hit_15) / static_cast<double>(n_test);
  cov.at_2 = static_cast<double>(hit_2) / static_cast<double>(n_test);
  return cov;
}

}  // namespace vccgm
