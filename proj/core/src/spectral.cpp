#include "vvkrr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "vvkrr/errors.hpp"

namespace vvkrr {

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("ols_slope: need >= 2 paired values");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("ols_slope: abscissae are all equal");
  return sxy / sxx;
}

double gamma_norm(const SpectralModel& model, const Eigen::Ref<const Eigen::VectorXd>& c, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
  if (static_cast<std::size_t>(c.size()) != model.size()) {
    throw DimensionError("coefficient length does not match the spectral model size");
  }
  const auto& mu = model.eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) s += c[i] * c[i] * std::pow(mu[i], -gamma);
  return std::sqrt(s);
}

double gamma_norm(const SpectralModel& model, const CoefficientMatrix& c, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
  if (c.size() != model.size()) throw DimensionError("coefficient rows do not match the spectral model size");
  const auto& mu = model.eigenvalues();
  const Eigen::VectorXd row_sq = c.values().rowwise().squaredNorm();
  double s = 0.0;
  for (Eigen::Index i = 0; i < row_sq.size(); ++i) s += row_sq[i] * std::pow(mu[i], -gamma);
  return std::sqrt(s);
}

double effective_dimension(const SpectralModel& model, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("effective_dimension: lambda must be positive");
  const auto& mu = model.eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) s += mu[i] / (mu[i] + lambda);
  return s;
}

EffectiveDimensionCertificate certify_effective_dimension_bound(const SpectralModel& model,
                                                                const std::vector<double>& lambda_grid) {
  const auto p = model.decay_p();
  if (!p) throw std::invalid_argument("certify_effective_dimension_bound: model has no decay exponent");
  if (lambda_grid.size() < 2) throw std::invalid_argument("certify_effective_dimension_bound: need >= 2 grid points");
  EffectiveDimensionCertificate cert;
  std::vector<double> log_lambda, log_scaled;
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda grid must lie in (0, 1]");
    const double v = effective_dimension(model, lambda) * std::pow(lambda, *p);
    cert.scaled.push_back(v);
    cert.d_hat = std::max(cert.d_hat, v);
    log_lambda.push_back(std::log(lambda));
    log_scaled.push_back(std::log(v));
  }
  cert.trend_slope = ols_slope(log_lambda, log_scaled);

  const auto& mu = model.eigenvalues();
  if (mu.size() >= 2) {
    std::vector<double> log_i, log_r;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      const double idx = static_cast<double>(i + 1);
      log_i.push_back(std::log(idx));
      log_r.push_back(std::log(mu[i]) + std::log(idx) / *p);
    }
    cert.decay_slope = ols_slope(log_i, log_r);
  }
  cert.pass = std::isfinite(cert.d_hat) && cert.trend_slope >= -0.05 && cert.decay_slope <= 0.05;
  return cert;
}

double embedding_constant(const SpectralModel& model, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("embedding_constant: alpha must lie in (0, 1]");
  const auto& mu = model.eigenvalues();
  Eigen::VectorXd weights(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) weights[i] = std::pow(mu[i], alpha);
  const double envelope = 2.0 * weights.sum();

  constexpr int kGrid = 10000;
  double grid_max = 0.0;
  for (int g = 0; g < kGrid; ++g) {
    const double x = static_cast<double>(g) / (kGrid - 1);
    double s = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      const double e = SpectralModel::basis(static_cast<std::size_t>(i), x);
      s += weights[i] * e * e;
    }
    grid_max = std::max(grid_max, s);
  }
  return std::sqrt(std::min(grid_max, envelope));
}

Eigen::VectorXd nystrom_spectrum(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& sample) {
  const Eigen::Index m = sample.size();
  if (m < 2) throw std::invalid_argument("nystrom_spectrum: need at least 2 sample points");
  const Eigen::MatrixXd k = gram_matrix(spec, sample) / static_cast<double>(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("nystrom_spectrum: eigendecomposition did not converge");
  Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  return values;
}

double estimate_decay(const Eigen::Ref<const Eigen::VectorXd>& mu_hat, std::size_t first, std::size_t last) {
  if (first < 1 || last < first || last > static_cast<std::size_t>(mu_hat.size())) {
    throw std::invalid_argument("estimate_decay: fit range out of bounds");
  }
  std::vector<double> log_i, log_mu;
  for (std::size_t i = first; i <= last; ++i) {
    const double v = mu_hat[static_cast<Eigen::Index>(i - 1)];
    if (v > 0.0) {
      log_i.push_back(std::log(static_cast<double>(i)));
      log_mu.push_back(std::log(v));
    }
  }
  if (log_i.size() < 5) throw std::invalid_argument("estimate_decay: fewer than 5 positive eigenvalues in range");
  const double slope = ols_slope(log_i, log_mu);
  if (!(slope < 0.0)) throw std::invalid_argument("estimate_decay: eigenvalues do not decay over the fit range");
  return -1.0 / slope;
}

double estimate_decay(const Eigen::Ref<const Eigen::VectorXd>& mu_hat) {
  const auto m = static_cast<std::size_t>(mu_hat.size());
  const std::size_t last = std::min<std::size_t>(50, m / 4);
  if (last < 5) throw std::invalid_argument("estimate_decay: sample too small for the default fit range");
  return estimate_decay(mu_hat, 5, last);
}

}  // namespace vvkrr
