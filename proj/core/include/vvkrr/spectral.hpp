#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "vvkrr/kernel.hpp"
#include "vvkrr/spectral_model.hpp"

namespace vvkrr {

// sqrt(sum_ij c_ij^2 mu_i^-gamma). gamma = 0 is the L2(pi; R^dY) norm.
double gamma_norm(const SpectralModel& model, const CoefficientMatrix& c, double gamma);
// Scalar-valued variant for a single coefficient column.
double gamma_norm(const SpectralModel& model, const Eigen::Ref<const Eigen::VectorXd>& c, double gamma);

// N(lambda) = sum_i mu_i / (mu_i + lambda).
double effective_dimension(const SpectralModel& model, double lambda);

struct EffectiveDimensionCertificate {
  double d_hat = 0.0;        // max over the grid of N(lambda) lambda^p
  double trend_slope = 0.0;  // OLS slope of log(N lambda^p) against log lambda
  double decay_slope = 0.0;  // OLS slope of log(mu_i i^{1/p}) against log i
  bool pass = false;
  std::vector<double> scaled;  // N(lambda) lambda^p per grid point
};

// Checks that N(lambda) lambda^p stays bounded as lambda -> 0 on the grid.
// Passes when d_hat is finite, the trend slope is >= -0.05 (no growth towards
// small lambda) and the eigenvalues are consistent with the declared decay
// law (decay slope <= 0.05). Requires model.decay_p().
EffectiveDimensionCertificate certify_effective_dimension_bound(const SpectralModel& model,
                                                                const std::vector<double>& lambda_grid);

// EMB constant A for exponent alpha in (0, 1]: the smaller of the grid maximum
// of sum_i mu_i^alpha e_i(x)^2 (10^4 points including x = 0, where the cosine
// system peaks) and the envelope 2 sum_i mu_i^alpha; returned as a norm.
double embedding_constant(const SpectralModel& model, double alpha);

// Eigenvalues of Gram(sample)/m, clipped at zero, nonincreasing.
Eigen::VectorXd nystrom_spectrum(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& sample);

// p_hat = -1/s where s is the OLS slope of log mu_hat_i against log i for
// 1-based indices first..last (inclusive). Needs at least 5 positive values.
double estimate_decay(const Eigen::Ref<const Eigen::VectorXd>& mu_hat, std::size_t first, std::size_t last);
// Default range [5, min(50, m/4)].
double estimate_decay(const Eigen::Ref<const Eigen::VectorXd>& mu_hat);

// OLS slope of ys against xs.
double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace vvkrr
