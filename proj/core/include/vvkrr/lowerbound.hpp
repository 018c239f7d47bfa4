#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>

#include <Eigen/Core>

#include "vvkrr/spectral_model.hpp"

namespace vvkrr {

/// Scalar function f = sum_i c_i e_i in the cosine basis of `model`.
struct ScalarFunctionCoeffs {
  std::shared_ptr<const SpectralModel> model;
  Eigen::VectorXd c;

  double operator()(double x) const;
};

// <F(.), a>: c_i = sum_j F_ij a_j.
ScalarFunctionCoeffs project_function(const CoefficientMatrix& f, std::shared_ptr<const SpectralModel> model,
                                      const Eigen::Ref<const Eigen::VectorXd>& a);

struct ReductionCheck {
  double lhs = 0.0;  // ||<F, a>||_gamma
  double rhs = 0.0;  // ||a|| ||F||_gamma
  bool holds = false;
};

// ||<F(.), a>||_gamma <= ||a|| ||F||_gamma, with relative slack 1e-10.
ReductionCheck check_reduction_inequality(const CoefficientMatrix& f, const Eigen::Ref<const Eigen::VectorXd>& a,
                                          double gamma, const SpectralModel& model);

// Draw from N(f(x) d_1, sigma^2 d_1 (x) d_1) on R^{d_y}: only coordinate 0 is
// nonzero.
Eigen::VectorXd gaussian_conditional_sample(const ScalarFunctionCoeffs& f, double x, double sigma, std::size_t d_y,
                                            std::mt19937_64& rng);
Eigen::VectorXd gaussian_conditional_sample(const ScalarFunctionCoeffs& f, double x, double sigma, std::size_t d_y,
                                            std::uint64_t seed);

// KL between the joints pi(dx) N(f(x), sigma^2) and pi(dx) N(g(x), sigma^2):
// ||f - g||^2_{L2} / (2 sigma^2), evaluated through Parseval.
double kl_scalar_joints(const ScalarFunctionCoeffs& f, const ScalarFunctionCoeffs& g, double sigma);

// Monte Carlo estimate of E_f[log p_f(y|x) - log p_g(y|x)] over n draws of
// x ~ U[0,1], y ~ N(f(x), sigma^2).
double kl_monte_carlo(const ScalarFunctionCoeffs& f, const ScalarFunctionCoeffs& g, double sigma, std::size_t n,
                      std::uint64_t seed);

}  // namespace vvkrr
