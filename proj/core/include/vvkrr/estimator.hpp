#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>

#include <Eigen/Core>

#include "vvkrr/kernel.hpp"
#include "vvkrr/spectral_model.hpp"

namespace vvkrr {

/// n covariate/response pairs; row t of `y` is the response at x[t].
struct Dataset {
  Eigen::VectorXd x;
  Eigen::MatrixXd y;

  std::size_t size() const { return static_cast<std::size_t>(x.size()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(y.cols()); }

  // Throws on n = 0, shape mismatch, non-finite entries or inputs outside the
  // kernel's domain.
  void validate(const KernelSpec& kernel) const;
};

/// Regularized least-squares estimate F(x) = W^T k_X(x) with
/// (K + n lambda I) W = Y.
class FittedModel {
 public:
  FittedModel(KernelSpec kernel, Eigen::VectorXd train_x, Eigen::MatrixXd weights, double lambda,
              std::optional<Eigen::MatrixXd> output_sqrt = std::nullopt);

  const KernelSpec& kernel() const { return kernel_; }
  const Eigen::VectorXd& train_x() const { return train_x_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  double lambda() const { return lambda_; }
  std::size_t size() const { return static_cast<std::size_t>(train_x_.size()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(weights_.cols()); }

  // Set when responses were mapped through B^{1/2} before fitting; the model
  // then estimates B^{1/2} F_*.
  const std::optional<Eigen::MatrixXd>& output_sqrt() const { return output_sqrt_; }

 private:
  KernelSpec kernel_;
  Eigen::VectorXd train_x_;
  Eigen::MatrixXd weights_;
  double lambda_;
  std::optional<Eigen::MatrixXd> output_sqrt_;
};

// Solves all output channels with one Cholesky factorization of K + n lambda I.
FittedModel fit(const KernelSpec& kernel, const Dataset& data, double lambda);

// Regression with the operator-valued kernel k(x, x') B: responses become
// B^{1/2} y_t and the plain solver runs on them.
FittedModel fit_with_output_factor(const KernelSpec& kernel, const OutputFactorSpec& factor, const Dataset& data,
                                   double lambda);

Eigen::VectorXd predict(const FittedModel& model, double x);
// Row s is the prediction at xs[s].
Eigen::MatrixXd predict(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& xs);

// Primal ridge regression in the explicit feature map phi_i(x) = sqrt(mu_i)
// e_i(x): solves (Phi^T Phi / n + lambda I) C^T = Phi^T Y / n and returns the
// L2 coefficients sqrt(mu_i) C_ij. Independent of the dual kernel solve.
CoefficientMatrix feature_ridge_oracle(const SpectralModel& model, const Dataset& data, double lambda);

// Max-norm residual of (K + n lambda I) W - Y.
double fit_residual(const FittedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& y);

// Versioned plain-text artifact; values round-trip bit-exactly.
void save_model(const FittedModel& model, std::ostream& out);
FittedModel load_model(std::istream& in);

}  // namespace vvkrr
