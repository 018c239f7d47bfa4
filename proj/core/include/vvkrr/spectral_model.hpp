#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace vvkrr {

/// A Mercer kernel with an exactly known spectrum on [0,1] under the uniform
/// marginal. Eigenvalue i (0-based) pairs with the cosine basis function
///   e_0(x) = 1,  e_i(x) = sqrt(2) cos(i pi x)  (i >= 1),
/// which is orthonormal in L2([0,1]). When built from a decay law the
/// eigenvalues are mu_i = scale * (i+1)^(-1/p), so both EVD bounds hold with
/// c1 = c2 = scale.
class SpectralModel {
 public:
  static constexpr std::size_t kDefaultSize = 512;

  static SpectralModel from_decay(double p, std::size_t size = kDefaultSize, double scale = 1.0);

  // Explicit eigenvalues (strictly positive, nonincreasing). `declared_p`
  // records a claimed decay exponent without enforcing it.
  static SpectralModel from_eigenvalues(std::vector<double> mu,
                                        std::optional<double> declared_p = std::nullopt);

  std::size_t size() const { return static_cast<std::size_t>(mu_.size()); }
  double eigenvalue(std::size_t i) const { return mu_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& eigenvalues() const { return mu_; }
  std::optional<double> decay_p() const { return decay_p_; }
  double decay_scale() const { return scale_; }
  bool from_decay_law() const { return from_law_; }

  // sup_x sum_i mu_i e_i(x)^2; attained at x = 0 for the cosine system.
  double kappa_sq() const { return kappa_sq_; }

  static double basis(std::size_t i, double x);
  static double basis_sup_sq(std::size_t i) { return i == 0 ? 1.0 : 2.0; }

  // Row t holds (e_0(x_t), ..., e_{size-1}(x_t)).
  Eigen::MatrixXd basis_matrix(const Eigen::Ref<const Eigen::VectorXd>& xs) const;

  // sum_i mu_i e_i(x) e_i(x'), no domain check.
  double kernel_sum(double x, double xp) const;

  // Same cosine basis and eigenvalues, first `size` terms.
  SpectralModel truncated(std::size_t size) const;

  // "key = value" lines: basis, size, and either decay_p/decay_scale or an
  // explicit eigenvalue list (plus an optional declared_p).
  std::string to_text() const;
  static SpectralModel from_text(std::string_view body);

 private:
  SpectralModel(Eigen::VectorXd mu, std::optional<double> p, double scale, bool from_law);

  Eigen::VectorXd mu_;
  std::optional<double> decay_p_;
  double scale_ = 1.0;
  bool from_law_ = false;
  double kappa_sq_ = 0.0;
};

/// L2(pi; R^dY) basis coefficients of F = sum_ij c_ij d_j e_i. Rows follow the
/// eigen-ordering of a SpectralModel, columns the output coordinates.
class CoefficientMatrix {
 public:
  CoefficientMatrix() = default;
  explicit CoefficientMatrix(Eigen::MatrixXd values);

  static CoefficientMatrix zero(std::size_t size, std::size_t d_y);

  const Eigen::MatrixXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(values_.cols()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Eigen::MatrixXd values_;
};

}  // namespace vvkrr
