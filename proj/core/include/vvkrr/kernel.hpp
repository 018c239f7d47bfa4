#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "vvkrr/spectral_model.hpp"

namespace vvkrr {

enum class KernelFamily { designed_mercer, gaussian, laplacian, matern };

/// Half-integer Matern orders nu = m - d/2 with closed forms.
enum class MaternOrder { half, three_halves, five_halves };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

double matern_nu(MaternOrder order);
// Accepts 0.5, 1.5 or 2.5; anything else is an unsupported order.
MaternOrder matern_order_from_nu(double nu);

// Matern value at distance r >= 0 with the sqrt(2 nu) scale folded in, so the
// value at r = 0 is exactly 1:
//   nu = 1/2: exp(-r)
//   nu = 3/2: (1 + sqrt3 r) exp(-sqrt3 r)
//   nu = 5/2: (1 + sqrt5 r + 5 r^2 / 3) exp(-sqrt5 r)
double matern_half_integer(MaternOrder order, double r);

/// Scalar kernel k_X on the real line. Immutable; the designed family shares
/// its SpectralModel.
class KernelSpec {
 public:
  static KernelSpec designed(std::shared_ptr<const SpectralModel> model);
  static KernelSpec designed(SpectralModel model);
  static KernelSpec gaussian(double lengthscale);
  static KernelSpec laplacian(double lengthscale);
  static KernelSpec matern(MaternOrder order);

  KernelFamily family() const { return family_; }
  double lengthscale() const { return lengthscale_; }
  MaternOrder matern_order() const { return order_; }
  // Null unless the family is designed_mercer.
  const std::shared_ptr<const SpectralModel>& spectral() const { return model_; }
  bool is_designed() const { return family_ == KernelFamily::designed_mercer; }

  // Certified bound with k(x, x) <= kappa_sq() everywhere.
  double kappa_sq() const { return kappa_sq_; }

  bool in_domain(double x) const;
  void check_domain(double x) const;

  std::string to_text() const;
  static KernelSpec from_text(std::string_view body);

 private:
  KernelSpec() = default;

  KernelFamily family_ = KernelFamily::gaussian;
  double lengthscale_ = 1.0;
  MaternOrder order_ = MaternOrder::half;
  std::shared_ptr<const SpectralModel> model_;
  double kappa_sq_ = 1.0;
};

double eval_scalar(const KernelSpec& spec, double x, double xp);

// Exactly symmetric: the lower triangle is computed and mirrored.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& points);

Eigen::VectorXd cross_vector(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& points, double x);

// Entry (s, t) = k(queries[s], points[t]).
Eigen::MatrixXd cross_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& points,
                             const Eigen::Ref<const Eigen::VectorXd>& queries);

/// PSD output operator B of the operator-valued kernel k(x, x') B.
class OutputFactorSpec {
 public:
  enum class Kind { identity, diagonal, dense };

  static OutputFactorSpec identity(std::size_t dim);
  static OutputFactorSpec diagonal(Eigen::VectorXd entries);
  // Symmetrized on construction; rejected if an eigenvalue is below -1e-10.
  static OutputFactorSpec dense(const Eigen::MatrixXd& matrix);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  // The unique PSD square root B^{1/2}.
  const Eigen::MatrixXd& sqrt_matrix() const { return sqrt_; }

 private:
  OutputFactorSpec() = default;

  Kind kind_ = Kind::identity;
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd sqrt_;
};

Eigen::VectorXd apply_output_factor_sqrt(const OutputFactorSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& y);

// Row-wise B^{1/2} y_t for a response matrix with one row per sample.
Eigen::MatrixXd apply_output_factor_sqrt_rows(const OutputFactorSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& y);

}  // namespace vvkrr
