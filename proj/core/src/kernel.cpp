#include "vvkrr/kernel.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "vvkrr/errors.hpp"
#include "vvkrr/textio.hpp"

namespace vvkrr {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::designed_mercer: return "designed-mercer";
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::laplacian: return "laplacian";
    case KernelFamily::matern: return "matern";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "designed-mercer") return KernelFamily::designed_mercer;
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "laplacian") return KernelFamily::laplacian;
  if (name == "matern") return KernelFamily::matern;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) +
                              "' (expected designed-mercer, gaussian, laplacian or matern)");
}

double matern_nu(MaternOrder order) {
  switch (order) {
    case MaternOrder::half: return 0.5;
    case MaternOrder::three_halves: return 1.5;
    case MaternOrder::five_halves: return 2.5;
  }
  return 0.0;
}

MaternOrder matern_order_from_nu(double nu) {
  if (nu == 0.5) return MaternOrder::half;
  if (nu == 1.5) return MaternOrder::three_halves;
  if (nu == 2.5) return MaternOrder::five_halves;
  throw std::invalid_argument("unsupported Matern order " + text::format_double(nu) +
                              " (supported: 0.5, 1.5, 2.5)");
}

double matern_half_integer(MaternOrder order, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("Matern distance must be nonnegative");
  switch (order) {
    case MaternOrder::half:
      return std::exp(-r);
    case MaternOrder::three_halves: {
      const double s = std::sqrt(3.0) * r;
      return (1.0 + s) * std::exp(-s);
    }
    case MaternOrder::five_halves: {
      const double s = std::sqrt(5.0) * r;
      return (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
  }
  throw std::invalid_argument("unsupported Matern order");
}

KernelSpec KernelSpec::designed(std::shared_ptr<const SpectralModel> model) {
  if (!model) throw std::invalid_argument("designed-mercer kernel needs a spectral model");
  KernelSpec k;
  k.family_ = KernelFamily::designed_mercer;
  k.kappa_sq_ = model->kappa_sq();
  k.model_ = std::move(model);
  return k;
}

KernelSpec KernelSpec::designed(SpectralModel model) {
  return designed(std::make_shared<const SpectralModel>(std::move(model)));
}

KernelSpec KernelSpec::gaussian(double lengthscale) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw std::invalid_argument("gaussian lengthscale must be positive");
  }
  KernelSpec k;
  k.family_ = KernelFamily::gaussian;
  k.lengthscale_ = lengthscale;
  return k;
}

KernelSpec KernelSpec::laplacian(double lengthscale) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw std::invalid_argument("laplacian lengthscale must be positive");
  }
  KernelSpec k;
  k.family_ = KernelFamily::laplacian;
  k.lengthscale_ = lengthscale;
  return k;
}

KernelSpec KernelSpec::matern(MaternOrder order) {
  KernelSpec k;
  k.family_ = KernelFamily::matern;
  k.order_ = order;
  return k;
}

bool KernelSpec::in_domain(double x) const {
  if (!std::isfinite(x)) return false;
  if (family_ == KernelFamily::designed_mercer) return x >= 0.0 && x <= 1.0;
  return true;
}

void KernelSpec::check_domain(double x) const {
  if (!in_domain(x)) {
    throw DomainError("input " + text::format_double(x) + " outside the domain of the " +
                      std::string(to_string(family_)) + " kernel");
  }
}

std::string KernelSpec::to_text() const {
  std::string out = "family = " + std::string(to_string(family_)) + "\n";
  switch (family_) {
    case KernelFamily::gaussian:
    case KernelFamily::laplacian:
      out += "lengthscale = " + text::format_double(lengthscale_) + "\n";
      break;
    case KernelFamily::matern:
      out += "nu = " + text::format_double(matern_nu(order_)) + "\n";
      break;
    case KernelFamily::designed_mercer:
      out += "[spectral]\n" + model_->to_text();
      break;
  }
  return out;
}

KernelSpec KernelSpec::from_text(std::string_view body) {
  std::optional<KernelFamily> family;
  double lengthscale = 1.0;
  double nu = 0.5;
  std::string spectral;
  for (const auto& kv : text::parse_key_values(body)) {
    if (kv.key == "family") {
      family = kernel_family_from_string(kv.value);
    } else if (kv.key == "lengthscale") {
      lengthscale = text::parse_double(kv.value);
    } else if (kv.key == "nu") {
      nu = text::parse_double(kv.value);
    } else if (kv.key.starts_with("spectral.")) {
      spectral += kv.key.substr(9) + " = " + kv.value + "\n";
    } else {
      throw std::invalid_argument("unknown kernel key '" + kv.key + "'");
    }
  }
  if (!family) throw std::invalid_argument("kernel description lacks a family");
  switch (*family) {
    case KernelFamily::gaussian: return gaussian(lengthscale);
    case KernelFamily::laplacian: return laplacian(lengthscale);
    case KernelFamily::matern: return matern(matern_order_from_nu(nu));
    case KernelFamily::designed_mercer: return designed(SpectralModel::from_text(spectral));
  }
  throw std::invalid_argument("unreachable kernel family");
}

namespace {

double stationary_value(const KernelSpec& spec, double r) {
  switch (spec.family()) {
    case KernelFamily::gaussian: {
      const double s = r / spec.lengthscale();
      return std::exp(-0.5 * s * s);
    }
    case KernelFamily::laplacian:
      return std::exp(-r / spec.lengthscale());
    case KernelFamily::matern:
      return matern_half_integer(spec.matern_order(), r);
    case KernelFamily::designed_mercer:
      break;
  }
  throw std::logic_error("designed-mercer kernel is not stationary");
}

void check_all(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& xs) {
  for (Eigen::Index i = 0; i < xs.size(); ++i) spec.check_domain(xs[i]);
}

}  // namespace

double eval_scalar(const KernelSpec& spec, double x, double xp) {
  spec.check_domain(x);
  spec.check_domain(xp);
  if (spec.is_designed()) return spec.spectral()->kernel_sum(x, xp);
  return stationary_value(spec, std::abs(x - xp));
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& points) {
  const Eigen::Index n = points.size();
  if (n == 0) throw std::invalid_argument("gram_matrix: empty point set");
  check_all(spec, points);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  if (spec.is_designed()) {
    const auto& model = *spec.spectral();
    Eigen::MatrixXd features = model.basis_matrix(points);
    features *= model.eigenvalues().cwiseSqrt().asDiagonal();
    k.selfadjointView<Eigen::Lower>().rankUpdate(features);
  } else {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j; i < n; ++i) k(i, j) = stationary_value(spec, std::abs(points[i] - points[j]));
    }
  }
  k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
  return k;
}

Eigen::VectorXd cross_vector(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& points, double x) {
  Eigen::VectorXd q(1);
  q[0] = x;
  return cross_matrix(spec, points, q).row(0).transpose();
}

Eigen::MatrixXd cross_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& points,
                             const Eigen::Ref<const Eigen::VectorXd>& queries) {
  check_all(spec, points);
  check_all(spec, queries);
  if (spec.is_designed()) {
    const auto& model = *spec.spectral();
    const Eigen::MatrixXd eq = model.basis_matrix(queries);
    const Eigen::MatrixXd ep = model.basis_matrix(points);
    return eq * model.eigenvalues().asDiagonal() * ep.transpose();
  }
  Eigen::MatrixXd out(queries.size(), points.size());
  for (Eigen::Index t = 0; t < points.size(); ++t) {
    for (Eigen::Index s = 0; s < queries.size(); ++s) {
      out(s, t) = stationary_value(spec, std::abs(queries[s] - points[t]));
    }
  }
  return out;
}

OutputFactorSpec OutputFactorSpec::identity(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("output dimension must be positive");
  OutputFactorSpec s;
  s.kind_ = Kind::identity;
  s.matrix_ = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  s.sqrt_ = s.matrix_;
  return s;
}

OutputFactorSpec OutputFactorSpec::diagonal(Eigen::VectorXd entries) {
  if (entries.size() == 0) throw std::invalid_argument("output dimension must be positive");
  for (Eigen::Index i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i]) || entries[i] < 0.0) {
      throw std::invalid_argument("diagonal output factor entries must be finite and nonnegative");
    }
  }
  OutputFactorSpec s;
  s.kind_ = Kind::diagonal;
  s.matrix_ = entries.asDiagonal();
  s.sqrt_ = entries.cwiseSqrt().asDiagonal();
  return s;
}

OutputFactorSpec OutputFactorSpec::dense(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() == 0 || matrix.rows() != matrix.cols()) {
    throw DimensionError("dense output factor must be a nonempty square matrix");
  }
  if (!matrix.allFinite()) throw std::invalid_argument("dense output factor has non-finite entries");
  OutputFactorSpec s;
  s.kind_ = Kind::dense;
  s.matrix_ = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.matrix_);
  if (eig.info() != Eigen::Success) throw NumericalError("output factor eigendecomposition failed");
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("output factor is not positive semidefinite (eigenvalue " +
                                text::format_double(eig.eigenvalues().minCoeff()) + ")");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  s.sqrt_ = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  s.sqrt_ = 0.5 * (s.sqrt_ + s.sqrt_.transpose()).eval();
  return s;
}

Eigen::VectorXd apply_output_factor_sqrt(const OutputFactorSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (static_cast<std::size_t>(y.size()) != spec.dim()) {
    throw DimensionError("response dimension " + std::to_string(y.size()) + " does not match output factor dimension " +
                         std::to_string(spec.dim()));
  }
  switch (spec.kind()) {
    case OutputFactorSpec::Kind::identity: return y;
    case OutputFactorSpec::Kind::diagonal: return spec.sqrt_matrix().diagonal().cwiseProduct(y);
    case OutputFactorSpec::Kind::dense: return spec.sqrt_matrix() * y;
  }
  return y;
}

Eigen::MatrixXd apply_output_factor_sqrt_rows(const OutputFactorSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& y) {
  if (static_cast<std::size_t>(y.cols()) != spec.dim()) {
    throw DimensionError("response dimension " + std::to_string(y.cols()) + " does not match output factor dimension " +
                         std::to_string(spec.dim()));
  }
  switch (spec.kind()) {
    case OutputFactorSpec::Kind::identity: return y;
    case OutputFactorSpec::Kind::diagonal: return y * spec.sqrt_matrix().diagonal().asDiagonal();
    case OutputFactorSpec::Kind::dense: return y * spec.sqrt_matrix();
  }
  return y;
}

}  // namespace vvkrr
