#include "vvkrr/spectral_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vvkrr/errors.hpp"
#include "vvkrr/textio.hpp"

namespace vvkrr {

namespace {

double kappa_sq_of(const Eigen::VectorXd& mu) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    s += mu[i] * SpectralModel::basis_sup_sq(static_cast<std::size_t>(i));
  }
  return s;
}

void check_eigenvalues(const Eigen::VectorXd& mu) {
  if (mu.size() == 0) throw std::invalid_argument("spectral model needs at least one eigenvalue");
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (!std::isfinite(mu[i]) || mu[i] <= 0.0) {
      throw std::invalid_argument("eigenvalue " + std::to_string(i + 1) + " is not strictly positive");
    }
    if (i > 0 && mu[i] > mu[i - 1]) {
      throw std::invalid_argument("eigenvalues must be nonincreasing (index " + std::to_string(i + 1) + ")");
    }
  }
}

}  // namespace

SpectralModel::SpectralModel(Eigen::VectorXd mu, std::optional<double> p, double scale, bool from_law)
    : mu_(std::move(mu)), decay_p_(p), scale_(scale), from_law_(from_law), kappa_sq_(kappa_sq_of(mu_)) {}

SpectralModel SpectralModel::from_decay(double p, std::size_t size, double scale) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("decay exponent p must lie in (0, 1]");
  if (size == 0) throw std::invalid_argument("spectral model size must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("decay scale must be positive");
  Eigen::VectorXd mu(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) {
    mu[static_cast<Eigen::Index>(i)] = scale * std::pow(static_cast<double>(i + 1), -1.0 / p);
  }
  return SpectralModel(std::move(mu), p, scale, true);
}

SpectralModel SpectralModel::from_eigenvalues(std::vector<double> mu, std::optional<double> declared_p) {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  check_eigenvalues(v);
  if (declared_p && !(*declared_p > 0.0 && *declared_p <= 1.0)) {
    throw std::invalid_argument("declared decay exponent p must lie in (0, 1]");
  }
  const double lead = v[0];
  return SpectralModel(std::move(v), declared_p, lead, false);
}

double SpectralModel::basis(std::size_t i, double x) {
  if (i == 0) return 1.0;
  return std::numbers::sqrt2 * std::cos(static_cast<double>(i) * std::numbers::pi * x);
}

Eigen::MatrixXd SpectralModel::basis_matrix(const Eigen::Ref<const Eigen::VectorXd>& xs) const {
  const Eigen::Index n = xs.size();
  const Eigen::Index m = mu_.size();
  Eigen::MatrixXd e(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double freq = static_cast<double>(j) * std::numbers::pi;
    if (j == 0) {
      e.col(0).setOnes();
      continue;
    }
    for (Eigen::Index t = 0; t < n; ++t) e(t, j) = std::numbers::sqrt2 * std::cos(freq * xs[t]);
  }
  return e;
}

double SpectralModel::kernel_sum(double x, double xp) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu_.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    s += mu_[i] * basis(k, x) * basis(k, xp);
  }
  return s;
}

SpectralModel SpectralModel::truncated(std::size_t size) const {
  if (size == 0 || size > this->size()) throw std::invalid_argument("truncation size out of range");
  if (from_law_) return from_decay(*decay_p_, size, scale_);
  return SpectralModel(mu_.head(static_cast<Eigen::Index>(size)), decay_p_, scale_, false);
}

std::string SpectralModel::to_text() const {
  std::string out = "basis = cosine\n";
  out += "size = " + std::to_string(size()) + "\n";
  if (from_law_) {
    out += "decay_p = " + text::format_double(*decay_p_) + "\n";
    out += "decay_scale = " + text::format_double(scale_) + "\n";
  } else {
    std::vector<double> mu(mu_.data(), mu_.data() + mu_.size());
    out += "eigenvalues = " + text::format_double_list(mu) + "\n";
    if (decay_p_) out += "declared_p = " + text::format_double(*decay_p_) + "\n";
  }
  return out;
}

SpectralModel SpectralModel::from_text(std::string_view body) {
  std::optional<std::size_t> size;
  std::optional<double> p;
  std::optional<double> declared;
  double scale = 1.0;
  std::optional<std::vector<double>> mu;
  for (const auto& kv : text::parse_key_values(body)) {
    if (kv.key == "basis") {
      if (kv.value != "cosine") throw std::invalid_argument("unsupported basis '" + kv.value + "'");
    } else if (kv.key == "size") {
      const auto v = text::parse_integer(kv.value);
      if (v <= 0) throw std::invalid_argument("size must be positive");
      size = static_cast<std::size_t>(v);
    } else if (kv.key == "decay_p") {
      p = text::parse_double(kv.value);
    } else if (kv.key == "decay_scale") {
      scale = text::parse_double(kv.value);
    } else if (kv.key == "eigenvalues") {
      mu = text::parse_double_list(kv.value);
    } else if (kv.key == "declared_p") {
      declared = text::parse_double(kv.value);
    } else {
      throw std::invalid_argument("unknown spectral key '" + kv.key + "'");
    }
  }
  if (mu) {
    if (p) throw std::invalid_argument("give either decay_p or eigenvalues, not both");
    if (size && *size != mu->size()) throw std::invalid_argument("size does not match eigenvalue count");
    return from_eigenvalues(std::move(*mu), declared);
  }
  if (!p) throw std::invalid_argument("spectral model needs decay_p or eigenvalues");
  return from_decay(*p, size.value_or(kDefaultSize), scale);
}

CoefficientMatrix::CoefficientMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw std::invalid_argument("coefficient matrix has non-finite entries");
}

CoefficientMatrix CoefficientMatrix::zero(std::size_t size, std::size_t d_y) {
  return CoefficientMatrix(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(d_y)));
}

}  // namespace vvkrr
