#include "vvkrr/lowerbound.hpp"

#include <cmath>
#include <stdexcept>

#include "vvkrr/errors.hpp"
#include "vvkrr/rng.hpp"
#include "vvkrr/spectral.hpp"

namespace vvkrr {

double ScalarFunctionCoeffs::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("scalar function evaluated outside [0, 1]");
  double s = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) s += c[i] * SpectralModel::basis(static_cast<std::size_t>(i), x);
  return s;
}

ScalarFunctionCoeffs project_function(const CoefficientMatrix& f, std::shared_ptr<const SpectralModel> model,
                                      const Eigen::Ref<const Eigen::VectorXd>& a) {
  if (static_cast<std::size_t>(a.size()) != f.output_dim()) {
    throw DimensionError("projection direction does not match the output dimension");
  }
  if (model && model->size() != f.size()) throw DimensionError("coefficients do not match the spectral model");
  return ScalarFunctionCoeffs{std::move(model), f.values() * a};
}

ReductionCheck check_reduction_inequality(const CoefficientMatrix& f, const Eigen::Ref<const Eigen::VectorXd>& a,
                                          double gamma, const SpectralModel& model) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("check_reduction_inequality: gamma must be nonnegative");
  const ScalarFunctionCoeffs projected = project_function(f, nullptr, a);
  ReductionCheck check;
  check.lhs = gamma_norm(model, projected.c, gamma);
  check.rhs = a.norm() * gamma_norm(model, f, gamma);
  check.holds = check.lhs <= check.rhs * (1.0 + 1e-10);
  return check;
}

Eigen::VectorXd gaussian_conditional_sample(const ScalarFunctionCoeffs& f, double x, double sigma, std::size_t d_y,
                                            std::mt19937_64& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_conditional_sample: sigma must be positive");
  if (d_y == 0) throw std::invalid_argument("gaussian_conditional_sample: d_y must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_y));
  y[0] = f(x) + sigma * normal(rng);
  return y;
}

Eigen::VectorXd gaussian_conditional_sample(const ScalarFunctionCoeffs& f, double x, double sigma, std::size_t d_y,
                                            std::uint64_t seed) {
  auto rng = make_rng(seed, 0x67636fULL);
  return gaussian_conditional_sample(f, x, sigma, d_y, rng);
}

namespace {

void check_pair(const ScalarFunctionCoeffs& f, const ScalarFunctionCoeffs& g, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("KL: sigma must be positive");
  if (f.c.size() != g.c.size()) throw std::invalid_argument("KL: functions live in different spectral models");
  if (f.model && g.model && f.model != g.model && f.model->eigenvalues() != g.model->eigenvalues()) {
    throw std::invalid_argument("KL: functions live in different spectral models");
  }
}

}  // namespace

double kl_scalar_joints(const ScalarFunctionCoeffs& f, const ScalarFunctionCoeffs& g, double sigma) {
  check_pair(f, g, sigma);
  return (f.c - g.c).squaredNorm() / (2.0 * sigma * sigma);
}

double kl_monte_carlo(const ScalarFunctionCoeffs& f, const ScalarFunctionCoeffs& g, double sigma, std::size_t n,
                      std::uint64_t seed) {
  check_pair(f, g, sigma);
  if (n == 0) throw std::invalid_argument("kl_monte_carlo: n must be positive");
  auto rng = make_rng(seed, 0x6b6cULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double x = unif(rng);
    const double fx = f(x);
    const double gx = g(x);
    const double y = fx + sigma * normal(rng);
    // log N(y; f, s^2) - log N(y; g, s^2)
    total += ((y - gx) * (y - gx) - (y - fx) * (y - fx)) * inv_two_var;
  }
  return total / static_cast<double>(n);
}

}  // namespace vvkrr
