#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "vvkrr/estimator.hpp"
#include "vvkrr/kernel.hpp"
#include "vvkrr/spectral_model.hpp"
#include "vvkrr/synth.hpp"

namespace vvkrr {

// Exact L2 coefficients of a fitted designed-kernel model:
//   c_ij = mu_i sum_t e_i(x_t) W_tj,
// from int k(x_t, x) e_i(x) dx = mu_i e_i(x_t).
CoefficientMatrix embed_coefficients(const FittedModel& model, const SpectralModel& spec);

// sum_ij (c_ij - c*_ij)^2 mu_i^-gamma for gamma in [0, 1] with gamma < beta.
double gamma_error(const CoefficientMatrix& chat, const TargetSpec& target, double gamma);

// Coefficients of the population regularized solution F_lambda:
// c*_ij mu_i / (mu_i + lambda).
CoefficientMatrix population_coefficients(const TargetSpec& target, double lambda);

// Exact squared gamma-norm bias ||F_lambda - F_*||_gamma^2 =
// sum_ij c*_ij^2 (lambda / (lambda + mu_i))^2 mu_i^-gamma, gamma in [0, beta].
double bias_oracle(const TargetSpec& target, double lambda, double gamma);

// Same target with every response mapped through a symmetric B^{1/2}.
TargetSpec transform_target(const TargetSpec& target, const Eigen::MatrixXd& output_sqrt);

struct ScheduleParams {
  double p = 0.5;
  double beta = 1.0;
  double alpha = 0.5;
  double theta = 2.0;
  double c0 = 1.0;
};

// c0 n^{-1/(beta+p)} when beta + p > alpha, otherwise
// c0 (n / log^theta n)^{-1/alpha}. Requires n >= 2, p in (0,1],
// beta in (0,2], alpha in [p,1], theta > 1.
double lambda_schedule(std::size_t n, const ScheduleParams& params);

// Exponent of the squared gamma-norm rate: (beta - gamma) / max(alpha, beta + p).
double theory_exponent(double beta, double gamma, double p, double alpha);

// OLS slope of log error against log n; >= 4 strictly increasing sizes.
double fit_rate(const std::vector<std::size_t>& ns, const std::vector<double>& median_errors);

double median(std::vector<double> values);

// (1/n_test) sum ||F_hat(x) - F_*(x)||^2 over fresh uniform x. When the model
// was fitted through an output factor the reference is B^{1/2} F_*.
double monte_carlo_l2_error(const FittedModel& model, const TargetSpec& target, std::size_t n_test,
                            std::uint64_t seed);
double monte_carlo_l2_error(const FittedModel& model, const SectionTarget& target, std::size_t n_test,
                            std::uint64_t seed);

enum class ErrorPath { exact_gamma, monte_carlo_l2 };

struct RateExperiment {
  std::string config_id = "experiment";
  std::variant<TargetSpec, SectionTarget> target;
  NoiseSpec noise = NoiseSpec::gaussian_iso(0.5, 4);
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  std::vector<std::size_t> ns;
  std::size_t n_seeds = 20;
  double gamma = 0.0;
  ScheduleParams schedule;
  std::optional<double> fixed_lambda;
  // Defaults to theory_exponent(beta, gamma, p, alpha) from the schedule.
  std::optional<double> expected_exponent;
  double tolerance = 0.12;
  std::uint64_t master_seed = 0;
  std::size_t n_test = 10000;
  // 0 selects std::thread::hardware_concurrency().
  std::size_t workers = 0;
};

struct RateReport {
  std::string config_id;
  ErrorPath path = ErrorPath::exact_gamma;
  std::vector<std::size_t> ns;
  std::vector<double> lambdas;
  Eigen::MatrixXd errors;  // ns.size() x n_seeds squared errors
  std::vector<double> medians;
  double fitted_slope = 0.0;
  double theory_exponent = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Fits every (n, seed) cell on a worker pool. Each cell draws from its own
// stream derived from (master_seed, n, seed index), so the report is
// identical for any worker count.
RateReport run_rate_experiment(const RateExperiment& experiment);

}  // namespace vvkrr
