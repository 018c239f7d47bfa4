#include "vvkrr/cli/commands.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "vvkrr/lowerbound.hpp"
#include "vvkrr/report.hpp"
#include "vvkrr/rng.hpp"
#include "vvkrr/spectral.hpp"
#include "vvkrr/textio.hpp"

namespace vvkrr::cli {
namespace {

using text::format_double;

// Stream tags for seeds derived from the master seed.
constexpr std::uint64_t kNystromStream = 0x6e79;
constexpr std::uint64_t kLowerBoundStream = 0x6c62;
constexpr std::uint64_t kKlStream = 0x6b6c;

std::vector<double> lambda_grid(const ExperimentConfig& c) {
  std::vector<double> grid;
  const double lo = std::log(c.lambda_min), hi = std::log(c.lambda_max);
  for (std::size_t k = 0; k < c.lambda_points; ++k) {
    grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(c.lambda_points - 1)));
  }
  return grid;
}

TargetSpec build_target(const ExperimentConfig& c, std::shared_ptr<const SpectralModel> model) {
  return make_target(std::move(model), c.beta, c.bound, c.d_y, c.target_kind, c.target_seed);
}

std::map<std::string, std::string> rate_files(const RateReport& report, const std::string& extra_summary = {}) {
  std::ostringstream cells, summary, plot;
  write_cells_csv(report, cells);
  write_summary(report, summary);
  summary << extra_summary;
  write_plot_data(report, plot);
  return {{"cells.csv", cells.str()}, {"summary.txt", summary.str()}, {"plot.dat", plot.str()}};
}

void log_rate(const RunOptions& o, const RateReport& r) {
  if (!o.log) return;
  auto& out = *o.log;
  out << fmt::format("{:>8} {:>14} {:>14}\n", "n", "lambda", "median error");
  for (std::size_t k = 0; k < r.ns.size(); ++k) {
    out << fmt::format("{:>8} {:>14.6e} {:>14.6e}\n", r.ns[k], r.lambdas[k], r.medians[k]);
  }
  out << fmt::format("slope {:.4f}  target {:.4f} +- {:.3f}  [{}]\n", r.fitted_slope, -r.theory_exponent, r.tolerance,
                     r.pass ? "PASS" : "FAIL");
}

ScalarFunctionCoeffs random_function(const std::shared_ptr<const SpectralModel>& model, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd c(static_cast<Eigen::Index>(model->size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = normal(rng) / static_cast<double>(i + 1);
  return {model, c};
}

}  // namespace

std::shared_ptr<const SpectralModel> build_spectral(const ExperimentConfig& c) {
  if (!c.eigenvalues.empty()) {
    return std::make_shared<const SpectralModel>(SpectralModel::from_eigenvalues(c.eigenvalues, c.p));
  }
  return std::make_shared<const SpectralModel>(SpectralModel::from_decay(c.p, c.spectral_size, c.decay_scale));
}

KernelSpec build_kernel(const ExperimentConfig& c, std::shared_ptr<const SpectralModel> model) {
  switch (c.kernel_family) {
    case KernelFamily::designed_mercer: return KernelSpec::designed(std::move(model));
    case KernelFamily::gaussian: return KernelSpec::gaussian(c.lengthscale);
    case KernelFamily::laplacian: return KernelSpec::laplacian(c.lengthscale);
    case KernelFamily::matern: return KernelSpec::matern(matern_order_from_nu(c.matern_nu));
  }
  throw std::invalid_argument("unknown kernel family");
}

NoiseSpec build_noise(const ExperimentConfig& c) {
  switch (c.noise_kind) {
    case NoiseKind::gaussian_iso: return NoiseSpec::gaussian_iso(c.sigma_bar, c.d_y);
    case NoiseKind::bounded_sphere: return NoiseSpec::bounded_sphere(c.sigma_bar, c.d_y);
    case NoiseKind::rank_one_gaussian: {
      Eigen::VectorXd dir = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(c.d_y), 0);
      if (!c.noise_direction.empty()) dir = Eigen::Map<const Eigen::VectorXd>(c.noise_direction.data(), c.d_y);
      return NoiseSpec::rank_one_gaussian(c.sigma_bar, dir);
    }
  }
  throw std::invalid_argument("unknown noise kind");
}

RateExperiment build_rate_experiment(const ExperimentConfig& c, std::size_t workers) {
  auto model = build_spectral(c);
  RateExperiment ex;
  ex.config_id = c.config_id;
  ex.kernel = build_kernel(c, model);
  if (ex.kernel.is_designed()) {
    ex.target = build_target(c, model);
  } else {
    ex.target = make_section_target(ex.kernel, c.section_nodes, c.d_y, c.bound, c.target_seed);
  }
  ex.noise = build_noise(c);
  ex.ns = c.ns;
  ex.n_seeds = c.n_seeds;
  ex.gamma = c.gamma;
  ex.schedule = ScheduleParams{c.p, c.beta, c.alpha_or_default(), c.theta, c.c0};
  ex.fixed_lambda = c.fixed_lambda;
  ex.expected_exponent = c.theory_exponent;
  ex.tolerance = c.tolerance_or_default();
  ex.master_seed = c.master_seed;
  ex.n_test = c.n_test;
  ex.workers = workers;
  return ex;
}

int cmd_run_rates(const ExperimentConfig& c, const RunOptions& o) {
  const auto report = run_rate_experiment(build_rate_experiment(c, o.workers));
  log_rate(o, report);
  write_artifacts(c.output_dir, "run-rates", c, report.pass, rate_files(report));
  return report.pass ? kPass : kFail;
}

int cmd_sobolev_demo(const ExperimentConfig& c, const RunOptions& o) {
  // Matern of order nu on [0, 1] has RKHS norm-equivalent to the Sobolev space
  // of smoothness m = nu + 1/2, so p = 1/(2m) and the target has beta = 1.
  const MaternOrder order = matern_order_from_nu(c.matern_nu);
  const double m = c.matern_nu + 0.5;
  const double p = 1.0 / (2.0 * m);

  const KernelSpec kernel = KernelSpec::matern(order);
  auto rng = make_rng(derive_seed(c.master_seed, kNystromStream));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd xs(static_cast<Eigen::Index>(c.nystrom_points));
  for (auto& x : xs) x = unif(rng);
  const double p_hat = estimate_decay(nystrom_spectrum(kernel, xs));
  const bool p_ok = std::abs(p_hat - p) <= 0.15;

  RateExperiment ex;
  ex.config_id = c.config_id;
  ex.kernel = kernel;
  ex.target = make_section_target(kernel, c.section_nodes, c.d_y, c.bound, c.target_seed);
  ex.noise = build_noise(c);
  ex.ns = c.ns;
  ex.n_seeds = c.n_seeds;
  ex.schedule = ScheduleParams{p, 1.0, p, c.theta, c.c0};
  ex.fixed_lambda = c.fixed_lambda;
  ex.expected_exponent = c.theory_exponent;
  ex.tolerance = c.tolerance.value_or(0.15);
  ex.master_seed = c.master_seed;
  ex.n_test = c.n_test;
  ex.workers = o.workers;
  const auto report = run_rate_experiment(ex);

  const bool pass = report.pass && p_ok;
  std::ostringstream extra;
  extra << "smoothness_m = " << format_double(m) << '\n';
  extra << "p_expected = " << format_double(p) << '\n';
  extra << "p_hat = " << format_double(p_hat) << '\n';
  extra << "p_hat_pass = " << (p_ok ? "true" : "false") << '\n';
  extra << "overall_pass = " << (pass ? "true" : "false") << '\n';
  if (o.log) *o.log << fmt::format("nystrom p_hat {:.4f} (expected {:.4f}) [{}]\n", p_hat, p, p_ok ? "PASS" : "FAIL");
  log_rate(o, report);
  write_artifacts(c.output_dir, "sobolev-demo", c, pass, rate_files(report, extra.str()));
  return pass ? kPass : kFail;
}

int cmd_bias_check(const ExperimentConfig& c, const RunOptions& o) {
  auto model = build_spectral(c);
  const auto target = build_target(c, model);
  std::ostringstream table;
  table << "lambda,bias,bound\n";
  std::size_t violations = 0;
  for (double lambda : lambda_grid(c)) {
    const double bias = bias_oracle(target, lambda, c.gamma);
    const double bound = c.bound * c.bound * std::pow(lambda, c.beta - c.gamma);
    if (bias > bound + 1e-12) ++violations;
    table << format_double(lambda) << ',' << format_double(bias) << ',' << format_double(bound) << '\n';
  }
  const bool pass = violations == 0;
  std::ostringstream summary;
  summary << "config_id = " << c.config_id << '\n';
  summary << "gamma = " << format_double(c.gamma) << '\n';
  summary << "violations = " << violations << '\n';
  summary << "pass = " << (pass ? "true" : "false") << '\n';
  if (o.log) *o.log << table.str() << summary.str();
  write_artifacts(c.output_dir, "bias-check", c, pass, {{"bias.csv", table.str()}, {"summary.txt", summary.str()}});
  return pass ? kPass : kFail;
}

int cmd_edim(const ExperimentConfig& c, const RunOptions& o) {
  auto model = build_spectral(c);
  const auto grid = lambda_grid(c);
  std::ostringstream table;
  table << "lambda,n_lambda,scaled\n";
  for (double lambda : grid) {
    const double n = effective_dimension(*model, lambda);
    table << format_double(lambda) << ',' << format_double(n) << ',' << format_double(n * std::pow(lambda, c.p))
          << '\n';
  }
  const auto cert = certify_effective_dimension_bound(*model, grid);
  std::ostringstream summary;
  summary << "config_id = " << c.config_id << '\n';
  summary << "p = " << format_double(c.p) << '\n';
  summary << "d_hat = " << format_double(cert.d_hat) << '\n';
  summary << "trend_slope = " << format_double(cert.trend_slope) << '\n';
  summary << "decay_slope = " << format_double(cert.decay_slope) << '\n';
  summary << "pass = " << (cert.pass ? "true" : "false") << '\n';
  if (o.log) *o.log << table.str() << summary.str();
  write_artifacts(c.output_dir, "edim", c, cert.pass, {{"edim.csv", table.str()}, {"summary.txt", summary.str()}});
  return cert.pass ? kPass : kFail;
}

int cmd_lower_bound_demo(const ExperimentConfig& c, const RunOptions& o) {
  auto model = build_spectral(c);
  const auto size = static_cast<Eigen::Index>(model->size());
  const auto d_y = static_cast<Eigen::Index>(c.d_y);
  auto rng = make_rng(derive_seed(c.master_seed, kLowerBoundStream));
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (auto& v : m.reshaped()) v = normal(rng);
    return m;
  };

  constexpr double kGammas[] = {0.0, 0.3, 1.0};
  std::size_t failures = 0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const CoefficientMatrix f(draw(size, d_y));
    const Eigen::VectorXd a = draw(d_y, 1).col(0);
    if (!check_reduction_inequality(f, a, kGammas[t % 3], *model).holds) ++failures;
  }
  const Eigen::VectorXd a = draw(d_y, 1).col(0);
  const CoefficientMatrix rank_one(draw(size, 1) * a.transpose());
  const auto eq = check_reduction_inequality(rank_one, a, 0.5, *model);
  const double eq_gap = std::abs(eq.lhs - eq.rhs) / eq.rhs;
  const bool eq_ok = eq_gap <= 1e-12;

  std::ostringstream table;
  table << "pair,sigma,analytic,monte_carlo,rel_error\n";
  std::size_t kl_failures = 0, scaling_failures = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < c.pairs; ++k) {
    const auto f = random_function(model, rng);
    const auto g = random_function(model, rng);
    for (std::size_t s = 0; s < c.kl_sigmas.size(); ++s) {
      const double sigma = c.kl_sigmas[s];
      const double exact = kl_scalar_joints(f, g, sigma);
      const double mc = kl_monte_carlo(f, g, sigma, c.mc_draws, derive_seed(c.master_seed, kKlStream + 64 * k + s));
      const double rel = std::abs(mc - exact) / exact;
      worst = std::max(worst, rel);
      if (!(rel <= 0.05)) ++kl_failures;
      if (kl_scalar_joints(f, g, 2.0 * sigma) != exact / 4.0) ++scaling_failures;
      table << k << ',' << format_double(sigma) << ',' << format_double(exact) << ',' << format_double(mc) << ','
            << format_double(rel) << '\n';
    }
  }
  const bool pass = failures == 0 && eq_ok && kl_failures == 0 && scaling_failures == 0;
  std::ostringstream summary;
  summary << "config_id = " << c.config_id << '\n';
  summary << "reduction_trials = " << c.trials << '\n';
  summary << "reduction_failures = " << failures << '\n';
  summary << "rank_one_relative_gap = " << format_double(eq_gap) << '\n';
  summary << "kl_pairs = " << c.pairs << '\n';
  summary << "kl_failures = " << kl_failures << '\n';
  summary << "kl_worst_rel_error = " << format_double(worst) << '\n';
  summary << "kl_scaling_failures = " << scaling_failures << '\n';
  summary << "pass = " << (pass ? "true" : "false") << '\n';
  if (o.log) *o.log << table.str() << summary.str();
  write_artifacts(c.output_dir, "lower-bound-demo", c, pass, {{"kl.csv", table.str()}, {"summary.txt", summary.str()}});
  return pass ? kPass : kFail;
}

}  // namespace vvkrr::cli
