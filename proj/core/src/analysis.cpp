#include "vvkrr/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "vvkrr/errors.hpp"
#include "vvkrr/rng.hpp"
#include "vvkrr/spectral.hpp"

namespace vvkrr {

namespace {

bool same_spectrum(const SpectralModel& a, const SpectralModel& b) {
  return a.size() == b.size() && a.eigenvalues() == b.eigenvalues();
}

void check_target_shape(const CoefficientMatrix& c, const TargetSpec& target) {
  if (c.size() != target.coeffs.size() || c.output_dim() != target.coeffs.output_dim()) {
    throw DimensionError("coefficient matrix shape does not match the target");
  }
}

}  // namespace

CoefficientMatrix embed_coefficients(const FittedModel& model, const SpectralModel& spec) {
  const auto& kernel = model.kernel();
  if (!kernel.is_designed()) throw std::invalid_argument("embed_coefficients: kernel is not designed-mercer");
  if (!same_spectrum(*kernel.spectral(), spec)) {
    throw std::invalid_argument("embed_coefficients: model kernel does not use this spectral model");
  }
  const Eigen::MatrixXd e = spec.basis_matrix(model.train_x());
  Eigen::MatrixXd c = e.transpose() * model.weights();
  c = spec.eigenvalues().asDiagonal() * c;
  return CoefficientMatrix(std::move(c));
}

double gamma_error(const CoefficientMatrix& chat, const TargetSpec& target, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma_error: gamma must lie in [0, 1]");
  if (!(gamma < target.beta)) throw std::invalid_argument("gamma_error: gamma must be below the target's beta");
  check_target_shape(chat, target);
  const auto& mu = target.model->eigenvalues();
  const Eigen::VectorXd row_sq = (chat.values() - target.coeffs.values()).rowwise().squaredNorm();
  double s = 0.0;
  for (Eigen::Index i = 0; i < row_sq.size(); ++i) s += row_sq[i] * std::pow(mu[i], -gamma);
  return s;
}

CoefficientMatrix population_coefficients(const TargetSpec& target, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("population_coefficients: lambda must be positive");
  const auto& mu = target.model->eigenvalues();
  Eigen::MatrixXd c = target.coeffs.values();
  for (Eigen::Index i = 0; i < c.rows(); ++i) c.row(i) *= mu[i] / (mu[i] + lambda);
  return CoefficientMatrix(std::move(c));
}

double bias_oracle(const TargetSpec& target, double lambda, double gamma) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("bias_oracle: lambda must be positive");
  if (!(gamma >= 0.0 && gamma <= target.beta)) throw std::invalid_argument("bias_oracle: gamma must lie in [0, beta]");
  const auto& mu = target.model->eigenvalues();
  const Eigen::VectorXd row_sq = target.coeffs.values().rowwise().squaredNorm();
  double s = 0.0;
  for (Eigen::Index i = 0; i < row_sq.size(); ++i) {
    const double shrink = lambda / (lambda + mu[i]);
    s += row_sq[i] * shrink * shrink * std::pow(mu[i], -gamma);
  }
  return s;
}

TargetSpec transform_target(const TargetSpec& target, const Eigen::MatrixXd& output_sqrt) {
  if (static_cast<std::size_t>(output_sqrt.rows()) != target.output_dim() || output_sqrt.rows() != output_sqrt.cols()) {
    throw DimensionError("transform_target: output factor dimension mismatch");
  }
  TargetSpec out = target;
  out.coeffs = CoefficientMatrix(target.coeffs.values() * output_sqrt);
  return out;
}

double lambda_schedule(std::size_t n, const ScheduleParams& params) {
  if (n < 2) throw std::invalid_argument("lambda_schedule: n must be at least 2");
  if (!(params.p > 0.0 && params.p <= 1.0)) throw std::invalid_argument("lambda_schedule: p must lie in (0, 1]");
  if (!(params.beta > 0.0 && params.beta <= 2.0)) throw std::invalid_argument("lambda_schedule: beta must lie in (0, 2]");
  if (!(params.alpha >= params.p && params.alpha <= 1.0)) {
    throw std::invalid_argument("lambda_schedule: alpha must lie in [p, 1]");
  }
  if (!(params.theta > 1.0)) throw std::invalid_argument("lambda_schedule: theta must exceed 1");
  if (!(params.c0 > 0.0)) throw std::invalid_argument("lambda_schedule: c0 must be positive");
  const double nd = static_cast<double>(n);
  if (params.beta + params.p > params.alpha) return params.c0 * std::pow(nd, -1.0 / (params.beta + params.p));
  const double effective = nd / std::pow(std::log(nd), params.theta);
  return params.c0 * std::pow(effective, -1.0 / params.alpha);
}

double theory_exponent(double beta, double gamma, double p, double alpha) {
  return (beta - gamma) / std::max(alpha, beta + p);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double fit_rate(const std::vector<std::size_t>& ns, const std::vector<double>& median_errors) {
  if (ns.size() != median_errors.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (ns.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 sample sizes");
  std::vector<double> log_n, log_e;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (k > 0 && ns[k] <= ns[k - 1]) throw std::invalid_argument("fit_rate: sample sizes must be strictly increasing");
    if (!(median_errors[k] > 0.0) || !std::isfinite(median_errors[k])) {
      throw std::invalid_argument("fit_rate: errors must be positive and finite");
    }
    log_n.push_back(std::log(static_cast<double>(ns[k])));
    log_e.push_back(std::log(median_errors[k]));
  }
  return ols_slope(log_n, log_e);
}

namespace {

template <class Target>
double mc_error(const FittedModel& model, const Target& target, std::size_t n_test, std::uint64_t seed) {
  if (n_test == 0) throw std::invalid_argument("monte_carlo_l2_error: n_test must be positive");
  if (model.output_dim() != target.output_dim()) throw DimensionError("model and target output dimensions differ");
  auto rng = make_rng(seed, 0x6d63ULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr std::size_t kBlock = 4096;
  double total = 0.0;
  for (std::size_t start = 0; start < n_test; start += kBlock) {
    const std::size_t len = std::min(kBlock, n_test - start);
    Eigen::VectorXd xs(static_cast<Eigen::Index>(len));
    for (auto& v : xs) v = unif(rng);
    Eigen::MatrixXd reference = eval_target(target, xs);
    if (const auto& root = model.output_sqrt()) reference = reference * *root;
    total += (predict(model, xs) - reference).squaredNorm();
  }
  return total / static_cast<double>(n_test);
}

}  // namespace

double monte_carlo_l2_error(const FittedModel& model, const TargetSpec& target, std::size_t n_test,
                            std::uint64_t seed) {
  return mc_error(model, target, n_test, seed);
}

double monte_carlo_l2_error(const FittedModel& model, const SectionTarget& target, std::size_t n_test,
                            std::uint64_t seed) {
  return mc_error(model, target, n_test, seed);
}

namespace {

ErrorPath select_path(const RateExperiment& ex) {
  if (const auto* t = std::get_if<TargetSpec>(&ex.target)) {
    if (ex.kernel.is_designed() && same_spectrum(*ex.kernel.spectral(), *t->model)) return ErrorPath::exact_gamma;
  }
  return ErrorPath::monte_carlo_l2;
}

void validate(const RateExperiment& ex, ErrorPath path) {
  if (ex.ns.size() < 4) throw std::invalid_argument("rate experiment needs at least 4 sample sizes");
  for (std::size_t k = 0; k < ex.ns.size(); ++k) {
    if (ex.ns[k] < 2) throw std::invalid_argument("rate experiment sample sizes must be >= 2");
    if (k > 0 && ex.ns[k] <= ex.ns[k - 1]) throw std::invalid_argument("rate experiment sample sizes must increase");
  }
  if (ex.n_seeds == 0) throw std::invalid_argument("rate experiment needs at least one seed");
  if (!(ex.tolerance > 0.0)) throw std::invalid_argument("rate experiment tolerance must be positive");
  if (ex.fixed_lambda && !(*ex.fixed_lambda > 0.0)) throw std::invalid_argument("fixed lambda must be positive");
  const std::size_t d_y = std::visit([](const auto& t) { return t.output_dim(); }, ex.target);
  if (ex.noise.output_dim() != d_y) throw DimensionError("noise and target output dimensions differ");
  if (path == ErrorPath::monte_carlo_l2 && ex.gamma != 0.0) {
    throw std::invalid_argument("gamma > 0 needs a designed-mercer kernel matching the target's spectrum");
  }
  if (const auto* t = std::get_if<TargetSpec>(&ex.target); t && path == ErrorPath::exact_gamma) {
    if (!(ex.gamma >= 0.0 && ex.gamma <= 1.0 && ex.gamma < t->beta)) {
      throw std::invalid_argument("gamma must lie in [0, 1] and below beta");
    }
  }
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

RateReport run_rate_experiment(const RateExperiment& ex) {
  const ErrorPath path = select_path(ex);
  validate(ex, path);

  RateReport report;
  report.config_id = ex.config_id;
  report.path = path;
  report.ns = ex.ns;
  report.tolerance = ex.tolerance;
  report.theory_exponent = ex.expected_exponent.value_or(
      theory_exponent(ex.schedule.beta, ex.gamma, ex.schedule.p, ex.schedule.alpha));
  for (std::size_t n : ex.ns) report.lambdas.push_back(ex.fixed_lambda.value_or(lambda_schedule(n, ex.schedule)));

  const auto n_sizes = ex.ns.size();
  report.errors.resize(static_cast<Eigen::Index>(n_sizes), static_cast<Eigen::Index>(ex.n_seeds));

  parallel_for(n_sizes * ex.n_seeds, ex.workers, [&](std::size_t cell) {
    const std::size_t k = cell / ex.n_seeds;
    const std::size_t s = cell % ex.n_seeds;
    const std::size_t n = ex.ns[k];
    const std::uint64_t cell_seed = derive_seed(ex.master_seed, (static_cast<std::uint64_t>(n) << 20) | s);
    const double lambda = report.lambdas[k];
    double err = 0.0;
    std::visit(
        [&](const auto& target) {
          const Dataset data = sample_dataset(target, ex.noise, n, cell_seed);
          const FittedModel model = fit(ex.kernel, data, lambda);
          using T = std::decay_t<decltype(target)>;
          if constexpr (std::is_same_v<T, TargetSpec>) {
            if (path == ErrorPath::exact_gamma) {
              err = gamma_error(embed_coefficients(model, *target.model), target, ex.gamma);
              return;
            }
          }
          err = monte_carlo_l2_error(model, target, ex.n_test, derive_seed(cell_seed, 1));
        },
        ex.target);
    report.errors(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)) = err;
  });

  for (std::size_t k = 0; k < n_sizes; ++k) {
    const auto row = report.errors.row(static_cast<Eigen::Index>(k));
    report.medians.push_back(median(std::vector<double>(row.begin(), row.end())));
  }
  report.fitted_slope = fit_rate(report.ns, report.medians);
  report.pass = std::abs(report.fitted_slope + report.theory_exponent) <= report.tolerance;
  return report;
}

}  // namespace vvkrr
