#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vvkrr/kernel.hpp"
#include "vvkrr/synth.hpp"

namespace vvkrr::cli {

/// Every parameter of one experiment. Defaults reproduce the well-specified
/// rate run: mu_i = i^-2, beta = 1, gamma = 0, d_y = 4, sigma_bar = 0.5.
struct ExperimentConfig {
  std::string config_id = "experiment";

  // [spectral]
  std::size_t spectral_size = 512;
  double p = 0.5;
  double decay_scale = 1.0;
  std::vector<double> eigenvalues;  // overrides the decay law when non-empty

  // [target]
  double beta = 1.0;
  double bound = 1.0;
  std::size_t d_y = 4;
  TargetKind target_kind = TargetKind::generic;
  std::uint64_t target_seed = 1;

  // [noise]
  NoiseKind noise_kind = NoiseKind::gaussian_iso;
  double sigma_bar = 0.5;
  std::vector<double> noise_direction;  // rank_one_gaussian; defaults to e_1

  // [kernel]
  KernelFamily kernel_family = KernelFamily::designed_mercer;
  double lengthscale = 1.0;
  double matern_nu = 0.5;
  std::size_t section_nodes = 400;

  // [schedule]
  double gamma = 0.0;
  std::optional<double> alpha;  // defaults to p
  double theta = 2.0;
  double c0 = 1.0;
  std::optional<double> fixed_lambda;

  // [experiment]
  std::vector<std::size_t> ns{64, 128, 256, 512, 1024, 2048, 4096};
  std::size_t n_seeds = 20;
  // Defaults to 0.12 for well-specified designed runs and 0.15 when the
  // target is misspecified (beta < 1 or boundary kind), gamma > 0, or the
  // kernel is not designed.
  std::optional<double> tolerance;
  std::optional<double> theory_exponent;
  std::uint64_t master_seed = 0;
  std::size_t n_test = 10000;
  std::string output_dir = "vvkrr-out";

  // [sweep] lambda grid for bias-check and edim
  double lambda_min = 1e-4;
  double lambda_max = 1.0;
  std::size_t lambda_points = 17;

  // [lowerbound]
  std::size_t trials = 1000;
  std::size_t pairs = 10;
  std::size_t mc_draws = 100000;
  std::vector<double> kl_sigmas{0.5, 1.0, 2.0};

  // [nystrom]
  std::size_t nystrom_points = 2000;

  double alpha_or_default() const { return alpha.value_or(p); }
  double tolerance_or_default() const;
};

/// All problems found in a config, reported together.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

using Override = std::pair<std::string, std::string>;

// Grammar: "key = value" lines grouped by "[section]" headers; '#' and ';'
// start comment lines. Top-level key: id. Sections and keys:
//   spectral:   size, p, scale, eigenvalues
//   target:     beta, bound, d_y, kind, seed
//   noise:      kind, sigma_bar, direction
//   kernel:     family, lengthscale, nu, nodes
//   schedule:   gamma, alpha, theta, c0, lambda
//   experiment: ns, n_seeds, tolerance, theory_exponent, master_seed, n_test, output_dir
//   sweep:      lambda_min, lambda_max, points
//   lowerbound: trials, pairs, mc_draws, sigmas
//   nystrom:    points
// Overrides use the dotted form ("target.beta") and win over file values.
// Throws ConfigError listing every unknown key, malformed value and range
// violation.
ExperimentConfig parse_config(std::string_view text, const std::vector<Override>& overrides = {});

// Canonical text that parses back to an identical config.
std::string echo_config(const ExperimentConfig& config);

// "key=value" -> {key, value}; throws std::invalid_argument without '='.
Override parse_override(std::string_view assignment);

}  // namespace vvkrr::cli
