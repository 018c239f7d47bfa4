#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vvkrr/estimator.hpp"
#include "vvkrr/kernel.hpp"
#include "vvkrr/spectral_model.hpp"

namespace vvkrr {

enum class TargetKind { generic, boundary, single_channel };

std::string_view to_string(TargetKind kind);
TargetKind target_kind_from_string(std::string_view name);

/// Regression function F_* = sum_ij c_ij d_j e_i with certified source
/// condition ||F_*||_beta <= norm_bound.
struct TargetSpec {
  std::shared_ptr<const SpectralModel> model;
  CoefficientMatrix coeffs;
  double beta = 1.0;
  double norm_bound = 1.0;
  TargetKind kind = TargetKind::generic;

  std::size_t output_dim() const { return coeffs.output_dim(); }
};

// Builds c_ij = a_ij mu_i^{beta/2} with ||a||_2 = bound:
//   generic:        a_ij = s_ij i^-0.55 j^-0.55 (random signs s_ij)
//   single_channel: a_i1 = s_i i^-0.55, other channels zero
//   boundary:       as single_channel, additionally certified to have no
//                   smoothness beyond beta + 0.2 (see boundary_certificate)
// i, j are 1-based. Requires beta in (0, 2], bound > 0, d_y >= 1.
TargetSpec make_target(std::shared_ptr<const SpectralModel> model, double beta, double bound, std::size_t d_y,
                       TargetKind kind, std::uint64_t seed);

struct BoundaryCertificate {
  double norm_ratio = 0.0;     // ||F||_{beta+0.2} / bound
  double tail_fraction = 0.0;  // share of ||F||^2_{beta+0.2} carried by the upper half of indices
  bool pass = false;
};

// The (beta+0.2)-series must still be accumulating mass at the truncation
// point: tail_fraction >= 0.05 and norm_ratio > 1.
BoundaryCertificate boundary_certificate(const TargetSpec& target);

Eigen::VectorXd eval_target(const TargetSpec& target, double x);
// Row s is F_*(xs[s]).
Eigen::MatrixXd eval_target(const TargetSpec& target, const Eigen::Ref<const Eigen::VectorXd>& xs);

/// Target for black-box kernels: F_*(x) = sum_k w_k k(z_k, x) on equispaced
/// nodes z_k = (k + 1/2) / M, so F_* lies in the RKHS of `kernel` with
/// ||F_*||_G = norm_bound.
struct SectionTarget {
  KernelSpec kernel;
  Eigen::VectorXd nodes;
  Eigen::MatrixXd weights;  // M x d_y
  double norm_bound = 1.0;

  std::size_t output_dim() const { return static_cast<std::size_t>(weights.cols()); }
};

SectionTarget make_section_target(const KernelSpec& kernel, std::size_t n_nodes, std::size_t d_y, double norm_bound,
                                  std::uint64_t seed);
// sqrt(trace(W^T K_ZZ W)).
double rkhs_norm(const SectionTarget& target);

Eigen::VectorXd eval_target(const SectionTarget& target, double x);
Eigen::MatrixXd eval_target(const SectionTarget& target, const Eigen::Ref<const Eigen::VectorXd>& xs);

enum class NoiseKind { gaussian_iso, bounded_sphere, rank_one_gaussian };

std::string_view to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view name);

/// Additive noise with total scale sigma_bar. sigma_bar = 0 means noiseless.
class NoiseSpec {
 public:
  static NoiseSpec gaussian_iso(double sigma_bar, std::size_t d_y);
  static NoiseSpec bounded_sphere(double sigma_bar, std::size_t d_y);
  // `direction` is normalized; it must be nonzero.
  static NoiseSpec rank_one_gaussian(double sigma_bar, Eigen::VectorXd direction);

  NoiseKind kind() const { return kind_; }
  double scale() const { return scale_; }
  std::size_t output_dim() const { return d_y_; }
  const Eigen::VectorXd& direction() const { return direction_; }

  // n x d_y matrix of i.i.d. draws.
  Eigen::MatrixXd sample(std::size_t n, std::mt19937_64& rng) const;

 private:
  NoiseSpec() = default;

  NoiseKind kind_ = NoiseKind::gaussian_iso;
  double scale_ = 0.0;
  std::size_t d_y_ = 1;
  Eigen::VectorXd direction_;
};

// x_t ~ U[0,1] i.i.d., y_t = F_*(x_t) + eps_t.
Dataset sample_dataset(const TargetSpec& target, const NoiseSpec& noise, std::size_t n, std::uint64_t seed);
Dataset sample_dataset(const SectionTarget& target, const NoiseSpec& noise, std::size_t n, std::uint64_t seed);

struct MomCertificate {
  double sigma = 0.0;
  double r = 0.0;
  bool pass = false;
  std::vector<int> orders;
  std::vector<double> empirical;  // Monte Carlo E||eps||^q
  std::vector<double> exact;      // closed-form E||eps||^q
  std::vector<double> bound;      // q!/2 sigma^2 R^(q-2)
};

// Analytic Bernstein constants: sigma = R = 2 sigma_bar for bounded noise,
// sigma = R = sigma_bar for the gaussian kinds (E|Z|^q <= q!/2). The Monte
// Carlo moments must stay below 1.1 times the bound for q = 2..q_max.
MomCertificate certify_mom(const NoiseSpec& noise, int q_max, std::size_t n_mc, std::uint64_t seed);

}  // namespace vvkrr
