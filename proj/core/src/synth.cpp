#include "vvkrr/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vvkrr/errors.hpp"
#include "vvkrr/rng.hpp"
#include "vvkrr/spectral.hpp"

namespace vvkrr {

namespace {

constexpr double kCoefficientDecay = 0.55;
constexpr double kBoundarySlack = 0.2;

double random_sign(std::mt19937_64& rng) {
  return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
}

Eigen::VectorXd uniform_inputs(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = unif(rng);
  return x;
}

}  // namespace

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::generic: return "generic";
    case TargetKind::boundary: return "boundary";
    case TargetKind::single_channel: return "single-channel";
  }
  return "unknown";
}

TargetKind target_kind_from_string(std::string_view name) {
  if (name == "generic") return TargetKind::generic;
  if (name == "boundary") return TargetKind::boundary;
  if (name == "single-channel") return TargetKind::single_channel;
  throw std::invalid_argument("unknown target kind '" + std::string(name) +
                              "' (expected generic, boundary or single-channel)");
}

TargetSpec make_target(std::shared_ptr<const SpectralModel> model, double beta, double bound, std::size_t d_y,
                       TargetKind kind, std::uint64_t seed) {
  if (!model) throw std::invalid_argument("make_target: missing spectral model");
  if (!(beta > 0.0 && beta <= 2.0)) {
    throw std::invalid_argument("make_target: beta must lie in (0, 2], got " + std::to_string(beta));
  }
  if (!(bound > 0.0) || !std::isfinite(bound)) throw std::invalid_argument("make_target: bound must be positive");
  if (d_y == 0) throw std::invalid_argument("make_target: output dimension must be positive");

  const auto rows = static_cast<Eigen::Index>(model->size());
  const auto cols = static_cast<Eigen::Index>(d_y);
  auto rng = make_rng(seed, 0x746172676574ULL);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  const Eigen::Index used_cols = kind == TargetKind::generic ? cols : 1;
  for (Eigen::Index j = 0; j < used_cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      a(i, j) = random_sign(rng) * std::pow(static_cast<double>(i + 1), -kCoefficientDecay) *
                std::pow(static_cast<double>(j + 1), -kCoefficientDecay);
    }
  }
  a *= bound / a.norm();

  const auto& mu = model->eigenvalues();
  Eigen::MatrixXd c = a;
  for (Eigen::Index i = 0; i < rows; ++i) c.row(i) *= std::pow(mu[i], beta / 2.0);

  TargetSpec target{std::move(model), CoefficientMatrix(std::move(c)), beta, bound, kind};
  const double achieved = gamma_norm(*target.model, target.coeffs, beta);
  if (achieved > bound * (1.0 + 1e-12)) {
    throw std::logic_error("make_target: source condition certification failed");
  }
  if (kind == TargetKind::boundary) {
    const auto cert = boundary_certificate(target);
    if (!cert.pass) {
      throw std::invalid_argument("make_target: boundary target is not certified at this truncation (tail fraction " +
                                  std::to_string(cert.tail_fraction) + ")");
    }
  }
  return target;
}

BoundaryCertificate boundary_certificate(const TargetSpec& target) {
  const auto& mu = target.model->eigenvalues();
  const double gamma = target.beta + kBoundarySlack;
  const Eigen::VectorXd row_sq = target.coeffs.values().rowwise().squaredNorm();
  const Eigen::Index m = row_sq.size();
  double head = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double term = row_sq[i] * std::pow(mu[i], -gamma);
    total += term;
    if (i < m / 2) head += term;
  }
  BoundaryCertificate cert;
  cert.norm_ratio = std::sqrt(total) / target.norm_bound;
  cert.tail_fraction = total > 0.0 ? (total - head) / total : 0.0;
  cert.pass = m >= 16 && cert.tail_fraction >= 0.05 && cert.norm_ratio > 1.0;
  return cert;
}

Eigen::VectorXd eval_target(const TargetSpec& target, double x) {
  Eigen::VectorXd q(1);
  q[0] = x;
  return eval_target(target, q).row(0).transpose();
}

Eigen::MatrixXd eval_target(const TargetSpec& target, const Eigen::Ref<const Eigen::VectorXd>& xs) {
  for (Eigen::Index s = 0; s < xs.size(); ++s) {
    if (!(xs[s] >= 0.0 && xs[s] <= 1.0)) throw DomainError("eval_target: input outside [0, 1]");
  }
  return target.model->basis_matrix(xs) * target.coeffs.values();
}

SectionTarget make_section_target(const KernelSpec& kernel, std::size_t n_nodes, std::size_t d_y, double norm_bound,
                                  std::uint64_t seed) {
  if (n_nodes == 0 || d_y == 0) throw std::invalid_argument("make_section_target: empty node set or output");
  if (!(norm_bound > 0.0)) throw std::invalid_argument("make_section_target: norm bound must be positive");
  SectionTarget target{kernel, Eigen::VectorXd(static_cast<Eigen::Index>(n_nodes)),
                       Eigen::MatrixXd(static_cast<Eigen::Index>(n_nodes), static_cast<Eigen::Index>(d_y)), norm_bound};
  for (Eigen::Index k = 0; k < target.nodes.size(); ++k) {
    target.nodes[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(n_nodes);
  }
  auto rng = make_rng(seed, 0x73656374696f6eULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < target.weights.cols(); ++j) {
    for (Eigen::Index k = 0; k < target.weights.rows(); ++k) target.weights(k, j) = normal(rng);
  }
  target.weights *= norm_bound / rkhs_norm(target);
  return target;
}

double rkhs_norm(const SectionTarget& target) {
  const Eigen::MatrixXd k = gram_matrix(target.kernel, target.nodes);
  return std::sqrt((target.weights.transpose() * k * target.weights).trace());
}

Eigen::VectorXd eval_target(const SectionTarget& target, double x) {
  return target.weights.transpose() * cross_vector(target.kernel, target.nodes, x);
}

Eigen::MatrixXd eval_target(const SectionTarget& target, const Eigen::Ref<const Eigen::VectorXd>& xs) {
  return cross_matrix(target.kernel, target.nodes, xs) * target.weights;
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian_iso: return "gaussian-iso";
    case NoiseKind::bounded_sphere: return "bounded-sphere";
    case NoiseKind::rank_one_gaussian: return "rank-one-gaussian";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(std::string_view name) {
  if (name == "gaussian-iso") return NoiseKind::gaussian_iso;
  if (name == "bounded-sphere") return NoiseKind::bounded_sphere;
  if (name == "rank-one-gaussian") return NoiseKind::rank_one_gaussian;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) +
                              "' (expected gaussian-iso, bounded-sphere or rank-one-gaussian)");
}

namespace {

void check_noise_scale(double sigma_bar) {
  if (!(sigma_bar >= 0.0) || !std::isfinite(sigma_bar)) {
    throw std::invalid_argument("noise scale must be finite and nonnegative");
  }
}

}  // namespace

NoiseSpec NoiseSpec::gaussian_iso(double sigma_bar, std::size_t d_y) {
  check_noise_scale(sigma_bar);
  if (d_y == 0) throw std::invalid_argument("noise output dimension must be positive");
  NoiseSpec s;
  s.kind_ = NoiseKind::gaussian_iso;
  s.scale_ = sigma_bar;
  s.d_y_ = d_y;
  return s;
}

NoiseSpec NoiseSpec::bounded_sphere(double sigma_bar, std::size_t d_y) {
  NoiseSpec s = gaussian_iso(sigma_bar, d_y);
  s.kind_ = NoiseKind::bounded_sphere;
  return s;
}

NoiseSpec NoiseSpec::rank_one_gaussian(double sigma_bar, Eigen::VectorXd direction) {
  check_noise_scale(sigma_bar);
  const double norm = direction.norm();
  if (direction.size() == 0 || !(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("rank-one noise direction must be a nonzero finite vector");
  }
  NoiseSpec s;
  s.kind_ = NoiseKind::rank_one_gaussian;
  s.scale_ = sigma_bar;
  s.d_y_ = static_cast<std::size_t>(direction.size());
  s.direction_ = direction / norm;
  return s;
}

Eigen::MatrixXd NoiseSpec::sample(std::size_t n, std::mt19937_64& rng) const {
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(d_y_);
  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(rows, cols);
  if (scale_ == 0.0) return eps;
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (kind_) {
    case NoiseKind::gaussian_iso: {
      const double per_channel = scale_ / std::sqrt(static_cast<double>(d_y_));
      for (Eigen::Index t = 0; t < rows; ++t) {
        for (Eigen::Index j = 0; j < cols; ++j) eps(t, j) = per_channel * normal(rng);
      }
      break;
    }
    case NoiseKind::bounded_sphere: {
      Eigen::VectorXd g(cols);
      for (Eigen::Index t = 0; t < rows; ++t) {
        double norm = 0.0;
        while (!(norm > 0.0)) {
          for (auto& v : g) v = normal(rng);
          norm = g.norm();
        }
        eps.row(t) = (scale_ / norm) * g.transpose();
      }
      break;
    }
    case NoiseKind::rank_one_gaussian:
      for (Eigen::Index t = 0; t < rows; ++t) eps.row(t) = (scale_ * normal(rng)) * direction_.transpose();
      break;
  }
  return eps;
}

namespace {

template <class Target>
Dataset sample_from(const Target& target, const NoiseSpec& noise, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_dataset: n must be positive");
  if (noise.output_dim() != target.output_dim()) {
    throw DimensionError("noise dimension does not match the target's output dimension");
  }
  auto rng = make_rng(seed, 0x64617461ULL);
  Dataset data;
  data.x = uniform_inputs(n, rng);
  data.y = eval_target(target, data.x);
  data.y += noise.sample(n, rng);
  return data;
}

// E||eps||^q in closed form.
double exact_moment(const NoiseSpec& noise, int q) {
  const double s = noise.scale();
  const double qd = static_cast<double>(q);
  switch (noise.kind()) {
    case NoiseKind::bounded_sphere:
      return std::pow(s, qd);
    case NoiseKind::rank_one_gaussian:
      return std::pow(s, qd) * std::exp(0.5 * qd * std::numbers::ln2 + std::lgamma(0.5 * (qd + 1.0))) /
             std::sqrt(std::numbers::pi);
    case NoiseKind::gaussian_iso: {
      const double d = static_cast<double>(noise.output_dim());
      return std::pow(s, qd) *
             std::exp(0.5 * qd * std::log(2.0 / d) + std::lgamma(0.5 * (d + qd)) - std::lgamma(0.5 * d));
    }
  }
  return 0.0;
}

}  // namespace

Dataset sample_dataset(const TargetSpec& target, const NoiseSpec& noise, std::size_t n, std::uint64_t seed) {
  return sample_from(target, noise, n, seed);
}

Dataset sample_dataset(const SectionTarget& target, const NoiseSpec& noise, std::size_t n, std::uint64_t seed) {
  return sample_from(target, noise, n, seed);
}

MomCertificate certify_mom(const NoiseSpec& noise, int q_max, std::size_t n_mc, std::uint64_t seed) {
  if (q_max < 2) throw std::invalid_argument("certify_mom: q_max must be at least 2");
  if (n_mc == 0) throw std::invalid_argument("certify_mom: need at least one Monte Carlo draw");
  MomCertificate cert;
  const double c = noise.kind() == NoiseKind::bounded_sphere ? 2.0 : 1.0;
  cert.sigma = c * noise.scale();
  cert.r = c * noise.scale();

  auto rng = make_rng(seed, 0x6d6f6dULL);
  const Eigen::MatrixXd eps = noise.sample(n_mc, rng);
  const Eigen::VectorXd norms = eps.rowwise().norm();

  cert.pass = true;
  double factorial = 1.0;
  for (int q = 2; q <= q_max; ++q) {
    factorial = q == 2 ? 2.0 : factorial * q;
    const double qd = static_cast<double>(q);
    const double empirical = norms.array().pow(qd).mean();
    const double bound = 0.5 * factorial * cert.sigma * cert.sigma * std::pow(cert.r, qd - 2.0);
    const double exact = exact_moment(noise, q);
    cert.orders.push_back(q);
    cert.empirical.push_back(empirical);
    cert.exact.push_back(exact);
    cert.bound.push_back(bound);
    if (!(empirical <= 1.1 * bound) || !(exact <= bound * (1.0 + 1e-12))) cert.pass = false;
  }
  return cert;
}

}  // namespace vvkrr
