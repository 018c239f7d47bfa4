#include "vvkrr/synth.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vvkrr/rng.hpp"
#include "vvkrr/spectral.hpp"

namespace vvkrr {
namespace {

std::shared_ptr<const SpectralModel> decay_model(double p, std::size_t size) {
  return std::make_shared<const SpectralModel>(SpectralModel::from_decay(p, size));
}

TEST(MakeTargetTest, SingleCoefficient) {
  auto model = std::make_shared<const SpectralModel>(SpectralModel::from_eigenvalues({1.0}));
  const auto t = make_target(model, 1.0, 3.0, 2, TargetKind::single_channel, 5);
  EXPECT_DOUBLE_EQ(std::abs(t.coeffs(0, 0)), 3.0);
  EXPECT_DOUBLE_EQ(t.coeffs(0, 1), 0.0);
  EXPECT_NEAR(gamma_norm(*model, t.coeffs, 1.0), 3.0, 1e-14);
  const auto v = eval_target(t, 0.77);
  EXPECT_DOUBLE_EQ(std::abs(v[0]), 3.0);
  EXPECT_DOUBLE_EQ(v[1], 0.0);
}

TEST(MakeTargetTest, GenericNormIsExactlyTheBound) {
  for (double beta : {0.3, 1.0, 2.0}) {
    for (std::size_t d_y : {1u, 4u, 16u}) {
      auto model = decay_model(0.5, 512);
      const auto t = make_target(model, beta, 2.5, d_y, TargetKind::generic, 17);
      EXPECT_NEAR(gamma_norm(*model, t.coeffs, beta), 2.5, 1e-10);
      EXPECT_EQ(t.output_dim(), d_y);
    }
  }
}

TEST(MakeTargetTest, GenericStructureMatchesConstruction) {
  auto model = decay_model(0.5, 64);
  const auto t = make_target(model, 1.0, 1.0, 3, TargetKind::generic, 1);
  // |a_ij| is proportional to i^-0.55 j^-0.55 with a_ij = c_ij mu_i^-1/2.
  const double ref = std::abs(t.coeffs(0, 0));
  for (Eigen::Index i = 0; i < 64; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double a = std::abs(t.coeffs(i, j)) / std::sqrt(model->eigenvalue(i));
      EXPECT_NEAR(a / ref, std::pow(i + 1.0, -0.55) * std::pow(j + 1.0, -0.55), 1e-12);
    }
  }
}

TEST(MakeTargetTest, RejectsOutOfRange) {
  auto model = decay_model(0.5, 32);
  EXPECT_THROW(make_target(model, 0.0, 1.0, 2, TargetKind::generic, 0), std::invalid_argument);
  EXPECT_THROW(make_target(model, 2.5, 1.0, 2, TargetKind::generic, 0), std::invalid_argument);
  EXPECT_THROW(make_target(model, 1.0, 0.0, 2, TargetKind::generic, 0), std::invalid_argument);
  EXPECT_THROW(make_target(model, 1.0, 1.0, 0, TargetKind::generic, 0), std::invalid_argument);
}

TEST(BoundaryTargetTest, CertificateMatchesDirectSummation) {
  auto model = decay_model(0.5, 512);
  const auto t = make_target(model, 1.0, 1.0, 4, TargetKind::boundary, 3);
  // Independent summation: a_i = i^-0.55 rescaled to unit norm; the 1.2-norm
  // squared is sum a_i^2 mu_i^-0.2 = sum i^-1.1 i^0.4.
  double norm_a = 0.0, head = 0.0, total = 0.0;
  for (int i = 1; i <= 512; ++i) norm_a += std::pow(i, -1.1);
  for (int i = 1; i <= 512; ++i) {
    const double term = std::pow(i, -1.1) / norm_a * std::pow(static_cast<double>(i), 0.4);
    total += term;
    if (i <= 256) head += term;
  }
  const auto cert = boundary_certificate(t);
  EXPECT_NEAR(cert.norm_ratio, std::sqrt(total), 1e-10);
  EXPECT_NEAR(cert.tail_fraction, 1.0 - head / total, 1e-10);
  EXPECT_TRUE(cert.pass);
  EXPECT_NEAR(gamma_norm(*model, t.coeffs, 1.0), 1.0, 1e-12);
}

TEST(BoundaryTargetTest, MisspecifiedNormGrowsWithTruncation) {
  double prev = 0.0;
  for (std::size_t size : {128u, 256u, 512u}) {
    auto model = decay_model(0.5, size);
    const auto t = make_target(model, 0.5, 1.0, 2, TargetKind::boundary, 9);
    const double norm1 = gamma_norm(*model, t.coeffs, 1.0);
    EXPECT_GT(norm1, prev);
    prev = norm1;
  }
}

TEST(BoundaryTargetTest, RejectsTooSmallTruncation) {
  auto model = decay_model(0.5, 8);
  EXPECT_THROW(make_target(model, 1.0, 1.0, 2, TargetKind::boundary, 0), std::invalid_argument);
}

TEST(EvalTargetTest, CosineZeroAndDomain) {
  auto model = std::make_shared<const SpectralModel>(SpectralModel::from_eigenvalues({1.0, 1.0}));
  TargetSpec t{model, CoefficientMatrix(Eigen::MatrixXd::Zero(2, 1)), 1.0, 1.0, TargetKind::generic};
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 1);
  c(1, 0) = 1.0;
  t.coeffs = CoefficientMatrix(c);
  EXPECT_NEAR(eval_target(t, 0.5)[0], 0.0, 1e-15);
  EXPECT_NEAR(eval_target(t, 0.0)[0], std::sqrt(2.0), 1e-15);
  EXPECT_THROW(eval_target(t, 1.01), std::domain_error);
}

TEST(EvalTargetTest, MonteCarloMatchesL2Norm) {
  auto model = decay_model(0.5, 128);
  const auto t = make_target(model, 1.0, 1.0, 3, TargetKind::generic, 2);
  const double exact = gamma_norm(*model, t.coeffs, 0.0);
  auto rng = make_rng(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd xs(100000);
  for (auto& x : xs) x = unif(rng);
  const double mc = eval_target(t, xs).rowwise().squaredNorm().mean();
  EXPECT_NEAR(mc / (exact * exact), 1.0, 1e-2);
  for (Eigen::Index s = 0; s < 200; ++s) {
    EXPECT_LE((eval_target(t, xs[s]) - testing::coefficient_function(t.coeffs.values(), xs[s])).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(SectionTargetTest, NormAndEvaluation) {
  const auto k = KernelSpec::matern(MaternOrder::half);
  const auto t = make_section_target(k, 200, 3, 1.5, 4);
  EXPECT_NEAR(rkhs_norm(t), 1.5, 1e-10);
  EXPECT_DOUBLE_EQ(t.nodes[0], 0.5 / 200.0);
  Eigen::VectorXd direct = Eigen::VectorXd::Zero(3);
  for (Eigen::Index k_ = 0; k_ < 200; ++k_) direct += t.weights.row(k_).transpose() * std::exp(-std::abs(t.nodes[k_] - 0.3));
  EXPECT_LE((eval_target(t, 0.3) - direct).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NoiseTest, NoiselessDataIsExact) {
  auto model = decay_model(0.5, 64);
  const auto t = make_target(model, 1.0, 1.0, 2, TargetKind::generic, 1);
  const auto d = sample_dataset(t, NoiseSpec::gaussian_iso(0.0, 2), 100, 3);
  EXPECT_TRUE(d.y == eval_target(t, d.x));
}

TEST(NoiseTest, RankOneStaysInSpan) {
  auto model = decay_model(0.5, 64);
  const auto t = make_target(model, 1.0, 1.0, 3, TargetKind::generic, 1);
  Eigen::VectorXd dir(3);
  dir << 1.0, 2.0, -2.0;
  const auto noise = NoiseSpec::rank_one_gaussian(1.0, dir);
  EXPECT_NEAR(noise.direction().norm(), 1.0, 1e-15);
  const auto d = sample_dataset(t, noise, 500, 5);
  const Eigen::MatrixXd eps = d.y - eval_target(t, d.x);
  const Eigen::VectorXd u = noise.direction();
  for (Eigen::Index s = 0; s < eps.rows(); ++s) {
    const Eigen::VectorXd e = eps.row(s).transpose();
    EXPECT_LE((e - u * u.dot(e)).norm(), 1e-12);
  }
  EXPECT_THROW(NoiseSpec::rank_one_gaussian(1.0, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(NoiseTest, TotalVarianceAndSphereRadius) {
  auto rng = make_rng(8);
  const Eigen::MatrixXd g = NoiseSpec::gaussian_iso(1.0, 4).sample(100000, rng);
  EXPECT_NEAR(g.rowwise().squaredNorm().mean(), 1.0, 0.02);
  const Eigen::MatrixXd s = NoiseSpec::bounded_sphere(0.7, 5).sample(1000, rng);
  for (Eigen::Index t = 0; t < s.rows(); ++t) EXPECT_NEAR(s.row(t).norm(), 0.7, 1e-12);
  EXPECT_THROW(NoiseSpec::gaussian_iso(-1.0, 2), std::invalid_argument);
  EXPECT_THROW(NoiseSpec::gaussian_iso(1.0, 0), std::invalid_argument);
}

TEST(NoiseTest, CenteredWithinFiveStandardErrors) {
  Eigen::VectorXd dir = Eigen::VectorXd::Ones(3);
  const std::vector<NoiseSpec> kinds{NoiseSpec::gaussian_iso(1.0, 3), NoiseSpec::bounded_sphere(1.0, 3),
                                     NoiseSpec::rank_one_gaussian(1.0, dir)};
  for (const auto& noise : kinds) {
    auto rng = make_rng(11);
    const Eigen::MatrixXd e = noise.sample(1000000, rng);
    const Eigen::RowVectorXd mean = e.colwise().mean();
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      const double sd = std::sqrt((e.col(j).array() - mean[j]).square().mean());
      EXPECT_LE(std::abs(mean[j]), 5.0 * sd / 1000.0) << to_string(noise.kind());
    }
  }
}

TEST(SampleDatasetTest, Reproducible) {
  auto model = decay_model(0.5, 64);
  const auto t = make_target(model, 1.0, 1.0, 2, TargetKind::generic, 1);
  const auto noise = NoiseSpec::gaussian_iso(0.5, 2);
  const auto a = sample_dataset(t, noise, 300, 42);
  const auto b = sample_dataset(t, noise, 300, 42);
  const auto c = sample_dataset(t, noise, 300, 43);
  EXPECT_TRUE(a.x == b.x);
  EXPECT_TRUE(a.y == b.y);
  EXPECT_EQ((a.x.array() == c.x.array()).count(), 0);
  EXPECT_EQ((a.y.array() == c.y.array()).count(), 0);
  EXPECT_GE(a.x.minCoeff(), 0.0);
  EXPECT_LT(a.x.maxCoeff(), 1.0);
}

TEST(MomTest, Examples) {
  const auto sphere = certify_mom(NoiseSpec::bounded_sphere(1.0, 4), 2, 10000, 1);
  EXPECT_TRUE(sphere.pass);
  EXPECT_DOUBLE_EQ(sphere.sigma, 2.0);
  EXPECT_DOUBLE_EQ(sphere.r, 2.0);
  EXPECT_DOUBLE_EQ(sphere.exact[0], 1.0);
  EXPECT_DOUBLE_EQ(sphere.bound[0], 4.0);

  const auto rank_one = certify_mom(NoiseSpec::rank_one_gaussian(1.0, Eigen::VectorXd::Ones(2)), 4, 100000, 2);
  EXPECT_TRUE(rank_one.pass);
  EXPECT_DOUBLE_EQ(rank_one.exact.back(), 3.0);
  EXPECT_DOUBLE_EQ(rank_one.bound.back(), 12.0);

  const auto one = certify_mom(NoiseSpec::gaussian_iso(1.0, 4), 6, 10000, 3);
  const auto two = certify_mom(NoiseSpec::gaussian_iso(2.0, 4), 6, 10000, 3);
  EXPECT_DOUBLE_EQ(two.sigma, 2.0 * one.sigma);
  EXPECT_DOUBLE_EQ(two.r, 2.0 * one.r);
  EXPECT_THROW(certify_mom(NoiseSpec::gaussian_iso(1.0, 4), 1, 100, 0), std::invalid_argument);
}

TEST(KindNamesTest, RoundTrip) {
  for (auto k : {TargetKind::generic, TargetKind::boundary, TargetKind::single_channel})
    EXPECT_EQ(target_kind_from_string(to_string(k)), k);
  for (auto k : {NoiseKind::gaussian_iso, NoiseKind::bounded_sphere, NoiseKind::rank_one_gaussian})
    EXPECT_EQ(noise_kind_from_string(to_string(k)), k);
  EXPECT_THROW(target_kind_from_string("nope"), std::invalid_argument);
}

}  // namespace
}  // namespace vvkrr
