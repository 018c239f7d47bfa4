#include "vvkrr/spectral.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vvkrr/rng.hpp"

namespace vvkrr {
namespace {

Eigen::VectorXd uniform_sample(std::size_t m, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(m));
  for (auto& v : x) v = unif(rng);
  return x;
}

TEST(SpectralModelTest, DecayLawAndOrdering) {
  const auto m = SpectralModel::from_decay(0.5, 10, 2.0);
  ASSERT_EQ(m.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_DOUBLE_EQ(m.eigenvalue(i), 2.0 * std::pow(static_cast<double>(i + 1), -2.0));
  }
  EXPECT_EQ(m.decay_p(), 0.5);
  EXPECT_THROW(SpectralModel::from_decay(0.0, 4), std::invalid_argument);
  EXPECT_THROW(SpectralModel::from_decay(1.5, 4), std::invalid_argument);
  EXPECT_THROW(SpectralModel::from_eigenvalues({1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(SpectralModel::from_eigenvalues({1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(SpectralModel::from_eigenvalues({}), std::invalid_argument);
}

TEST(SpectralModelTest, BasisIsOrthonormalByQuadrature) {
  for (std::size_t i = 0; i <= 16; ++i) {
    for (std::size_t j = 0; j <= 16; ++j) {
      const double ip = testing::integrate(
          [&](double x) { return SpectralModel::basis(i, x) * SpectralModel::basis(j, x); }, 0.0, 1.0, 32);
      EXPECT_NEAR(ip, i == j ? 1.0 : 0.0, 1e-8) << i << "," << j;
    }
  }
}

TEST(SpectralModelTest, TextRoundTrip) {
  const auto law = SpectralModel::from_decay(0.25, 33, 0.7);
  const auto back = SpectralModel::from_text(law.to_text());
  EXPECT_EQ(back.eigenvalues(), law.eigenvalues());
  EXPECT_EQ(back.decay_p(), law.decay_p());

  const auto explicit_mu = SpectralModel::from_eigenvalues({1.0, 1.0 / 3.0, 0.1}, 0.9);
  const auto back2 = SpectralModel::from_text(explicit_mu.to_text());
  EXPECT_EQ(back2.eigenvalues(), explicit_mu.eigenvalues());
  EXPECT_EQ(back2.decay_p(), 0.9);

  EXPECT_THROW(SpectralModel::from_text("basis = legendre\ndecay_p = 0.5\n"), std::invalid_argument);
  EXPECT_THROW(SpectralModel::from_text("size = 4\n"), std::invalid_argument);
  EXPECT_THROW(SpectralModel::from_text("decay_p = 0.5\nbogus = 1\n"), std::invalid_argument);
}

TEST(GammaNormTest, Examples) {
  const auto one = SpectralModel::from_eigenvalues({1.0});
  EXPECT_DOUBLE_EQ(gamma_norm(one, CoefficientMatrix(Eigen::MatrixXd::Ones(1, 1)), 0.5), 1.0);

  const auto quarter = SpectralModel::from_eigenvalues({0.25});
  EXPECT_DOUBLE_EQ(gamma_norm(quarter, CoefficientMatrix(Eigen::MatrixXd::Ones(1, 1)), 1.0), 2.0);
}

TEST(GammaNormTest, ZeroGammaMatchesMonteCarloL2) {
  const auto model = SpectralModel::from_decay(0.5, 24);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd c(24, 3);
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = normal(rng) / (1.0 + i);
  const double exact = gamma_norm(model, CoefficientMatrix(c), 0.0);
  const double mc = testing::mc_l2_sq(c, 100000, 17);
  EXPECT_NEAR(mc / (exact * exact), 1.0, 1e-2);
}

TEST(GammaNormTest, NondecreasingInGammaWhenEigenvaluesBelowOne) {
  const auto model = SpectralModel::from_decay(0.5, 64);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd c(64, 2);
    for (auto& v : c.reshaped()) v = normal(rng);
    double prev = 0.0;
    for (double g = 0.0; g <= 2.0; g += 0.125) {
      const double v = gamma_norm(model, CoefficientMatrix(c), g);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(EffectiveDimensionTest, Examples) {
  EXPECT_DOUBLE_EQ(effective_dimension(SpectralModel::from_eigenvalues({1.0}), 1.0), 0.5);
  EXPECT_NEAR(effective_dimension(SpectralModel::from_eigenvalues({1.0, 0.25}), 1.0), 0.7, 1e-15);
  EXPECT_THROW(effective_dimension(SpectralModel::from_eigenvalues({1.0}), 0.0), std::invalid_argument);
  EXPECT_THROW(effective_dimension(SpectralModel::from_eigenvalues({1.0}), -1.0), std::invalid_argument);
}

TEST(EffectiveDimensionTest, StrictlyDecreasingConvexAndInRange) {
  const auto model = SpectralModel::from_decay(0.5, 512);
  std::vector<double> grid, values;
  for (int k = 0; k <= 80; ++k) {
    grid.push_back(std::pow(10.0, -6.0 + 0.1 * k));
    values.push_back(effective_dimension(model, grid.back()));
    EXPECT_GT(values.back(), 0.0);
    EXPECT_LT(values.back(), 512.0);
  }
  for (std::size_t k = 1; k < values.size(); ++k) EXPECT_LT(values[k], values[k - 1]);
  // Convexity on a uniform grid: second differences are nonnegative.
  for (double lo = 0.01; lo < 0.9; lo += 0.05) {
    const double h = 0.01;
    const double second = effective_dimension(model, lo) - 2 * effective_dimension(model, lo + h) +
                          effective_dimension(model, lo + 2 * h);
    EXPECT_GE(second, 0.0);
  }
  EXPECT_LT(effective_dimension(model, 1e6), 1e-5);
}

TEST(CertifyEffectiveDimensionTest, Examples) {
  const auto quadratic = SpectralModel::from_decay(0.5, 512);
  const auto cert = certify_effective_dimension_bound(quadratic, {1.0, 0.1, 0.01, 0.001});
  EXPECT_TRUE(cert.pass);
  // Direct summation oracle for N(lambda) lambda^p <= sum_i min(1, mu_i / lambda) lambda^p.
  for (double lambda : {1.0, 0.1, 0.01, 0.001}) {
    double upper = 0.0;
    for (int i = 1; i <= 512; ++i) upper += std::min(1.0, 1.0 / (i * static_cast<double>(i)) / lambda);
    EXPECT_LE(effective_dimension(quadratic, lambda), upper);
  }

  const auto single = SpectralModel::from_eigenvalues({1.0}, 1.0);
  const auto c1 = certify_effective_dimension_bound(single, {1.0, 0.5, 0.1});
  EXPECT_TRUE(c1.pass);
  EXPECT_LE(c1.d_hat, 1.0);

  // mu_i = 1 / log(i + 2) has no polynomial decay; declared p = 0.9 fails.
  std::vector<double> slow;
  for (int i = 1; i <= 512; ++i) slow.push_back(1.0 / std::log(i + 2.0));
  const auto bad = SpectralModel::from_eigenvalues(slow, 0.9);
  EXPECT_FALSE(certify_effective_dimension_bound(bad, {1.0, 0.1, 0.01, 0.001}).pass);

  EXPECT_THROW(certify_effective_dimension_bound(SpectralModel::from_eigenvalues({1.0}), {1.0, 0.1}),
               std::invalid_argument);
}

TEST(EmbeddingConstantTest, Examples) {
  EXPECT_DOUBLE_EQ(embedding_constant(SpectralModel::from_eigenvalues({1.0}), 0.3), 1.0);
  EXPECT_NEAR(embedding_constant(SpectralModel::from_eigenvalues({1.0, 1.0}), 1.0), std::sqrt(3.0), 1e-12);
  const double a = embedding_constant(SpectralModel::from_decay(0.5, 512), 1.0);
  EXPECT_LE(a * a, 1.0 + std::numbers::pi * std::numbers::pi / 3.0);
  EXPECT_THROW(embedding_constant(SpectralModel::from_eigenvalues({1.0}), 0.0), std::invalid_argument);
}

TEST(EmbeddingConstantTest, NonincreasingInAlpha) {
  const auto model = SpectralModel::from_decay(0.5, 128);
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha = 0.5; alpha <= 1.0; alpha += 0.05) {
    const double a = embedding_constant(model, alpha);
    EXPECT_LE(a, prev);
    prev = a;
  }
}

TEST(NystromTest, DesignedSpectrumRecovered) {
  const auto k = KernelSpec::designed(SpectralModel::from_eigenvalues({1.0, 0.25}));
  const auto est = nystrom_spectrum(k, uniform_sample(2000, 1));
  ASSERT_EQ(est.size(), 2000);
  EXPECT_NEAR(est[0] / 1.0, 1.0, 0.1);
  EXPECT_NEAR(est[1] / 0.25, 1.0, 0.1);
  for (Eigen::Index i = 1; i < est.size(); ++i) EXPECT_LE(est[i], est[i - 1]);
  EXPECT_GE(est.minCoeff(), 0.0);
}

TEST(NystromTest, ConstantKernelIsRankOne) {
  const auto k = KernelSpec::designed(SpectralModel::from_eigenvalues({1.0}));
  const auto est = nystrom_spectrum(k, uniform_sample(50, 4));
  EXPECT_NEAR(est[0], 1.0, 1e-12);
  EXPECT_LE(est.tail(49).maxCoeff(), 1e-12);
  EXPECT_THROW(nystrom_spectrum(k, Eigen::VectorXd::Zero(1)), std::invalid_argument);
}

TEST(NystromTest, ConvergesWhenDoublingSampleSize) {
  const auto k = KernelSpec::designed(SpectralModel::from_decay(0.5, 512));
  const auto a = nystrom_spectrum(k, uniform_sample(1000, 21));
  const auto b = nystrom_spectrum(k, uniform_sample(2000, 22));
  for (int i = 0; i < 5; ++i) EXPECT_LT(std::abs(a[i] - b[i]) / b[i], 0.05) << i;
}

TEST(NystromTest, MaternHalfDecayExponent) {
  const auto est = nystrom_spectrum(KernelSpec::matern(MaternOrder::half), uniform_sample(2000, 8));
  const double p_hat = estimate_decay(est);
  EXPECT_NEAR(p_hat, 0.5, 0.15);
}

TEST(EstimateDecayTest, ExactPowerLaws) {
  Eigen::VectorXd two(60), four(60);
  for (int i = 0; i < 60; ++i) {
    two[i] = std::pow(i + 1.0, -2.0);
    four[i] = std::pow(i + 1.0, -4.0);
  }
  EXPECT_NEAR(estimate_decay(two, 5, 50), 0.5, 1e-9);
  EXPECT_NEAR(estimate_decay(four, 5, 50), 0.25, 1e-9);
  EXPECT_NEAR(estimate_decay(two, 1, 60), 0.5, 1e-9);
  Eigen::VectorXd few = Eigen::VectorXd::Zero(20);
  few.head(4) = two.head(4);
  EXPECT_THROW(estimate_decay(few, 1, 20), std::invalid_argument);
}

}  // namespace
}  // namespace vvkrr
