#include <gtest/gtest.h>

#include <random>

#include "avsfe/error.hpp"
#include "avsfe/materials.hpp"

namespace avsfe {
namespace {

TEST(Lame, MatrixMaterialOfInclusionProblem) {
  auto m = from_engineering(1500.0, 0.49);
  EXPECT_NEAR(m.mu, 1500.0 / 2.98, 1e-9);
  EXPECT_NEAR(m.lambda, 735.0 / 0.0298, 1e-7);
  EXPECT_NEAR(m.lambda, 24664.43, 1e-2);
  EXPECT_NEAR(m.mu, 503.356, 1e-3);
  EXPECT_DOUBLE_EQ(m.youngs_modulus, 1500.0);
  EXPECT_DOUBLE_EQ(m.poisson_ratio, 0.49);
}

TEST(Lame, NearlyIncompressible) {
  auto m = from_engineering(1500.0, 0.4999);
  EXPECT_NEAR(m.lambda / 2.49967e6, 1.0, 1e-5);
  EXPECT_NEAR(m.mu, 1500.0 / 2.9998, 1e-10);
  EXPECT_NEAR(m.mu, 500.0333, 1e-4);
}

TEST(Lame, RejectsInvalidInput) {
  EXPECT_THROW(from_engineering(1500.0, 0.5), ConfigError);
  EXPECT_THROW(from_engineering(1500.0, 0.7), ConfigError);
  EXPECT_THROW(from_engineering(-1.0, 0.3), ConfigError);
}

TEST(Lame, LambdaGrowsWithPoissonRatio) {
  double prev = -1.0;
  for (double nu : {0.0, 0.1, 0.3, 0.45, 0.49, 0.4999, 0.49999999}) {
    double l = from_engineering(1.0, nu).lambda;
    EXPECT_GT(l, prev) << nu;
    prev = l;
  }
}

TEST(Hooke, UniaxialAndShear) {
  auto m = from_engineering(1000.0, 0.25);
  Tensor2 eps;
  eps << 1e-3, 0.0, 0.0, 0.0;
  Tensor2 s = apply_hooke(eps, m);
  EXPECT_NEAR(s(0, 0), (2 * m.mu + m.lambda) * 1e-3, 1e-12);
  EXPECT_NEAR(s(1, 1), m.lambda * 1e-3, 1e-12);
  EXPECT_NEAR(s(0, 1), 0.0, 1e-15);

  eps << 0.0, 2e-3, 2e-3, 0.0;
  s = apply_hooke(eps, m);
  EXPECT_NEAR(s(0, 1), 2 * m.mu * 2e-3, 1e-12);
  EXPECT_NEAR(s(0, 0), 0.0, 1e-15);
}

TEST(Hooke, StrainOfSymmetrizes) {
  Tensor2 g;
  g << 1.0, 4.0, -2.0, 3.0;
  Tensor2 e = strain_of(g);
  EXPECT_DOUBLE_EQ(e(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(e(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(e(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(e(1, 1), 3.0);
  Tensor2 rot;
  rot << 0.0, 1.0, -1.0, 0.0;
  EXPECT_LT(strain_of(rot).norm(), 1e-15);
}

// eps : E eps >= 2 mu |dev eps|^2 for any strain, independent of lambda.
TEST(Hooke, DeviatoricCoercivityProperty) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (double nu : {0.3, 0.49, 0.4999, 0.49999999}) {
    auto m = from_engineering(1500.0, nu);
    for (int t = 0; t < 200; ++t) {
      Tensor2 g;
      g << d(rng), d(rng), d(rng), d(rng);
      Tensor2 eps = strain_of(g);
      Tensor2 dev = eps - 0.5 * eps.trace() * Tensor2::Identity();
      double energy = (eps.array() * apply_hooke(eps, m).array()).sum();
      EXPECT_GE(energy, 2 * m.mu * dev.squaredNorm() * (1 - 1e-12));
    }
  }
}

TEST(Hooke, LinearInStrain) {
  auto m = from_engineering(1500.0, 0.49);
  Tensor2 a, b;
  a << 1, 2, 2, -1;
  b << 0.5, -0.1, -0.1, 3;
  Tensor2 lhs = apply_hooke(2.0 * a - 3.0 * b, m);
  Tensor2 rhs = 2.0 * apply_hooke(a, m) - 3.0 * apply_hooke(b, m);
  EXPECT_LT((lhs - rhs).norm(), 1e-9 * rhs.norm());
}

TEST(MaterialField, LookupByTag) {
  MaterialField f(from_engineering(1500.0, 0.49));
  f.set(1, from_engineering(10000.0, 0.3));
  EXPECT_TRUE(f.has(0));
  EXPECT_TRUE(f.has(1));
  EXPECT_DOUBLE_EQ(f.at(1).youngs_modulus, 10000.0);
  EXPECT_THROW(f.at(2), ConfigError);
}

}  // namespace
}  // namespace avsfe
