#include "rhythmwalk/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace rw = rhythmwalk;
namespace oracle = rhythmwalk::oracle;

namespace {

constexpr double kTol = 1e-12;
constexpr double kPi = std::numbers::pi;

TEST(WalkDistributionTest, ZeroStepsIsADelta) {
  const auto dist = oracle::walk_distribution(1.1, -0.4, 0);
  EXPECT_NEAR(dist.probability_of(0), 1.0, kTol);
  EXPECT_NEAR(dist.positive_drift(), 0.0, kTol);
  EXPECT_NEAR(dist.mean(), 0.0, kTol);
}

TEST(WalkDistributionTest, ProbabilitiesSumToOne) {
  for (double theta : {0.0, 0.6, kPi / 2, 2.4, kPi}) {
    for (double phi : {-kPi, -1.0, 0.0, 0.8, kPi}) {
      for (int steps : {1, 2, 3, 5, 8}) {
        const auto dist = oracle::walk_distribution(theta, phi, steps);
        double sum = 0.0;
        for (double p : dist.probabilities) sum += p;
        EXPECT_NEAR(sum, 1.0, kTol);
      }
    }
  }
}

TEST(WalkDistributionTest, HadamardThreeStepValues) {
  // Classic left-leaning Hadamard walk started in (|0>+|1>)/sqrt(2).
  const auto dist = oracle::walk_distribution(kPi / 2, 0.0, 3);
  EXPECT_NEAR(dist.probability_of(-3), 0.25, kTol);
  EXPECT_NEAR(dist.probability_of(-1), 0.50, kTol);
  EXPECT_NEAR(dist.probability_of(+1), 0.25, kTol);
  EXPECT_NEAR(dist.probability_of(+3), 0.00, kTol);
  EXPECT_NEAR(dist.positive_drift(), 0.25, kTol);
}

TEST(WalkDistributionTest, CoinDownSingleStepSplitsEvenly) {
  const auto dist = oracle::walk_distribution(0.0, 0.0, 1);
  EXPECT_NEAR(dist.probability_of(-1), 0.5, kTol);
  EXPECT_NEAR(dist.probability_of(+1), 0.5, kTol);
  EXPECT_NEAR(dist.positive_drift(), 0.5, kTol);
}

TEST(WalkDistributionTest, ParityOfSupportMatchesStepCount) {
  const auto dist = oracle::walk_distribution(0.9, 0.3, 3);
  for (int d = -3; d <= 3; ++d) {
    if ((d + 3) % 2 == 1) EXPECT_NEAR(dist.probability_of(d), 0.0, kTol);
  }
}

TEST(WalkDistributionTest, ClosedFormMatchesPathSum) {
  for (double theta = 0.0; theta <= kPi + 1e-9; theta += kPi / 7) {
    for (double phi = -kPi; phi <= kPi + 1e-9; phi += kPi / 5) {
      const auto dist = oracle::walk_distribution(theta, phi, 3);
      EXPECT_NEAR(oracle::three_step_positive_drift(theta, phi),
                  dist.positive_drift(), kTol)
          << "theta=" << theta << " phi=" << phi;
    }
  }
}

TEST(WalkDistributionTest, DriftExtremesAreTheKnownOnes) {
  const double hi = (2.0 + std::sqrt(2.0)) / 4.0;
  const double lo = (2.0 - std::sqrt(2.0)) / 4.0;
  EXPECT_NEAR(oracle::walk_distribution(3 * kPi / 4, kPi, 3).positive_drift(),
              hi, kTol);
  EXPECT_NEAR(oracle::walk_distribution(kPi / 4, 0.0, 3).positive_drift(), lo,
              kTol);

  // grid scan stays inside the analytic range
  for (double theta = 0.0; theta <= kPi; theta += 0.1) {
    for (double phi = -kPi; phi <= kPi; phi += 0.2) {
      const double p = oracle::walk_distribution(theta, phi, 3).positive_drift();
      EXPECT_GE(p, lo - kTol);
      EXPECT_LE(p, hi + kTol);
    }
  }
}

TEST(WalkDistributionTest, RejectsNegativeSteps) {
  EXPECT_THROW(oracle::walk_distribution(0.0, 0.0, -1), rw::ConfigError);
}

TEST(AnalyticGradientTest, MatchesClosedForms) {
  const rw::PotentialField null_field = rw::NullPotential{};
  const rw::PotentialField slope = rw::LinearPotential{2.5};
  const rw::PotentialField bump =
      rw::GaussianPotential{100.0, 0.0, 0.0, 100.0, 100.0};

  auto g0 = oracle::analytic_gradient(null_field, 33.0, -4.0);
  EXPECT_EQ(g0.gx, 0.0);
  EXPECT_EQ(g0.gy, 0.0);

  auto g1 = oracle::analytic_gradient(slope, 10.0, 20.0);
  EXPECT_EQ(g1.gx, 0.0);
  EXPECT_NEAR(g1.gy, 2.5, kTol);

  auto g2 = oracle::analytic_gradient(bump, 100.0, 0.0);
  const double v = 100.0 * std::exp(-0.5);
  EXPECT_NEAR(g2.gx, -v * 100.0 / 1e4, kTol);
  EXPECT_NEAR(g2.gy, 0.0, kTol);
}

TEST(GradientTableTest, FiniteDifferencesTrackTheAnalyticGradient) {
  const rw::PotentialField bump =
      rw::GaussianPotential{100.0, 0.0, 0.0, 100.0, 100.0};
  std::vector<rw::Vec2> points;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      points.push_back({20.0 + 90.0 * i, 15.0 + 85.0 * j});
  const auto rows = oracle::gradient_table(bump, points, 1e-3);
  ASSERT_EQ(rows.size(), 25u);
  for (const auto& row : rows) EXPECT_LE(row.rel_error, 1e-4);
}

TEST(RandomStateTest, NormalizedAndReproducible) {
  std::mt19937_64 a(2024), b(2024);
  const auto s1 = oracle::random_state(6, a);
  const auto s2 = oracle::random_state(6, b);
  EXPECT_NEAR(s1.norm(), 1.0, 1e-12);
  for (std::size_t i = 0; i < s1.dimension(); ++i)
    EXPECT_EQ(s1.amplitude(i), s2.amplitude(i));
}

TEST(DecomposeTest, TwoAxisStepFactorsExactly) {
  EXPECT_LE(oracle::decompose_max_deviation(10, 31337), 1e-10);
}

TEST(DecomposeTest, RejectsNonPositiveTrials) {
  EXPECT_THROW(oracle::decompose_max_deviation(0, 1), rw::ConfigError);
}

}  // namespace
