#include "rhythmwalk/feedback.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "rhythmwalk/oracle.hpp"

namespace rw = rhythmwalk;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(InterpolateTest, EndpointsReproduceBoundsBitwise) {
  const auto b = rw::AngleBounds::make(-2.1, 0.7, 0.3, 2.9);
  const auto lo = rw::interpolate_angles(b, {0.0, 0.0});
  EXPECT_EQ(lo.phi_x, b.phi_min);
  EXPECT_EQ(lo.theta_x, b.theta_min);
  EXPECT_EQ(lo.phi_y, b.phi_min);
  EXPECT_EQ(lo.theta_y, b.theta_min);
  const auto hi = rw::interpolate_angles(b, {1.0, 1.0});
  EXPECT_EQ(hi.phi_x, b.phi_max);
  EXPECT_EQ(hi.theta_x, b.theta_max);
  EXPECT_EQ(hi.phi_y, b.phi_max);
  EXPECT_EQ(hi.theta_y, b.theta_max);
}

TEST(InterpolateTest, MidpointIsExactAverage) {
  const auto b = rw::AngleBounds::make(-1.25, 0.5, 0.75, 2.5);
  const auto mid = rw::interpolate_angles(b, {0.5, 0.5});
  EXPECT_EQ(mid.phi_x, (b.phi_min + b.phi_max) / 2.0);
  EXPECT_EQ(mid.theta_x, (b.theta_min + b.theta_max) / 2.0);
}

TEST(InterpolateTest, AxesAreIndependent) {
  const auto b = rw::AngleBounds::make(-1.0, 1.0, 0.5, 2.5);
  const auto a = rw::interpolate_angles(b, {0.0, 1.0});
  EXPECT_EQ(a.phi_x, b.phi_min);
  EXPECT_EQ(a.phi_y, b.phi_max);
}

TEST(InterpolateTest, RejectsBiasOutsideUnitInterval) {
  const auto b = rw::AngleBounds::make(0.0, 1.0, 0.0, 1.0);
  EXPECT_THROW(rw::interpolate_angles(b, {-0.01, 0.5}), rw::StructuralError);
  EXPECT_THROW(rw::interpolate_angles(b, {0.5, 1.01}), rw::StructuralError);
}

TEST(DriftTest, SingleStepFromPolarCoinIsBalanced) {
  // A polar coin state is split evenly by the toss.
  EXPECT_NEAR(rw::drift_probability(0.0, 0.0, 1), 0.5, 1e-15);
}

TEST(DriftTest, MatchesTransitionOracleOnGrid) {
  for (double theta = 0.0; theta <= kPi + 1e-9; theta += kPi / 6.0) {
    for (double phi = -kPi; phi <= kPi + 1e-9; phi += kPi / 4.0) {
      EXPECT_NEAR(rw::drift_probability(theta, phi, rw::kMaxSteps),
                  rw::oracle::three_step_positive_drift(theta, phi), 1e-12)
          << "theta=" << theta << " phi=" << phi;
    }
  }
}

TEST(DriftTest, ScanReachesQuarterAndThreeQuarters) {
  EXPECT_NEAR(rw::drift_probability(kPi / 2.0, 0.0, rw::kMaxSteps), 0.25, 1e-12);
  EXPECT_NEAR(rw::drift_probability(kPi / 2.0, kPi, rw::kMaxSteps), 0.75, 1e-12);
}

TEST(CalibrateTest, NeutralTargetConverges) {
  rw::CalibrationSpec spec;
  spec.target_drift_probability = 0.5;
  const auto result = rw::calibrate_bounds(spec);
  EXPECT_TRUE(result.max_pair.converged);
  EXPECT_TRUE(result.min_pair.converged);
  EXPECT_NEAR(result.max_pair.drift, 0.5, 0.01);
  EXPECT_NEAR(result.min_pair.drift, 0.5, 0.01);
  EXPECT_LT(result.max_pair.cost, spec.tolerance);
  EXPECT_LT(result.min_pair.cost, spec.tolerance);
}

TEST(CalibrateTest, StrongTargetMeetsThresholds) {
  rw::CalibrationSpec spec;  // target 0.85
  const auto result = rw::calibrate_bounds(spec);
  const double p_max = rw::drift_probability(result.bounds.theta_max,
                                             result.bounds.phi_max, rw::kMaxSteps);
  const double p_min = rw::drift_probability(result.bounds.theta_min,
                                             result.bounds.phi_min, rw::kMaxSteps);
  EXPECT_GE(p_max, 0.85 - rw::kDriftRecheckSlack);
  EXPECT_LE(p_min, 0.15 + rw::kDriftRecheckSlack);
  EXPECT_LE(result.max_pair.iterations, spec.max_iterations);
  EXPECT_LE(result.min_pair.iterations, spec.max_iterations);
  // the two pairs sit on opposite sides of neutral
  EXPECT_GT(result.max_pair.drift, 0.8);
  EXPECT_LT(result.min_pair.drift, 0.2);
}

TEST(CalibrateTest, ZeroLearningRateReturnsInitialPoint) {
  rw::CalibrationSpec spec;
  spec.target_drift_probability = 0.5;
  spec.learning_rate = 0.0;
  spec.max_iterations = 1;
  spec.tolerance = 10.0;  // any point is accepted
  const auto result = rw::calibrate_bounds(spec);
  EXPECT_EQ(result.max_pair.theta, kPi / 2.0 + 0.1);
  EXPECT_EQ(result.max_pair.phi, kPi / 2.0);
  EXPECT_EQ(result.min_pair.theta, kPi / 2.0 - 0.1);
  EXPECT_EQ(result.min_pair.phi, -kPi / 2.0);
  EXPECT_EQ(result.max_pair.iterations, 0);
  EXPECT_TRUE(result.max_pair.converged);
  const double expected_drift =
      rw::drift_probability(kPi / 2.0 + 0.1, kPi / 2.0, rw::kMaxSteps);
  EXPECT_EQ(result.max_pair.drift, expected_drift);
}

TEST(CalibrateTest, UnreachableTargetThrowsWithBestResult) {
  rw::CalibrationSpec spec;
  spec.target_drift_probability = 0.99;  // above the (2+sqrt(2))/4 ceiling
  spec.max_iterations = 50;
  bool thrown = false;
  try {
    rw::calibrate_bounds(spec);
  } catch (const rw::CalibrationError& e) {
    thrown = true;
    EXPECT_GT(e.best.max_pair.iterations, 0);
    EXPECT_GT(e.best.max_pair.drift, 0.5);
    EXPECT_LT(e.best.max_pair.drift, 0.99);
  }
  EXPECT_TRUE(thrown);
}

TEST(CalibrateTest, ValidatesSpec) {
  rw::CalibrationSpec spec;
  spec.target_drift_probability = 0.49;
  EXPECT_THROW(rw::calibrate_bounds(spec), rw::ConfigError);
  spec.target_drift_probability = 1.01;
  EXPECT_THROW(rw::calibrate_bounds(spec), rw::ConfigError);
  spec.target_drift_probability = 0.85;
  spec.tolerance = 0.0;
  EXPECT_THROW(rw::calibrate_bounds(spec), rw::ConfigError);
}

rw::WalkerSession make_session() {
  rw::WalkerSession session;
  session.kinematics = {{250.0, 250.0}, {0.0, 0.0}, rw::DirectMode{}};
  session.field = rw::NullPotential{};
  session.bounds = rw::AngleBounds::make(-kPi / 2.0, kPi / 2.0, kPi / 2.0 - 0.4,
                                         kPi / 2.0 + 0.4);
  session.seed = 7;
  return session;
}

TEST(AdvanceTest, DeterministicForEqualSessions) {
  auto a = make_session();
  auto b = make_session();
  for (int i = 0; i < 10; ++i) {
    const auto ra = rw::advance(a);
    const auto rb = rw::advance(b);
    EXPECT_EQ(ra.record.displacement.dx, rb.record.displacement.dx);
    EXPECT_EQ(ra.record.displacement.dy, rb.record.displacement.dy);
    EXPECT_EQ(ra.position.x, rb.position.x);
    EXPECT_EQ(ra.position.y, rb.position.y);
    a = ra.session;
    b = rb.session;
  }
}

TEST(AdvanceTest, NullFieldUsesMidpointAnglesExactly) {
  const auto session = make_session();
  const auto result = rw::advance(session);
  const auto expected = rw::interpolate_angles(session.bounds, {0.5, 0.5});
  EXPECT_EQ(result.record.angles.phi_x, expected.phi_x);
  EXPECT_EQ(result.record.angles.theta_x, expected.theta_x);
  EXPECT_EQ(result.record.angles.phi_y, expected.phi_y);
  EXPECT_EQ(result.record.angles.theta_y, expected.theta_y);
  EXPECT_EQ(result.record.bias.tx, 0.5);
  EXPECT_EQ(result.record.bias.ty, 0.5);
}

TEST(AdvanceTest, SignFlipNegatesRecordedGradient) {
  auto session = make_session();
  session.field = rw::LinearPotential{1.0};
  auto flipped = session;
  flipped.sign_flip = true;
  const auto r0 = rw::advance(session);
  const auto r1 = rw::advance(flipped);
  EXPECT_EQ(r0.record.gradient.gy, 1.0);
  EXPECT_EQ(r1.record.gradient.gy, -1.0);
}

TEST(AdvanceTest, DirectModePositionIsBeforePlusKick) {
  auto session = make_session();
  for (int i = 0; i < 20; ++i) {
    const auto r = rw::advance(session);
    EXPECT_EQ(r.record.position_after.x,
              r.record.position_before.x + r.record.pixel_displacement.x);
    EXPECT_EQ(r.record.position_after.y,
              r.record.position_before.y + r.record.pixel_displacement.y);
    session = r.session;
  }
}

TEST(AdvanceTest, InertialMotionComposesCoastAndKick) {
  auto session = make_session();
  session.kinematics = {{250.0, 250.0}, {4.0, -3.0},
                        rw::InertialMode{10.0, 0.52}};
  for (int i = 0; i < 20; ++i) {
    const auto r = rw::advance(session);
    // Null field: acceleration is zero, so position_after =
    // position_before + v dt + kick with constant v.
    EXPECT_NEAR(r.record.position_after.x,
                r.record.position_before.x + 4.0 * 0.52 +
                    r.record.pixel_displacement.x,
                1e-9);
    EXPECT_NEAR(r.record.position_after.y,
                r.record.position_before.y - 3.0 * 0.52 +
                    r.record.pixel_displacement.y,
                1e-9);
    session = r.session;
  }
}

TEST(AdvanceTest, PositionsStayInsideSpace) {
  auto session = make_session();
  session.kinematics.position = {1.0, 499.0};
  for (int i = 0; i < 50; ++i) {
    const auto r = rw::advance(session);
    EXPECT_GE(r.position.x, 0.0);
    EXPECT_LE(r.position.x, rw::kSpaceSize);
    EXPECT_GE(r.position.y, 0.0);
    EXPECT_LE(r.position.y, rw::kSpaceSize);
    session = r.session;
  }
}

TEST(AdvanceTest, SegmentSeedsAreDistinctAcrossIndices) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i)
    seeds.insert(rw::detail::mix_seed(42, i));
  EXPECT_EQ(seeds.size(), 1000u);
}

TEST(AdvanceTest, LongRunDriftMatchesSingleAxisStatistics) {
  // Null field keeps every segment at the same midpoint angles, so the mean
  // pixel displacement over many segments must match the exact one-axis
  // expectation at those angles.
  auto session = make_session();
  const auto angles = rw::interpolate_angles(session.bounds, {0.5, 0.5});
  const auto dist = rw::oracle::walk_distribution(angles.theta_x, angles.phi_x,
                                                  rw::kMaxSteps);
  double mean_cells = 0.0;
  double second_moment = 0.0;
  for (int d = -rw::kMaxSteps; d <= rw::kMaxSteps; ++d) {
    const double p = dist.probability_of(d);
    mean_cells += p * d;
    second_moment += p * d * d;
  }
  const double sigma_cells = std::sqrt(second_moment - mean_cells * mean_cells);

  const int kSegments = 1000;
  double sum_x = 0.0;
  for (int i = 0; i < kSegments; ++i) {
    const auto r = rw::advance(session);
    sum_x += static_cast<double>(r.record.displacement.dx);
    session = r.session;
  }
  const double sample_mean = sum_x / kSegments;
  const double tolerance = 3.0 * sigma_cells / std::sqrt(double(kSegments));
  EXPECT_NEAR(sample_mean, mean_cells, tolerance);
}

}  // namespace
