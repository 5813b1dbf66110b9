#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ttl/capacity.hpp"
#include "ttl/error.hpp"

using namespace ttl;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Kappa, ClosedForms) {
  EXPECT_NEAR(kappa(3), 4.0 * kPi, 1e-12);
  EXPECT_NEAR(kappa(4), 4.0 * kPi * kPi, 1e-12);
  EXPECT_NEAR(kappa(5), 8.0 * kPi * kPi, 1e-12);
  EXPECT_NEAR(cap_ball(3, 2.0), 8.0 * kPi, 1e-12);
  EXPECT_NEAR(cap_ball(5, 0.5), 8.0 * kPi * kPi / 8.0, 1e-12);
  EXPECT_THROW(kappa(2), InvalidArgument);
}

TEST(CapHitting, UnitBallSmallRun) {
  double o[3] = {0.0, 0.0, 0.0};
  Sausage ball{single_point_path(o), 1.0};
  CapacityEstimate c = cap_hitting(ball, 3, 4.0, 400.0, 1e-4, 40000, {11, 0});
  EXPECT_NEAR(c.value, 4.0 * kPi, 3.0 * c.stderr + 0.01 * 4.0 * kPi);
  EXPECT_GT(c.stderr, 0.0);
  EXPECT_LE(c.bias_bound_rel, 0.01 + 1e-12);
}

TEST(CapHitting, BallInFiveDimensions) {
  double o[5] = {0, 0, 0, 0, 0};
  Sausage ball{single_point_path(o), 0.5};
  HittingConfig cfg;
  cfg.h = 1e-4;
  cfg.n = 40000;
  CapacityEstimate c = cap_hitting(ball, cfg, {12, 0});
  double exact = cap_ball(5, 0.5);
  EXPECT_NEAR(c.value, exact, 3.0 * c.stderr + 0.01 * exact);
}

TEST(CapHitting, RejectsTargetOutsideLaunchSphere) {
  double o[3] = {0.0, 0.0, 0.0};
  Sausage ball{single_point_path(o), 1.0};
  EXPECT_THROW(cap_hitting(ball, 3, 1.5, 100.0, 1e-3, 100, {1, 0}), InvalidArgument);
  EXPECT_THROW(cap_hitting(ball, 3, 4.0, 3.0, 1e-3, 100, {1, 0}), InvalidArgument);
  EXPECT_THROW(cap_hitting(ball, 3, 4.0, 100.0, 1e-3, 0, {1, 0}), InvalidArgument);
}

TEST(CapHitting, MultiShellIsMonotone) {
  Sausage s{sample_path(3, 1.0, 1e-2, {13, 0}), 0.0};
  HittingConfig cfg;
  cfg.n = 4000;
  auto caps = cap_hitting_multi(s, cfg, {0.1, 0.05, 0.025}, {13, 1});
  ASSERT_EQ(caps.size(), 3u);
  EXPECT_GE(caps[0].value, caps[1].value);
  EXPECT_GE(caps[1].value, caps[2].value);
}

TEST(CapHitting, Deterministic) {
  Sausage s{sample_path(3, 0.5, 1e-2, {14, 0}), 0.05};
  HittingConfig cfg;
  cfg.n = 2000;
  CapacityEstimate a = cap_hitting(s, cfg, {14, 1});
  CapacityEstimate b = cap_hitting(s, cfg, {14, 1});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.stderr, b.stderr);
}

TEST(CapSojourn, UniformBallEnergy) {
  double o[3] = {0.0, 0.0, 0.0};
  CapacityEstimate c = cap_sojourn_lower(single_point_path(o), 1.0, 400000, {15, 0});
  EXPECT_NEAR(c.value, 4.0 * kPi * 5.0 / 6.0, 4.0 * c.stderr);
  EXPECT_LT(c.value, 4.0 * kPi);
}

TEST(CapSojourn, BelowHittingCapacity) {
  Sausage s{sample_path(3, 1.0, 1e-2, {16, 0}), 0.1};
  CapacityEstimate lo = cap_sojourn_lower(s.path, s.radius, 100000, {16, 1});
  HittingConfig cfg;
  cfg.n = 20000;
  CapacityEstimate hi = cap_hitting(s, cfg, {16, 2});
  EXPECT_LE(lo.value, hi.value + 3.0 * std::hypot(lo.stderr, hi.stderr));
}

TEST(CapSojourn, BarePointIsRejected) {
  double o[3] = {0.0, 0.0, 0.0};
  EXPECT_THROW(cap_sojourn_lower(single_point_path(o), 0.0, 10, {1, 0}), InvalidArgument);
}

TEST(ScaledCapacity, Normalization) {
  EXPECT_DOUBLE_EQ(capacity_normalization(5, 8.0), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(capacity_normalization(4, 8.0), std::log(8.0) / 8.0);
  EXPECT_THROW(capacity_normalization(3, 8.0), InvalidArgument);
}

TEST(ScalingRelation, BallsAreExact) {
  // A ball of radius eps against eps^{m-2} times the unit ball.
  double o[5] = {0, 0, 0, 0, 0};
  EXPECT_NEAR(cap_ball(5, 0.3), std::pow(0.3, 3) * cap_ball(5, 1.0), 1e-12);
  Sausage small{single_point_path(o), 0.3};
  HittingConfig cfg;
  cfg.h = 1e-4;
  cfg.n = 20000;
  CapacityEstimate c = cap_hitting(small, cfg, {17, 0});
  EXPECT_NEAR(c.value / std::pow(0.3, 3), cap_ball(5, 1.0),
              3.0 * c.stderr / std::pow(0.3, 3) + 0.01 * cap_ball(5, 1.0));
}
