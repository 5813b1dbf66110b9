#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ttl/brownian.hpp"
#include "ttl/error.hpp"
#include "ttl/geometry.hpp"
#include "ttl/polyline_index.hpp"
#include "ttl/stats.hpp"

using namespace ttl;

TEST(SamplePath, PointCountAndStart) {
  SampledPath p = sample_path(3, 1.0, 1e-3, {1, 2});
  EXPECT_EQ(p.size(), 1001u);
  EXPECT_EQ(p.t_total(), 1.0);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(p.point(0)[i], 0.0);
  SampledPath q = sample_path(2, 1e-4, 1e-4, {1, 3});
  EXPECT_EQ(q.size(), 2u);
}

TEST(SamplePath, RejectsBadTimes) {
  EXPECT_THROW(sample_path(2, 1.0, 0.0, {1, 0}), InvalidArgument);
  EXPECT_THROW(sample_path(2, -1.0, 0.1, {1, 0}), InvalidArgument);
  EXPECT_THROW(sample_path(2, 1.0, 2.0, {1, 0}), InvalidArgument);
}

TEST(SamplePath, GeneratorConventionSecondMoment) {
  RunningStats s;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    SampledPath p = sample_path(3, 1.0, 0.05, RngSeed{5, k});
    const double* e = p.point(p.size() - 1);
    s.add(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
  }
  EXPECT_NEAR(s.mean, 6.0, 3.0 * s.stderr_mean());
}

TEST(SamplePath, IncrementVariance) {
  RunningStats s;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    SampledPath p = sample_path(2, 1e-4, 1e-4, RngSeed{6, k});
    s.add(p.point(1)[0]);
  }
  EXPECT_NEAR(s.variance(), 2e-4, 2e-4 * 0.05);
}

TEST(SamplePath, BrownianScalingKolmogorovSmirnov) {
  const int n = 10000;
  std::vector<double> a(n), b(n);
  for (int k = 0; k < n; ++k) {
    SampledPath p = sample_path(2, 0.25, 0.25, RngSeed{7, static_cast<std::uint64_t>(k)});
    SampledPath q = sample_path(2, 1.0, 1.0, RngSeed{8, static_cast<std::uint64_t>(k)});
    const double* pe = p.point(p.size() - 1);
    const double* qe = q.point(q.size() - 1);
    a[k] = std::hypot(pe[0], pe[1]) / 0.5;
    b[k] = std::hypot(qe[0], qe[1]);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / n));
  }
  // two-sample critical value at the 1% level
  EXPECT_LT(d, 1.628 * std::sqrt(2.0 / n));
}

TEST(SamplePath, LongSegmentsAreSplit) {
  SampledPath p = sample_path(2, 4.0, 1.0, {9, 0});
  for (std::size_t k = 1; k < p.size(); ++k) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i) s += std::pow(p.point(k)[i] - p.point(k - 1)[i], 2);
    EXPECT_LE(std::sqrt(s), kMaxSegment);
  }
  EXPECT_GT(p.size(), 5u);
  EXPECT_DOUBLE_EQ(p.t_total(), 4.0);
}

TEST(SamplePath, SeedsAreReproducible) {
  SampledPath a = sample_path(3, 2.0, 1e-3, {21, 4});
  SampledPath b = sample_path(3, 2.0, 1e-3, {21, 4});
  SampledPath c = sample_path(3, 2.0, 1e-3, {21, 5});
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_NE(a.coords, c.coords);
}

TEST(DistanceToPath, Examples) {
  double o[2] = {0.0, 0.0};
  SampledPath pt = single_point_path(o);
  EXPECT_NEAR(distance_to_path(std::vector<double>{0.3, 0.0}, pt), 0.3, 1e-15);
  SampledPath seg = polyline_path(2, {{0.0, 0.0}, {0.5, 0.0}});
  EXPECT_NEAR(distance_to_path(std::vector<double>{0.25, 0.1}, seg), 0.1, 1e-15);
  EXPECT_NEAR(distance_to_path(std::vector<double>{0.25, 0.95}, seg), 0.05, 1e-15);
}

TEST(DistanceToPath, BoundedByStartDistance) {
  SampledPath p = sample_path(2, 1.0, 1e-2, {3, 3});
  Rng rng({3, 4});
  for (int k = 0; k < 200; ++k) {
    std::vector<double> x{rng.uniform(), rng.uniform()};
    std::vector<double> s0{p.point(0)[0], p.point(0)[1]};
    EXPECT_LE(distance_to_path(x, p), torus_distance(x, s0) + 1e-15);
  }
}

TEST(DistanceToSausage, Examples) {
  double o[2] = {0.0, 0.0};
  Sausage s{single_point_path(o), 0.1};
  EXPECT_NEAR(distance_to_sausage(std::vector<double>{0.3, 0.0}, s), 0.2, 1e-15);
  EXPECT_EQ(distance_to_sausage(std::vector<double>{0.05, 0.0}, s), 0.0);
  Sausage bare{single_point_path(o), 0.0};
  EXPECT_NEAR(distance_to_sausage(std::vector<double>{0.3, 0.0}, bare), 0.3, 1e-15);
}

TEST(DistanceToSausage, Lipschitz) {
  Sausage s{sample_path(3, 0.5, 1e-3, {4, 4}), 0.05};
  Rng rng({4, 5});
  for (int k = 0; k < 300; ++k) {
    std::vector<double> x(3), y(3);
    for (int i = 0; i < 3; ++i) {
      x[i] = rng.uniform();
      y[i] = wrap1(x[i] + 0.05 * (rng.uniform() - 0.5));
    }
    double fx = distance_to_sausage(x, s), fy = distance_to_sausage(y, s);
    EXPECT_LE(std::fabs(fx - fy), torus_distance(x, y) + 1e-12);
  }
}

TEST(Refinement, DistancesMoveByOrderSqrtDt) {
  const double dt = 1e-3;
  SampledPath p = sample_path(2, 1.0, dt, {31, 0});
  SampledPath q = refine_path(p, {31, 1});
  EXPECT_EQ(q.size(), 2 * p.size() - 1);
  TorusIndex ip(p), iq(q);
  Rng rng({31, 2});
  for (int k = 0; k < 500; ++k) {
    double x[2] = {rng.uniform(), rng.uniform()};
    EXPECT_LE(std::fabs(ip.distance(x) - iq.distance(x)), 3.0 * std::sqrt(dt));
  }
}

TEST(TorusIndex, MatchesBruteForce) {
  for (int m = 2; m <= 5; ++m) {
    SampledPath p = sample_path(m, 0.3, 2e-3, RngSeed{41, static_cast<std::uint64_t>(m)});
    TorusIndex index(p);
    Rng rng({41, 100});
    for (int k = 0; k < 200; ++k) {
      std::vector<double> x(m);
      for (auto& c : x) c = rng.uniform();
      double brute = distance_to_path(x, p);
      EXPECT_NEAR(index.distance(x.data()), brute, 1e-12);
      EXPECT_LE(index.safe_radius(x.data(), 1.0), brute + 1e-12);
    }
  }
}

TEST(LiftIndex, SafeRadiusIsLowerBoundAndExactNearby) {
  SampledPath p = sample_path(3, 1.0, 1e-2, {42, 0});
  LiftIndex index(p, 0.2);
  Rng rng({42, 1});
  for (int k = 0; k < 2000; ++k) {
    std::vector<double> x(3);
    for (int i = 0; i < 3; ++i) x[i] = index.center()[i] + 4.0 * (rng.uniform() - 0.5);
    double exact = lift_distance_to_path(x, p);
    double safe = index.safe_radius(x.data());
    EXPECT_LE(safe, exact + 1e-12);
    if (exact < 0.1) EXPECT_NEAR(safe, exact, 1e-12);
  }
}

TEST(FarthestPoint, SinglePointOnTorus) {
  double o[3] = {0.2, 0.2, 0.2};
  TorusIndex index(single_point_path(o));
  FarthestPoint fp = farthest_point(index, 1e-6);
  EXPECT_NEAR(fp.value, 0.5 * std::sqrt(3.0), 1e-5);
  EXPECT_GE(fp.upper, fp.value);
}

TEST(PathCsv, RoundTripIsExact) {
  SampledPath p = sample_path(3, 0.5, 1e-2, {51, 0});
  std::stringstream ss;
  write_path_csv(ss, p);
  SampledPath q = read_path_csv(ss);
  EXPECT_EQ(p.coords, q.coords);
  EXPECT_EQ(p.times, q.times);
  EXPECT_EQ(p.m, q.m);
}

TEST(PathCsv, TruncatedInputIsAFormatError) {
  std::stringstream ss("t,x1,x2\n0,0,0\n0.1,0.2\n");
  EXPECT_THROW(read_path_csv(ss), FormatError);
  std::stringstream bad("time,x\n");
  EXPECT_THROW(read_path_csv(bad), FormatError);
}
