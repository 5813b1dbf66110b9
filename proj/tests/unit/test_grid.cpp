#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ttl/error.hpp"
#include "ttl/grid.hpp"
#include "ttl/polyline_index.hpp"

using namespace ttl;

TEST(GridField, IndexingRoundTrip) {
  GridField f = make_field(3, 8, FieldKind::mask);
  EXPECT_EQ(f.size(), 512u);
  EXPECT_DOUBLE_EQ(f.cell_volume(), 1.0 / 512.0);
  for (std::size_t lin : {0u, 7u, 64u, 511u}) {
    int idx[3];
    f.unravel(lin, idx);
    EXPECT_EQ(f.linear(idx), lin);
  }
  double x[3];
  f.center(1, x);
  EXPECT_DOUBLE_EQ(x[0], 0.0625);
  EXPECT_DOUBLE_EQ(x[2], 0.1875);
  EXPECT_THROW(make_field(2, 4, FieldKind::mask), InvalidArgument);
}

TEST(DistanceField, SinglePointDsquared) {
  double o[2] = {0.0, 0.0};
  GridField f = distance_field(single_point_path(o), 256);
  EXPECT_NEAR(dsquared(f), 1.0 / 6.0, 1e-4);
  Argmax a = inradius(f);
  EXPECT_NEAR(a.value, std::sqrt(0.5) - std::sqrt(0.5) / 256.0, 1e-12);
}

TEST(DistanceField, MatchesIndexEverywhere) {
  SampledPath p = sample_path(2, 0.5, 1e-3, {61, 0});
  GridField f = distance_field(p, 64);
  TorusIndex index(p);
  double x[2];
  for (std::size_t k = 0; k < f.size(); k += 37) {
    f.center(k, x);
    EXPECT_NEAR(f.values[k], index.distance(x), 1e-12);
  }
}

TEST(DistanceField, DsquaredDecreasesWithTime) {
  SampledPath p = sample_path(2, 2.0, 1e-3, {62, 0});
  GridField a = distance_field(slice(p, 0, index_at_time(p, 1.0)), 128);
  GridField b = distance_field(p, 128);
  EXPECT_LE(dsquared(b), dsquared(a));
}

TEST(Obstacles, SausageCellCount) {
  double c[2] = {0.5, 0.5};
  Obstacle ob = sausage_obstacle(single_point_path(c), 0.1, 256);
  double area = ob.obstacle_cells() / (256.0 * 256.0);
  EXPECT_NEAR(area, std::numbers::pi * 0.01, 2e-3);
  EXPECT_EQ(ob.free_cells() + ob.obstacle_cells(), ob.mask.size());
}

TEST(Obstacles, BallDomainAndLevel) {
  std::vector<double> c{0.5, 0.5, 0.5};
  Obstacle ob = ball_domain(3, 64, c, 0.25);
  double vol = ob.free_cells() / std::pow(64.0, 3);
  EXPECT_NEAR(vol, 4.0 / 3.0 * std::numbers::pi * std::pow(0.25, 3), 2e-3);
  ASSERT_EQ(ob.level.size(), ob.mask.size());
  for (std::size_t k = 0; k < ob.mask.size(); ++k)
    EXPECT_EQ(ob.mask.values[k] > 0.5, ob.level[k] <= 0.0);
  EXPECT_THROW(ball_domain(3, 64, c, 0.6), InvalidArgument);
}

TEST(Obstacles, DyadicSquare) {
  Obstacle ob = dyadic_square_obstacle(64, 2);
  EXPECT_GE(ob.obstacle_cells(), 256u);
  EXPECT_LE(ob.obstacle_cells(), 18u * 18u);
  double x[2];
  for (std::size_t k = 0; k < ob.mask.size(); ++k) {
    ob.mask.center(k, x);
    bool inside = std::fabs(x[0] - 0.5) <= 0.125 && std::fabs(x[1] - 0.5) <= 0.125;
    if (inside) EXPECT_GT(ob.mask.values[k], 0.5);
  }
}

TEST(Components, PeriodicWrapJoinsEdges) {
  GridField f = make_field(2, 8, FieldKind::mask);
  // a vertical strip at column 0 and one at column 7 touch across the seam
  for (int i = 0; i < 8; ++i) {
    int a[2] = {i, 0}, b[2] = {i, 7};
    f.values[f.linear(a)] = 1.0;
    f.values[f.linear(b)] = 1.0;
  }
  int d[2] = {3, 4};
  f.values[f.linear(d)] = 1.0;
  Components c = label_components(f, 0.5);
  EXPECT_EQ(c.count, 2);
  std::size_t total = 0;
  for (auto s : c.sizes) total += s;
  EXPECT_EQ(total, 17u);
}

TEST(Components, ClosedLoopsOnTheTorus) {
  // one closed horizontal loop leaves a single cylinder; two loops cut it in two
  std::vector<std::vector<double>> pts{{0.0, 0.5}, {0.25, 0.5}, {0.5, 0.5}, {0.75, 0.5}, {1.0, 0.5}};
  Obstacle ob = sausage_obstacle(polyline_path(2, pts), 0.02, 64);
  EXPECT_EQ(free_components(ob).count, 1);
  Obstacle ob2 = sausage_obstacle(polyline_path(2, {{0.0, 0.25}, {0.5, 0.25}, {1.0, 0.25}}), 0.02, 64);
  GridField both = ob2.mask;
  Obstacle ob3 = sausage_obstacle(polyline_path(2, {{0.0, 0.75}, {0.5, 0.75}, {1.0, 0.75}}), 0.02, 64);
  for (std::size_t k = 0; k < both.size(); ++k) both.values[k] = std::max(both.values[k], ob3.mask.values[k]);
  for (auto& v : both.values) v = 1.0 - v;
  EXPECT_EQ(label_components(both, 0.5).count, 2);
}

TEST(FieldIo, BinaryRoundTripIsExact) {
  SampledPath p = sample_path(3, 0.2, 1e-2, {63, 0});
  GridField f = distance_field(p, 16);
  std::stringstream ss;
  write_field_binary(ss, f);
  GridField g = read_field_binary(ss);
  EXPECT_EQ(g.m, 3);
  EXPECT_EQ(g.n, 16);
  EXPECT_EQ(g.kind, FieldKind::distance);
  EXPECT_EQ(g.values, f.values);
}

TEST(FieldIo, TruncatedBinaryIsAFormatError) {
  GridField f = make_field(2, 8, FieldKind::torsion, 1.0);
  std::stringstream ss;
  write_field_binary(ss, f);
  std::string s = ss.str();
  std::stringstream cut(s.substr(0, s.size() / 2));
  EXPECT_THROW(read_field_binary(cut), FormatError);
}
