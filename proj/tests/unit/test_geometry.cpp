#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ttl/error.hpp"
#include "ttl/geometry.hpp"
#include "ttl/rng.hpp"

using namespace ttl;

namespace {

std::vector<double> v(std::initializer_list<double> xs) { return xs; }

}  // namespace

TEST(TorusDistance, WrapsCoordinates) {
  EXPECT_NEAR(torus_distance(v({0.1, 0.0}), v({0.9, 0.0})), 0.2, 1e-15);
  EXPECT_NEAR(torus_distance(v({0.0, 0.0}), v({0.5, 0.5})), std::sqrt(0.5), 1e-15);
  EXPECT_EQ(torus_distance(v({0.3, 0.7}), v({0.3, 0.7})), 0.0);
}

TEST(TorusDistance, RejectsDimensionMismatch) {
  EXPECT_THROW(torus_distance(v({0.1, 0.2}), v({0.1, 0.2, 0.3})), InvalidArgument);
}

TEST(TorusDistance, MetricAxiomsOnRandomTriples) {
  Rng rng({11, 0});
  for (int m = 2; m <= 6; ++m) {
    for (int k = 0; k < 2000; ++k) {
      std::vector<double> x(m), y(m), z(m);
      for (int i = 0; i < m; ++i) {
        x[i] = rng.uniform();
        y[i] = rng.uniform();
        z[i] = rng.uniform();
      }
      double dxy = torus_distance(x, y), dyx = torus_distance(y, x);
      EXPECT_EQ(dxy, dyx);
      EXPECT_LE(torus_distance(x, z), dxy + torus_distance(y, z) + 1e-12);
      EXPECT_LE(dxy, 0.5 * std::sqrt(m) + 1e-15);
    }
  }
}

TEST(TorusDistance, DiameterAttainedAtAntipodes) {
  for (int m = 2; m <= 6; ++m) {
    std::vector<double> x(m, 0.1), y(m, 0.6);
    EXPECT_NEAR(torus_distance(x, y), 0.5 * std::sqrt(m), 1e-14);
  }
}

TEST(Wrap, ReducesModOne) {
  EXPECT_EQ(wrap(v({1.25, -0.5})), v({0.25, 0.5}));
  EXPECT_EQ(wrap(v({0.3, 0.7})), v({0.3, 0.7}));
  EXPECT_EQ(wrap(v({2.0, 3.0})), v({0.0, 0.0}));
  auto w = wrap(v({-1e-18, 7.999999999}));
  EXPECT_EQ(wrap(w), w);
  for (double c : w) {
    EXPECT_GE(c, 0.0);
    EXPECT_LT(c, 1.0);
  }
}

TEST(Wrap, RejectsNonFinite) {
  EXPECT_THROW(wrap(v({std::nan(""), 0.0})), InvalidArgument);
  EXPECT_THROW(wrap(v({INFINITY, 0.0})), InvalidArgument);
}

TEST(Embeddable, SmallAndLargeSets) {
  std::vector<std::vector<double>> a{{0.1, 0.1}, {0.3, 0.3}};
  EXPECT_TRUE(embeddable(a));
  std::vector<std::vector<double>> single{{0.9, 0.2}};
  EXPECT_TRUE(embeddable(single));
  // pairwise circle differences are at most 0.4, yet no lift fits an arc of length 1/2
  std::vector<std::vector<double>> ring{{0.0, 0.0}, {0.4, 0.0}, {0.8, 0.0}};
  EXPECT_FALSE(embeddable(ring));
  std::vector<std::vector<double>> empty;
  EXPECT_THROW(embeddable(empty), InvalidArgument);
}

TEST(Embeddable, LiftPreservesDistances) {
  Rng rng({12, 0});
  for (int trial = 0; trial < 200; ++trial) {
    int m = 2 + trial % 4;
    std::vector<std::vector<double>> pts(6, std::vector<double>(m));
    double c = rng.uniform();
    for (auto& p : pts)
      for (auto& x : p) x = wrap1(c + 0.45 * rng.uniform());
    ASSERT_TRUE(embeddable(pts));
    auto lift = embedding_lift(pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j) {
        double e = 0.0;
        for (int k = 0; k < m; ++k) e += std::pow(lift[i][k] - lift[j][k], 2);
        EXPECT_NEAR(std::sqrt(e), torus_distance(pts[i], pts[j]), 1e-12);
      }
  }
}

TEST(PointSegment, ExamplesFromCases) {
  EXPECT_NEAR(point_segment_distance(v({0.25, 0.1}), v({0, 0}), v({0.5, 0})), 0.1, 1e-15);
  EXPECT_NEAR(point_segment_distance(v({-0.1, 0}), v({0, 0}), v({1, 0})), 0.1, 1e-15);
  EXPECT_EQ(point_segment_distance(v({0.2, 0.3}), v({0.2, 0.3}), v({0.2, 0.3})), 0.0);
  EXPECT_NEAR(point_segment_distance(v({1, 1}), v({0, 0}), v({0, 0})), std::sqrt(2.0), 1e-15);
}

TEST(Dimension, Range) {
  EXPECT_THROW(check_dimension(1), InvalidArgument);
  EXPECT_THROW(check_dimension(7), InvalidArgument);
  EXPECT_NO_THROW(check_dimension(2));
  EXPECT_NEAR(unit_ball_volume(2), M_PI, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * M_PI / 3.0, 1e-14);
}
