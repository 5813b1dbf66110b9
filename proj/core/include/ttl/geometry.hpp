#pragma once

#include <span>
#include <vector>

namespace ttl {

inline constexpr int kMaxDim = 6;

// Throws unless 2 <= m <= 6.
void check_dimension(int m);

// Flat metric on the unit torus: sqrt(sum_i min(|dx_i|, 1-|dx_i|)^2).
double torus_distance(std::span<const double> x, std::span<const double> y);
double torus_distance_sq(const double* x, const double* y, int m);

double wrap1(double v);
std::vector<double> wrap(std::span<const double> p);

// True iff the set admits a lift to R^m under which torus and Euclidean
// distances agree, i.e. every coordinate fits in a circular arc of length 1/2.
bool embeddable(std::span<const std::vector<double>> points);

// Consistent lift of an embeddable set; throws if none exists.
std::vector<std::vector<double>> embedding_lift(std::span<const std::vector<double>> points);

double point_segment_distance(std::span<const double> x, std::span<const double> a,
                              std::span<const double> b);

// Squared Euclidean distance from x to the segment a + s*d, s in [0,1].
inline double point_segment_distance_sq(const double* x, const double* a, const double* d,
                                        int m) {
  double dd = 0.0, xd = 0.0;
  for (int i = 0; i < m; ++i) {
    dd += d[i] * d[i];
    xd += (x[i] - a[i]) * d[i];
  }
  double s = 0.0;
  if (dd > 0.0) {
    s = xd / dd;
    s = s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
  }
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    double e = x[i] - a[i] - s * d[i];
    acc += e * e;
  }
  return acc;
}

double unit_ball_volume(int m);

}  // namespace ttl
