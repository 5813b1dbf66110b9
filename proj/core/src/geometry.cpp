#include "ttl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ttl/error.hpp"

namespace ttl {

void check_dimension(int m) {
  if (m < 2 || m > kMaxDim)
    throw InvalidArgument("dimension must be in [2, 6], got " + std::to_string(m));
}

double torus_distance_sq(const double* x, const double* y, int m) {
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    double d = std::fabs(x[i] - y[i]);
    d -= std::floor(d);
    d = std::min(d, 1.0 - d);
    acc += d * d;
  }
  return acc;
}

double torus_distance(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "torus_distance: dimension mismatch");
  return std::sqrt(torus_distance_sq(x.data(), y.data(), static_cast<int>(x.size())));
}

double wrap1(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("wrap: non-finite coordinate");
  double w = v - std::floor(v);
  // v slightly below an integer can round up to exactly 1.0
  return w >= 1.0 ? 0.0 : w;
}

std::vector<double> wrap(std::span<const double> p) {
  std::vector<double> out(p.size());
  std::transform(p.begin(), p.end(), out.begin(), wrap1);
  return out;
}

namespace {

// Start of the shortest arc holding all values, or -1 if that arc exceeds 1/2.
double arc_start(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double best_gap = v.front() + 1.0 - v.back();
  double start = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) {
    double gap = v[i] - v[i - 1];
    if (gap > best_gap) {
      best_gap = gap;
      start = v[i];
    }
  }
  return best_gap >= 0.5 ? start : -1.0;
}

std::vector<double> column(std::span<const std::vector<double>> pts, std::size_t i) {
  std::vector<double> c;
  c.reserve(pts.size());
  for (const auto& p : pts) c.push_back(wrap1(p[i]));
  return c;
}

void check_set(std::span<const std::vector<double>> pts) {
  require(!pts.empty(), "embeddable: empty point set");
  for (const auto& p : pts)
    require(p.size() == pts.front().size(), "embeddable: dimension mismatch");
}

}  // namespace

bool embeddable(std::span<const std::vector<double>> points) {
  check_set(points);
  for (std::size_t i = 0; i < points.front().size(); ++i)
    if (arc_start(column(points, i)) < 0.0) return false;
  return true;
}

std::vector<std::vector<double>> embedding_lift(std::span<const std::vector<double>> points) {
  check_set(points);
  std::size_t m = points.front().size();
  std::vector<std::vector<double>> lift(points.size(), std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    auto c = column(points, i);
    double s = arc_start(c);
    if (s < 0.0) throw InvalidArgument("embedding_lift: set is not embeddable");
    for (std::size_t k = 0; k < c.size(); ++k) lift[k][i] = c[k] < s ? c[k] + 1.0 : c[k];
  }
  return lift;
}

double point_segment_distance(std::span<const double> x, std::span<const double> a,
                              std::span<const double> b) {
  require(x.size() == a.size() && a.size() == b.size(),
          "point_segment_distance: dimension mismatch");
  int m = static_cast<int>(x.size());
  double d[kMaxDim];
  require(m <= kMaxDim, "point_segment_distance: dimension too large");
  for (int i = 0; i < m; ++i) d[i] = b[i] - a[i];
  return std::sqrt(point_segment_distance_sq(x.data(), a.data(), d, m));
}

double unit_ball_volume(int m) {
  return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

}  // namespace ttl
