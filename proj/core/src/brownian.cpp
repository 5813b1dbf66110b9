#include "ttl/brownian.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "ttl/error.hpp"
#include "ttl/geometry.hpp"

namespace ttl {

namespace {

double seg_len_sq(const double* a, const double* b, int m) {
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += (b[i] - a[i]) * (b[i] - a[i]);
  return acc;
}

void push_bridge(std::vector<double>& times, std::vector<double>& coords, const double* a,
                 const double* b, double ta, double tb, int m, Rng& rng, double max_len) {
  if (seg_len_sq(a, b, m) <= max_len * max_len) {
    times.push_back(tb);
    coords.insert(coords.end(), b, b + m);
    return;
  }
  double mid[kMaxDim];
  double sd = std::sqrt(0.5 * (tb - ta));
  for (int i = 0; i < m; ++i) mid[i] = 0.5 * (a[i] + b[i]) + sd * rng.normal();
  double tm = 0.5 * (ta + tb);
  push_bridge(times, coords, a, mid, ta, tm, m, rng, max_len);
  push_bridge(times, coords, mid, b, tm, tb, m, rng, max_len);
}

void resample_long(SampledPath& p, Rng& rng) {
  int m = p.m;
  bool any = false;
  for (std::size_t i = 1; i < p.size() && !any; ++i)
    any = seg_len_sq(p.point(i - 1), p.point(i), m) > kMaxSegment * kMaxSegment;
  if (!any) return;
  std::vector<double> times{p.times.front()};
  std::vector<double> coords(p.coords.begin(), p.coords.begin() + m);
  for (std::size_t i = 1; i < p.size(); ++i) {
    double a[kMaxDim];
    std::copy(coords.end() - m, coords.end(), a);
    push_bridge(times, coords, a, p.point(i), p.times[i - 1], p.times[i], m, rng, kMaxSegment);
  }
  p.times = std::move(times);
  p.coords = std::move(coords);
}

}  // namespace

SampledPath sample_path_from(std::span<const double> start, double t, double dt, RngSeed seed) {
  int m = static_cast<int>(start.size());
  check_dimension(m);
  if (!(t > 0.0) || !(dt > 0.0)) throw InvalidArgument("sample_path: t and dt must be positive");
  require(dt <= t, "sample_path: dt must not exceed t");
  auto steps = static_cast<std::size_t>(std::ceil(t / dt * (1.0 - 1e-12)));
  steps = std::max<std::size_t>(steps, 1);

  SampledPath p;
  p.m = m;
  p.dt = dt;
  p.seed = seed;
  p.times.resize(steps + 1);
  p.coords.resize((steps + 1) * m);
  Rng rng(seed.child(0));
  double sd = std::sqrt(2.0 * dt);
  std::copy(start.begin(), start.end(), p.coords.begin());
  for (std::size_t k = 1; k <= steps; ++k) {
    p.times[k] = static_cast<double>(k) * dt;
    for (int i = 0; i < m; ++i)
      p.coords[k * m + i] = p.coords[(k - 1) * m + i] + sd * rng.normal();
  }
  Rng bridge(seed.child(1));
  resample_long(p, bridge);
  return p;
}

SampledPath sample_path(int m, double t, double dt, RngSeed seed) {
  check_dimension(m);
  std::vector<double> origin(m, 0.0);
  return sample_path_from(origin, t, dt, seed);
}

SampledPath refine_path(const SampledPath& path, RngSeed seed) {
  int m = path.m;
  SampledPath out;
  out.m = m;
  out.dt = 0.5 * path.dt;
  out.seed = path.seed;
  if (path.size() < 2) return path;
  Rng rng(seed);
  out.times.reserve(2 * path.size());
  out.coords.reserve(2 * path.coords.size());
  out.times.push_back(path.times[0]);
  out.coords.insert(out.coords.end(), path.point(0), path.point(0) + m);
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double* a = path.point(k - 1);
    const double* b = path.point(k);
    double tau = path.times[k] - path.times[k - 1];
    double sd = std::sqrt(0.5 * tau);
    out.times.push_back(0.5 * (path.times[k - 1] + path.times[k]));
    for (int i = 0; i < m; ++i) out.coords.push_back(0.5 * (a[i] + b[i]) + sd * rng.normal());
    out.times.push_back(path.times[k]);
    out.coords.insert(out.coords.end(), b, b + m);
  }
  resample_long(out, rng);
  return out;
}

SampledPath slice(const SampledPath& path, std::size_t i0, std::size_t i1) {
  require(i0 <= i1 && i1 < path.size(), "slice: bad index range");
  SampledPath out;
  out.m = path.m;
  out.dt = path.dt;
  out.seed = path.seed;
  double t0 = path.times[i0];
  for (std::size_t k = i0; k <= i1; ++k) out.times.push_back(path.times[k] - t0);
  out.coords.assign(path.coords.begin() + i0 * path.m, path.coords.begin() + (i1 + 1) * path.m);
  return out;
}

std::size_t index_at_time(const SampledPath& path, double t) {
  auto it = std::lower_bound(path.times.begin(), path.times.end(), t - 1e-12 * std::max(1.0, t));
  if (it == path.times.end()) return path.size() - 1;
  return static_cast<std::size_t>(it - path.times.begin());
}

SampledPath single_point_path(std::span<const double> p) {
  check_dimension(static_cast<int>(p.size()));
  SampledPath out;
  out.m = static_cast<int>(p.size());
  out.times = {0.0};
  out.coords.assign(p.begin(), p.end());
  return out;
}

SampledPath polyline_path(int m, const std::vector<std::vector<double>>& pts) {
  check_dimension(m);
  require(!pts.empty(), "polyline_path: no points");
  SampledPath out;
  out.m = m;
  out.dt = 1.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    require(static_cast<int>(pts[k].size()) == m, "polyline_path: dimension mismatch");
    out.times.push_back(static_cast<double>(k));
    out.coords.insert(out.coords.end(), pts[k].begin(), pts[k].end());
  }
  return out;
}

SampledPath transform(const SampledPath& path, double scale, std::span<const double> shift) {
  require(static_cast<int>(shift.size()) == path.m, "transform: dimension mismatch");
  SampledPath out = path;
  out.dt = path.dt * scale * scale;
  for (auto& t : out.times) t *= scale * scale;
  for (std::size_t k = 0; k < path.size(); ++k)
    for (int i = 0; i < path.m; ++i)
      out.coords[k * path.m + i] = scale * path.coords[k * path.m + i] + shift[i];
  return out;
}

double distance_to_path(std::span<const double> x, const SampledPath& path) {
  int m = path.m;
  require(static_cast<int>(x.size()) == m, "distance_to_path: dimension mismatch");
  require(path.size() > 0, "distance_to_path: empty path");
  int n_img = 1;
  for (int i = 0; i < m; ++i) n_img *= 3;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < path.segments(); ++s) {
    const double* a = path.point(s);
    const double* b = path.size() > 1 ? path.point(s + 1) : a;
    double aw[kMaxDim], d[kMaxDim], x0[kMaxDim], xi[kMaxDim];
    for (int i = 0; i < m; ++i) {
      double shift = std::floor(a[i]);
      aw[i] = a[i] - shift;
      d[i] = b[i] - a[i];
      x0[i] = x[i] - std::nearbyint(x[i] - aw[i]);
    }
    for (int code = 0; code < n_img; ++code) {
      int c = code;
      for (int i = 0; i < m; ++i) {
        xi[i] = x0[i] + static_cast<double>(c % 3 - 1);
        c /= 3;
      }
      best = std::min(best, point_segment_distance_sq(xi, aw, d, m));
    }
  }
  return std::sqrt(best);
}

double distance_to_sausage(std::span<const double> x, const Sausage& s) {
  require(s.radius >= 0.0, "sausage radius must be non-negative");
  return std::max(distance_to_path(x, s.path) - s.radius, 0.0);
}

double lift_distance_to_path(std::span<const double> x, const SampledPath& path) {
  int m = path.m;
  require(static_cast<int>(x.size()) == m, "lift_distance_to_path: dimension mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < path.segments(); ++s) {
    const double* a = path.point(s);
    const double* b = path.size() > 1 ? path.point(s + 1) : a;
    double d[kMaxDim];
    for (int i = 0; i < m; ++i) d[i] = b[i] - a[i];
    best = std::min(best, point_segment_distance_sq(x.data(), a, d, m));
  }
  return std::sqrt(best);
}

void write_path_csv(std::ostream& os, const SampledPath& path) {
  os << 't';
  for (int i = 1; i <= path.m; ++i) os << ",x" << i;
  os << '\n';
  char buf[64];
  auto put = [&](double v) {
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    os.write(buf, r.ptr - buf);
  };
  for (std::size_t k = 0; k < path.size(); ++k) {
    put(path.times[k]);
    for (int i = 0; i < path.m; ++i) {
      os << ',';
      put(path.coords[k * path.m + i]);
    }
    os << '\n';
  }
}

SampledPath read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != 't')
    throw FormatError("path csv: missing header");
  int m = static_cast<int>(std::count(line.begin(), line.end(), ','));
  if (m < 2 || m > kMaxDim) throw FormatError("path csv: header must name 2 to 6 coordinates");
  std::string expected = "t";
  for (int i = 1; i <= m; ++i) expected += ",x" + std::to_string(i);
  if (line != expected) throw FormatError("path csv: unexpected header '" + line + "'");
  SampledPath p;
  p.m = m;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const char* cur = line.data();
    const char* end = line.data() + line.size();
    for (int f = 0; f <= m; ++f) {
      double v = 0.0;
      auto r = std::from_chars(cur, end, v);
      if (r.ec != std::errc{}) throw FormatError("path csv: bad number on row " + std::to_string(row));
      (f == 0 ? p.times : p.coords).push_back(v);
      cur = r.ptr;
      if (f < m) {
        if (cur == end || *cur != ',') throw FormatError("path csv: short row " + std::to_string(row));
        ++cur;
      }
    }
    if (cur != end) throw FormatError("path csv: trailing data on row " + std::to_string(row));
  }
  if (p.times.empty()) throw FormatError("path csv: no rows");
  for (std::size_t k = 1; k < p.size(); ++k) p.dt = std::max(p.dt, p.times[k] - p.times[k - 1]);
  return p;
}

}  // namespace ttl
