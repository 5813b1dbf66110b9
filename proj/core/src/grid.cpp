#include "ttl/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "ttl/error.hpp"
#include "ttl/geometry.hpp"
#include "ttl/polyline_index.hpp"

namespace ttl {

double GridField::cell_volume() const { return std::pow(1.0 / n, m); }

void GridField::center(std::size_t lin, double* x) const {
  for (int i = m - 1; i >= 0; --i) {
    x[i] = (static_cast<double>(lin % n) + 0.5) / n;
    lin /= n;
  }
}

std::size_t GridField::linear(const int* idx) const {
  std::size_t lin = 0;
  for (int i = 0; i < m; ++i) lin = lin * n + idx[i];
  return lin;
}

void GridField::unravel(std::size_t lin, int* idx) const {
  for (int i = m - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(lin % n);
    lin /= n;
  }
}

GridField make_field(int m, int n, FieldKind kind, double fill) {
  check_dimension(m);
  require(n >= 8, "grid: n must be at least 8");
  double cells = std::pow(static_cast<double>(n), m);
  require(cells <= 4.0e8, "grid: too many cells");
  GridField f;
  f.m = m;
  f.n = n;
  f.kind = kind;
  f.values.assign(static_cast<std::size_t>(cells), fill);
  return f;
}

std::size_t Obstacle::obstacle_cells() const {
  return static_cast<std::size_t>(std::count(mask.values.begin(), mask.values.end(), 1.0));
}

GridField distance_field(const SampledPath& path, int n) {
  const int m = path.m;
  GridField f = make_field(m, n, FieldKind::distance, std::numeric_limits<double>::infinity());
  const double h = 1.0 / n;
  // Every centre within `reach` of its nearest segment is updated by that
  // segment below; the rest are resolved by the index.
  const double reach = 2.0 * h;
  const std::size_t n_seg = path.segments();
  for (std::size_t s = 0; s < n_seg; ++s) {
    const double* p = path.point(s);
    const double* q = path.size() > 1 ? path.point(s + 1) : p;
    double a[kMaxDim], d[kMaxDim];
    int lo[kMaxDim], hi[kMaxDim];
    for (int i = 0; i < m; ++i) {
      a[i] = p[i] - std::floor(p[i]);
      d[i] = q[i] - p[i];
      double u = std::min(a[i], a[i] + d[i]) - reach, v = std::max(a[i], a[i] + d[i]) + reach;
      lo[i] = static_cast<int>(std::ceil(u * n - 0.5));
      hi[i] = static_cast<int>(std::floor(v * n - 0.5));
      if (hi[i] - lo[i] >= n) hi[i] = lo[i] + n - 1;
    }
    int idx[kMaxDim];
    std::copy(lo, lo + m, idx);
    for (;;) {
      double x[kMaxDim];
      std::size_t lin = 0;
      for (int i = 0; i < m; ++i) {
        x[i] = (idx[i] + 0.5) * h;
        int w = idx[i] % n;
        lin = lin * n + (w < 0 ? w + n : w);
      }
      double d2 = point_segment_distance_sq(x, a, d, m);
      if (d2 < f.values[lin]) f.values[lin] = d2;
      int i = m - 1;
      while (i >= 0 && idx[i] == hi[i]) {
        idx[i] = lo[i];
        --i;
      }
      if (i < 0) break;
      ++idx[i];
    }
  }
  bool need_index = false;
  for (double& v : f.values) {
    if (v <= reach * reach)
      v = std::sqrt(v);
    else
      need_index = true, v = -1.0;
  }
  if (need_index) {
    TorusIndex index(path);
    double x[kMaxDim];
    for (std::size_t lin = 0; lin < f.size(); ++lin) {
      if (f.values[lin] >= 0.0) continue;
      f.center(lin, x);
      f.values[lin] = index.distance(x);
    }
  }
  return f;
}

double dsquared(const GridField& f) {
  require(f.kind == FieldKind::distance, "dsquared: field is not a distance field");
  long double acc = 0.0L;
  for (double v : f.values) acc += static_cast<long double>(v) * v;
  return static_cast<double>(acc / static_cast<long double>(f.size()));
}

Argmax inradius(const GridField& f) {
  require(f.kind == FieldKind::distance, "inradius: field is not a distance field");
  Argmax r;
  r.value = -1.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.values[i] > r.value) {
      r.value = f.values[i];
      r.index = i;
    }
  r.location.resize(f.m);
  f.center(r.index, r.location.data());
  return r;
}

double bare_path_thickening(int m, int n) { return 0.5 * std::sqrt(static_cast<double>(m)) / n; }

Obstacle sausage_obstacle(const GridField& dist, double r) {
  require(dist.kind == FieldKind::distance, "sausage_obstacle: need a distance field");
  require(r >= 0.0, "sausage radius must be non-negative");
  double re = r > 0.0 ? r : bare_path_thickening(dist.m, dist.n);
  Obstacle ob;
  ob.mask = make_field(dist.m, dist.n, FieldKind::mask);
  ob.level.resize(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    ob.level[i] = dist.values[i] - re;
    ob.mask.values[i] = ob.level[i] <= 0.0 ? 1.0 : 0.0;
  }
  return ob;
}

Obstacle sausage_obstacle(const SampledPath& path, double r, int n) {
  return sausage_obstacle(distance_field(path, n), r);
}

Obstacle sausage_domain(const GridField& dist, double r) {
  require(r > 0.0, "sausage_domain: radius must be positive");
  Obstacle ob;
  ob.mask = make_field(dist.m, dist.n, FieldKind::mask);
  ob.level.resize(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    ob.level[i] = r - dist.values[i];
    ob.mask.values[i] = ob.level[i] <= 0.0 ? 1.0 : 0.0;
  }
  return ob;
}

Obstacle ball_domain(int m, int n, std::span<const double> c, double R) {
  require(static_cast<int>(c.size()) == m, "ball_domain: dimension mismatch");
  require(R > 0.0 && R < 0.5, "ball_domain: radius must be in (0, 1/2)");
  Obstacle ob;
  ob.mask = make_field(m, n, FieldKind::mask);
  ob.level.resize(ob.mask.size());
  double x[kMaxDim];
  for (std::size_t i = 0; i < ob.mask.size(); ++i) {
    ob.mask.center(i, x);
    ob.level[i] = R - std::sqrt(torus_distance_sq(x, c.data(), m));
    ob.mask.values[i] = ob.level[i] <= 0.0 ? 1.0 : 0.0;
  }
  return ob;
}

Obstacle dyadic_square_obstacle(int n, int k) {
  require(k >= 0, "dyadic_square_obstacle: k must be non-negative");
  double half = 0.5 * std::ldexp(1.0, -k);
  Obstacle ob;
  ob.mask = make_field(2, n, FieldKind::mask);
  ob.level.resize(ob.mask.size());
  double x[2];
  for (std::size_t i = 0; i < ob.mask.size(); ++i) {
    ob.mask.center(i, x);
    double ex = std::fabs(x[0] - 0.5) - half, ey = std::fabs(x[1] - 0.5) - half;
    double outside = std::hypot(std::max(ex, 0.0), std::max(ey, 0.0));
    double inside = std::min(std::max(ex, ey), 0.0);
    ob.level[i] = outside + inside;
    ob.mask.values[i] = ob.level[i] <= 0.0 ? 1.0 : 0.0;
  }
  return ob;
}

namespace {

Components flood(const GridField& shape, const std::vector<char>& in) {
  Components c;
  c.label.assign(in.size(), -1);
  std::vector<std::size_t> stack;
  int idx[kMaxDim];
  const int m = shape.m, n = shape.n;
  for (std::size_t s = 0; s < in.size(); ++s) {
    if (!in[s] || c.label[s] >= 0) continue;
    std::int32_t id = c.count++;
    std::size_t size = 0;
    c.label[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      ++size;
      shape.unravel(cur, idx);
      for (int dim = 0; dim < m; ++dim)
        for (int dir = -1; dir <= 1; dir += 2) {
          int keep = idx[dim];
          idx[dim] = (keep + dir + n) % n;
          std::size_t nb = shape.linear(idx);
          idx[dim] = keep;
          if (in[nb] && c.label[nb] < 0) {
            c.label[nb] = id;
            stack.push_back(nb);
          }
        }
    }
    c.sizes.push_back(size);
  }
  return c;
}

}  // namespace

Components label_components(const GridField& f, double threshold) {
  std::vector<char> in(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) in[i] = f.values[i] > threshold;
  return flood(f, in);
}

Components free_components(const Obstacle& ob) {
  std::vector<char> in(ob.mask.size());
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = ob.mask.values[i] == 0.0;
  return flood(ob.mask, in);
}

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = reinterpret_cast<unsigned char*>(&v);
    std::reverse(p, p + sizeof(T));
  }
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("field: truncated file");
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = reinterpret_cast<unsigned char*>(&v);
    std::reverse(p, p + sizeof(T));
  }
  return v;
}

}  // namespace

void write_field_binary(std::ostream& os, const GridField& f) {
  put_le<std::int32_t>(os, f.m);
  put_le<std::int32_t>(os, f.n);
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(f.kind));
  for (double v : f.values) put_le<double>(os, v);
}

GridField read_field_binary(std::istream& is) {
  int m = get_le<std::int32_t>(is);
  int n = get_le<std::int32_t>(is);
  auto kind = get_le<std::uint8_t>(is);
  if (kind > 3) throw FormatError("field: unknown kind byte");
  GridField f;
  try {
    f = make_field(m, n, static_cast<FieldKind>(kind));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("field: bad header: ") + e.what());
  }
  for (auto& v : f.values) v = get_le<double>(is);
  return f;
}

void write_field_csv(std::ostream& os, const GridField& f) {
  require(f.m == 2, "field csv export is only available for m = 2");
  os.precision(17);
  for (int i = 0; i < f.n; ++i) {
    for (int j = 0; j < f.n; ++j) {
      if (j) os << ',';
      os << f.values[static_cast<std::size_t>(i) * f.n + j];
    }
    os << '\n';
  }
}

}  // namespace ttl
