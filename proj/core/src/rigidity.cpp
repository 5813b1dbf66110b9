#include "ttl/rigidity.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "ttl/error.hpp"
#include "ttl/geometry.hpp"
#include "ttl/linear_solver.hpp"
#include "ttl/parallel.hpp"
#include "ttl/polyline_index.hpp"

namespace ttl {

std::string to_string(RigidityMethod m) {
  switch (m) {
    case RigidityMethod::wos: return "wos";
    case RigidityMethod::grid: return "grid";
    case RigidityMethod::dsq_lower: return "dsq_lower";
    case RigidityMethod::dsq_upper: return "dsq_upper";
  }
  return "unknown";
}

double torsion_ball(int m, double R) {
  return unit_ball_volume(m) * std::pow(R, m + 2) / (m * (m + 2.0));
}

double torsion_ball_center(int m, double R) { return R * R / (2.0 * m); }

double equal_volume_radius(int m, double vol) {
  return std::pow(vol / unit_ball_volume(m), 1.0 / m);
}

TorsionGridResult torsion_grid(const Obstacle& ob) {
  const GridField& mask = ob.mask;
  std::size_t n_obs = ob.obstacle_cells();
  if (n_obs == 0) throw InvalidArgument("rigidity infinite: no Dirichlet boundary");
  FreeCellOperator A = build_operator(ob);
  TorsionGridResult res;
  res.v = make_field(mask.m, mask.n, FieldKind::torsion, 0.0);
  res.estimate.method = RigidityMethod::grid;
  res.estimate.n_or_h = mask.n;
  res.info.free_cells = A.size();
  if (A.size() == 0) return res;
  auto M = default_preconditioner(A, static_cast<double>(n_obs) / mask.size());
  std::vector<double> b(A.size(), A.h2()), x(A.size(), 0.0);
  SolveStats st = pcg(A, b, x, *M, 1e-10, 50 * mask.n);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < A.size(); ++i) {
    res.v.values[A.cell[i]] = x[i];
    acc += x[i];
  }
  res.estimate.value = static_cast<double>(acc) * mask.cell_volume();
  res.info.iterations = st.iterations;
  res.info.rel_residual = st.rel_residual;
  return res;
}

TorsionGridResult torsion_grid(const GridField& obstacle_mask, int n) {
  require(obstacle_mask.kind == FieldKind::mask, "torsion_grid: expected a mask field");
  require(obstacle_mask.n == n, "torsion_grid: grid size mismatch");
  Obstacle ob;
  ob.mask = obstacle_mask;
  return torsion_grid(ob);
}

double delta_squared_integral(const Obstacle& ob) {
  require(!ob.level.empty(), "delta_squared_integral: obstacle has no level function");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < ob.level.size(); ++i)
    if (ob.mask.values[i] == 0.0) acc += static_cast<long double>(ob.level[i]) * ob.level[i];
  return static_cast<double>(acc) * ob.mask.cell_volume();
}

namespace {

constexpr std::size_t kPointChunk = 256;

// Walks from x until absorption at each shell; adds sum R^2/(2m) reached at
// each shell into out[j].
void wos_walk(const TorusIndex& index, double r, const std::vector<double>& hs, double* x, int m,
              Rng& rng, double* out) {
  const double cap = 0.49 / std::sqrt(static_cast<double>(m));
  double acc = 0.0, u[kMaxDim];
  std::size_t level = 0;
  const std::size_t nh = hs.size();
  for (;;) {
    double d = index.safe_radius(x, cap + r) - r;
    while (level < nh && d <= hs[level]) out[level++] += acc;
    if (level == nh) return;
    acc += d * d / (2.0 * m);
    rng.unit_vector(u, m);
    for (int i = 0; i < m; ++i) {
      x[i] += d * u[i];
      x[i] -= std::floor(x[i]);
    }
  }
}

void check_shells(const std::vector<double>& hs) {
  require(!hs.empty(), "torsion_wos: no absorption shells");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) throw InvalidArgument("torsion_wos: h must be positive");
    if (i && hs[i] > hs[i - 1]) throw InvalidArgument("torsion_wos: shells must be descending");
  }
}

// Per-point means for each shell, points in index order.
std::vector<std::vector<double>> wos_point_means(const TorusIndex& index, double r,
                                                 const std::vector<double>& hs,
                                                 std::uint64_t n_points, std::uint64_t n_walks,
                                                 RngSeed seed) {
  const int m = index.dim();
  const std::size_t nh = hs.size();
  std::vector<std::vector<double>> means(nh, std::vector<double>(n_points, 0.0));
  ChunkPlan plan = plan_chunks(n_points, kPointChunk);
  parallel_for(plan.count(), [&](std::size_t chunk) {
    Rng rng(seed.child(chunk));
    double x0[kMaxDim], x[kMaxDim], acc[16];
    for (std::size_t p = plan.begin(chunk); p < plan.end(chunk); ++p) {
      for (int i = 0; i < m; ++i) x0[i] = rng.uniform();
      std::fill(acc, acc + nh, 0.0);
      for (std::uint64_t w = 0; w < n_walks; ++w) {
        std::copy(x0, x0 + m, x);
        wos_walk(index, r, hs, x, m, rng, acc);
      }
      for (std::size_t j = 0; j < nh; ++j) means[j][p] = acc[j] / static_cast<double>(n_walks);
    }
  });
  return means;
}

}  // namespace

std::vector<RigidityEstimate> torsion_wos_multi(const Sausage& target, const std::vector<double>& hs,
                                                std::uint64_t n_points, std::uint64_t n_walks,
                                                RngSeed seed) {
  check_shells(hs);
  require(hs.size() <= 16, "torsion_wos: at most 16 shells");
  require(target.radius >= 0.0, "sausage radius must be non-negative");
  require(n_points > 0 && n_walks > 0, "torsion_wos: need points and walks");
  TorusIndex index(target.path);
  auto means = wos_point_means(index, target.radius, hs, n_points, n_walks, seed);
  std::vector<RigidityEstimate> out(hs.size());
  for (std::size_t j = 0; j < hs.size(); ++j) {
    RunningStats s = summarize(means[j]);
    out[j].value = s.mean;
    out[j].stderr = s.stderr_mean();
    out[j].stderr_within = out[j].stderr;
    out[j].method = RigidityMethod::wos;
    out[j].n_or_h = hs[j];
    out[j].dt = target.path.dt;
    out[j].seed = seed;
    out[j].n = n_points;
  }
  return out;
}

RigidityEstimate torsion_wos(const Sausage& target, int m, double h, std::uint64_t n_points,
                             std::uint64_t n_walks, RngSeed seed) {
  require(m == target.path.m, "torsion_wos: dimension mismatch");
  return torsion_wos_multi(target, {h}, n_points, n_walks, seed).front();
}

RigidityEstimate torsion_wos_extrapolated(const Sausage& target, double h, std::uint64_t n_points,
                                          RngSeed seed) {
  check_shells({h});
  TorusIndex index(target.path);
  auto means = wos_point_means(index, target.radius, {h, 0.5 * h}, n_points, 1, seed);
  std::vector<double> ex(n_points);
  for (std::size_t p = 0; p < n_points; ++p) ex[p] = 2.0 * means[1][p] - means[0][p];
  RunningStats s = summarize(ex);
  RigidityEstimate e;
  e.value = s.mean;
  e.stderr = s.stderr_mean();
  e.stderr_within = e.stderr;
  e.method = RigidityMethod::wos;
  e.n_or_h = h;
  e.dt = target.path.dt;
  e.seed = seed;
  e.n = n_points;
  return e;
}

RigidityEstimate spade_exit_time(int m, double t, double r, const SpadeConfig& cfg, RngSeed seed) {
  check_dimension(m);
  if (m >= 4 && r <= 0.0)
    throw InvalidArgument("spade = infinity for polar target (m >= 4 needs r > 0)");
  require(r >= 0.0, "spade_exit_time: r must be non-negative");
  require(cfg.paths >= 2, "spade_exit_time: need at least two paths");
  std::vector<double> path_means(cfg.paths);
  RunningStats within;
  for (std::uint64_t p = 0; p < cfg.paths; ++p) {
    RngSeed sp = seed.child(p);
    SampledPath path = sample_path(m, t, cfg.dt, sp.child(0));
    // uniform start on T^m: translate the path by a uniform shift
    Rng shift_rng(sp.child(1));
    std::vector<double> shift(m);
    for (auto& s : shift) s = shift_rng.uniform();
    path = transform(path, 1.0, shift);
    Sausage s{std::move(path), r};
    TorusIndex index(s.path);
    std::vector<double> hs = cfg.extrapolate ? std::vector<double>{cfg.h, 0.5 * cfg.h}
                                             : std::vector<double>{cfg.h};
    auto means = wos_point_means(index, r, hs, cfg.points_per_path, 1, sp.child(2));
    std::vector<double> vals(cfg.points_per_path);
    for (std::size_t k = 0; k < vals.size(); ++k)
      vals[k] = cfg.extrapolate ? 2.0 * means[1][k] - means[0][k] : means[0][k];
    RunningStats ps = summarize(vals);
    path_means[p] = ps.mean;
    within.add(ps.variance() / static_cast<double>(ps.n));
  }
  RunningStats between = summarize(path_means);
  RigidityEstimate e;
  e.value = between.mean;
  double total_var = between.variance() / static_cast<double>(cfg.paths);
  double within_var = within.mean / static_cast<double>(cfg.paths);
  e.stderr = std::sqrt(total_var);
  e.stderr_within = std::sqrt(within_var);
  e.stderr_between = std::sqrt(std::max(total_var - within_var, 0.0));
  e.method = RigidityMethod::wos;
  e.n_or_h = cfg.h;
  e.dt = cfg.dt;
  e.seed = seed;
  e.n = cfg.paths;
  return e;
}

namespace {

void dda_mark(const double* a, const double* b, int G, std::vector<char>& hit) {
  double ax = a[0] * G, ay = a[1] * G, bx = b[0] * G, by = b[1] * G;
  auto ix = static_cast<std::int64_t>(std::floor(ax)), iy = static_cast<std::int64_t>(std::floor(ay));
  auto ex = static_cast<std::int64_t>(std::floor(bx)), ey = static_cast<std::int64_t>(std::floor(by));
  double dx = bx - ax, dy = by - ay;
  int sx = dx > 0 ? 1 : -1, sy = dy > 0 ? 1 : -1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  double tmx = dx != 0.0 ? ((static_cast<double>(ix) + (sx > 0)) - ax) / dx : inf;
  double tmy = dy != 0.0 ? ((static_cast<double>(iy) + (sy > 0)) - ay) / dy : inf;
  double tdx = dx != 0.0 ? 1.0 / std::fabs(dx) : inf;
  double tdy = dy != 0.0 ? 1.0 / std::fabs(dy) : inf;
  auto mark = [&](std::int64_t x, std::int64_t y) {
    auto wx = ((x % G) + G) % G, wy = ((y % G) + G) % G;
    hit[static_cast<std::size_t>(wx) * G + static_cast<std::size_t>(wy)] = 1;
  };
  mark(ix, iy);
  std::int64_t steps = std::llabs(ex - ix) + std::llabs(ey - iy);
  for (std::int64_t s = 0; s < steps; ++s) {
    if (tmx < tmy) {
      ix += sx;
      tmx += tdx;
    } else {
      iy += sy;
      tmy += tdy;
    }
    mark(ix, iy);
  }
}

}  // namespace

GoodSquareCounts good_square_counts(const SampledPath& path, int k_max) {
  if (path.m != 2) throw InvalidArgument("good_square_counts: m must be 2");
  require(k_max >= 0 && k_max <= 12, "good_square_counts: k_max must be in [0, 12]");
  const int G = 1 << k_max;
  std::vector<std::vector<char>> hit(k_max + 1);
  hit[k_max].assign(static_cast<std::size_t>(G) * G, 0);
  for (std::size_t s = 0; s < path.segments(); ++s) {
    const double* p = path.point(s);
    const double* q = path.size() > 1 ? path.point(s + 1) : p;
    double a[2], b[2];
    for (int i = 0; i < 2; ++i) {
      double sh = std::floor(p[i]);
      a[i] = p[i] - sh;
      b[i] = q[i] - sh;
    }
    dda_mark(a, b, G, hit[k_max]);
  }
  for (int k = k_max - 1; k >= 0; --k) {
    int g = 1 << k;
    hit[k].assign(static_cast<std::size_t>(g) * g, 0);
    for (int i = 0; i < 2 * g; ++i)
      for (int j = 0; j < 2 * g; ++j)
        if (hit[k + 1][static_cast<std::size_t>(i) * 2 * g + j])
          hit[k][static_cast<std::size_t>(i / 2) * g + j / 2] = 1;
  }
  GoodSquareCounts out;
  out.k_max = k_max;
  out.counts.assign(k_max + 1, 0);
  for (int k = 1; k <= k_max; ++k) {
    int g = 1 << k;
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j)
        if (!hit[k][static_cast<std::size_t>(i) * g + j] &&
            hit[k - 1][static_cast<std::size_t>(i / 2) * (g / 2) + j / 2])
          ++out.counts[k];
  }
  return out;
}

namespace {

bool segment_meets_box(const double* a, const double* d, const double* lo, const double* hi) {
  double t0 = 0.0, t1 = 1.0;
  for (int i = 0; i < 2; ++i) {
    if (d[i] == 0.0) {
      if (a[i] < lo[i] || a[i] > hi[i]) return false;
      continue;
    }
    double u = (lo[i] - a[i]) / d[i], v = (hi[i] - a[i]) / d[i];
    if (u > v) std::swap(u, v);
    t0 = std::max(t0, u);
    t1 = std::min(t1, v);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

bool path_hits_square(const SampledPath& path, const double* c, double side) {
  require(path.m == 2, "path_hits_square: m must be 2");
  for (std::size_t s = 0; s < path.segments(); ++s) {
    const double* p = path.point(s);
    const double* q = path.size() > 1 ? path.point(s + 1) : p;
    double a[2], d[2];
    for (int i = 0; i < 2; ++i) {
      a[i] = p[i] - std::floor(p[i]);
      d[i] = q[i] - p[i];
    }
    for (int sx = -1; sx <= 1; ++sx)
      for (int sy = -1; sy <= 1; ++sy) {
        double lo[2] = {c[0] + sx - 0.5 * side, c[1] + sy - 0.5 * side};
        double hi[2] = {c[0] + sx + 0.5 * side, c[1] + sy + 0.5 * side};
        if (segment_meets_box(a, d, lo, hi)) return true;
      }
  }
  return false;
}

GoodSquareCounts avoidance_frequencies(double t, double dt, int k_max, std::uint64_t reps,
                                       RngSeed seed) {
  require(k_max >= 0 && k_max <= 12, "avoidance_frequencies: k_max must be in [0, 12]");
  require(reps > 0, "avoidance_frequencies: need replicates");
  std::vector<std::vector<char>> avoid(reps, std::vector<char>(k_max + 1, 0));
  const double c[2] = {0.5, 0.5};
  parallel_for(reps, [&](std::size_t r) {
    Rng rng(seed.child(r).child(7));
    double start[2] = {rng.uniform(), rng.uniform()};
    SampledPath p = t > 0.0 ? sample_path_from(start, t, std::min(dt, t), seed.child(r))
                            : single_point_path(start);
    for (int k = 0; k <= k_max; ++k) avoid[r][k] = !path_hits_square(p, c, std::ldexp(1.0, -k));
  });
  GoodSquareCounts out;
  out.k_max = k_max;
  out.p_hat.assign(k_max + 1, 0.0);
  out.p_stderr.assign(k_max + 1, 0.0);
  for (int k = 0; k <= k_max; ++k) {
    double hits = 0.0;
    for (const auto& a : avoid) hits += a[k];
    double p = hits / static_cast<double>(reps);
    out.p_hat[k] = p;
    out.p_stderr[k] = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  }
  return out;
}

namespace {

// Exit time of generator-Delta Brownian motion from the unit disc started at
// its centre: P(T > s) = sum_n 2/(j_n J_1(j_n)) exp(-j_n^2 s), j_n zeros of J_0.
class DiscExitTime {
 public:
  DiscExitTime() {
    constexpr int terms = 400;
    std::vector<double> j(terms), c(terms);
    for (int k = 0; k < terms; ++k) {
      j[k] = boost::math::cyl_bessel_j_zero(0.0, k + 1);
      c[k] = 2.0 / (j[k] * boost::math::cyl_bessel_j(1, j[k]));
    }
    j1sq_ = j[0] * j[0];
    survival_.resize(kTable + 1);
    survival_[0] = 1.0;
    for (int i = 1; i <= kTable; ++i) {
      double s = kSmax * i / kTable, acc = 0.0;
      for (int k = 0; k < terms; ++k) acc += c[k] * std::exp(-j[k] * j[k] * s);
      survival_[i] = std::clamp(acc, 0.0, 1.0);
    }
    // enforce monotonicity against truncation noise at tiny s
    for (int i = 1; i <= kTable; ++i) survival_[i] = std::min(survival_[i], survival_[i - 1]);
  }

  double sample(double u) const {
    // u uniform in (0,1) is the survival level
    if (u < survival_[kTable]) return kSmax + std::log(survival_[kTable] / u) / j1sq_;
    auto it = std::lower_bound(survival_.rbegin(), survival_.rend(), u);
    std::size_t i = static_cast<std::size_t>(survival_.rend() - it) - 1;  // survival_[i] >= u
    i = std::min<std::size_t>(i, kTable - 1);
    double s0 = survival_[i], s1 = survival_[i + 1];
    double f = s0 > s1 ? (s0 - u) / (s0 - s1) : 0.0;
    return kSmax * (static_cast<double>(i) + f) / kTable;
  }

 private:
  static constexpr int kTable = 1 << 16;
  static constexpr double kSmax = 2.0;
  std::vector<double> survival_;
  double j1sq_ = 0.0;
};

const DiscExitTime& disc_exit_time() {
  static const DiscExitTime table;
  return table;
}

double torus_distance_to_square(const double* x, double half) {
  double acc = 0.0;
  for (int i = 0; i < 2; ++i) {
    double d = std::fabs(x[i] - 0.5);
    d -= std::floor(d);
    d = std::min(d, 1.0 - d);
    double e = std::max(d - half, 0.0);
    acc += e * e;
  }
  return std::sqrt(acc);
}

}  // namespace

AvoidanceResult avoidance_exact(int k, const std::vector<double>& horizons, std::uint64_t reps,
                                RngSeed seed, double eps) {
  require(k >= 1, "avoidance_exact: k must be at least 1");
  require(reps > 0 && !horizons.empty(), "avoidance_exact: need replicates and horizons");
  require(std::is_sorted(horizons.begin(), horizons.end()), "avoidance_exact: horizons must ascend");
  const DiscExitTime& law = disc_exit_time();
  const double half = 0.5 * std::ldexp(1.0, -k);
  const double cap = 0.49;
  const std::size_t nh = horizons.size();
  ChunkPlan plan = plan_chunks(reps, 1024);
  std::vector<std::vector<std::uint64_t>> alive(plan.count(), std::vector<std::uint64_t>(nh, 0));
  parallel_for(plan.count(), [&](std::size_t chunk) {
    Rng rng(seed.child(chunk));
    for (std::size_t w = plan.begin(chunk); w < plan.end(chunk); ++w) {
      double x[2] = {rng.uniform(), rng.uniform()};
      double time = 0.0;
      std::size_t next = 0;
      for (;;) {
        double d = torus_distance_to_square(x, half);
        if (d <= eps) break;
        double rho = std::min(d, cap);
        double u = 0.0;
        do u = rng.uniform(); while (u <= 0.0);
        time += rho * rho * law.sample(u);
        while (next < nh && time >= horizons[next]) ++alive[chunk][next++];
        if (next == nh) break;
        double ang = 2.0 * std::numbers::pi * rng.uniform();
        x[0] += rho * std::cos(ang);
        x[1] += rho * std::sin(ang);
        x[0] -= std::floor(x[0]);
        x[1] -= std::floor(x[1]);
      }
    }
  });
  AvoidanceResult res;
  res.horizons = horizons;
  for (std::size_t j = 0; j < nh; ++j) {
    std::uint64_t total = 0;
    for (const auto& a : alive) total += a[j];
    double p = static_cast<double>(total) / static_cast<double>(reps);
    res.p.push_back(p);
    res.stderr.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(reps)));
  }
  return res;
}

std::vector<double> component_diameters(const GridField& f, double threshold) {
  require(f.m == 2, "component_diameters: m must be 2");
  Components comp = label_components(f, threshold);
  const int n = f.n;
  std::vector<double> diam(comp.count, 0.0);
  std::vector<std::vector<std::size_t>> boundary(comp.count);
  std::vector<char> antipodal(comp.count, 0);
  int idx[2];
  for (std::size_t c = 0; c < f.size(); ++c) {
    std::int32_t id = comp.label[c];
    if (id < 0) continue;
    f.unravel(c, idx);
    bool edge = false;
    for (int dim = 0; dim < 2 && !edge; ++dim)
      for (int dir = -1; dir <= 1 && !edge; dir += 2) {
        int keep = idx[dim];
        idx[dim] = (keep + dir + n) % n;
        edge = comp.label[f.linear(idx)] != id;
        idx[dim] = keep;
      }
    if (edge) boundary[id].push_back(c);
    // cells at maximal circular offset in both axes
    for (int ox = n / 2; ox <= (n + 1) / 2 && !antipodal[id]; ++ox)
      for (int oy = n / 2; oy <= (n + 1) / 2 && !antipodal[id]; ++oy) {
        int j[2] = {(idx[0] + ox) % n, (idx[1] + oy) % n};
        if (comp.label[f.linear(j)] == id) antipodal[id] = 1;
      }
  }
  const double h = 1.0 / n;
  const double full = std::sqrt(2.0) * (n / 2) * h;
  for (std::int32_t id = 0; id < comp.count; ++id) {
    if (antipodal[id]) {
      diam[id] = full;
      continue;
    }
    const auto& b = boundary[id];
    double best = 0.0;
    double xa[2], xb[2];
    for (std::size_t i = 0; i < b.size() && best < full * full; ++i) {
      f.center(b[i], xa);
      for (std::size_t j = i + 1; j < b.size(); ++j) {
        f.center(b[j], xb);
        best = std::max(best, torus_distance_sq(xa, xb, 2));
      }
    }
    diam[id] = std::sqrt(best);
  }
  return diam;
}

}  // namespace ttl
