#include "ttl/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ttl/error.hpp"
#include "ttl/geometry.hpp"
#include "ttl/parallel.hpp"
#include "ttl/polyline_index.hpp"

namespace ttl {

double kappa(int m) {
  check_dimension(m);
  if (m < 3) throw InvalidArgument("Newtonian capacity needs m >= 3");
  return 4.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * (m - 2));
}

double cap_ball(int m, double R) {
  require(R > 0.0, "cap_ball: radius must be positive");
  return kappa(m) * std::pow(R, m - 2);
}

namespace {

constexpr std::size_t kWalkerChunk = 2048;

double mean_step(const SampledPath& p) {
  if (p.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    double s = 0.0;
    for (int i = 0; i < p.m; ++i) s += std::pow(p.point(k)[i] - p.point(k - 1)[i], 2);
    total += std::sqrt(s);
  }
  return total / static_cast<double>(p.size() - 1);
}

double default_cell(const Sausage& s, double h) {
  double step = mean_step(s.path);
  return std::max({2.0 * (s.radius + 2.0 * h), s.radius + 2.0 * step, s.radius + 16.0 * h, 1e-6});
}

struct ResolvedConfig {
  double R, R_out, cell;
};

ResolvedConfig resolve(const Sausage& target, const HittingConfig& cfg, double rho) {
  int m = target.path.m;
  ResolvedConfig rc{};
  rc.R = cfg.R > 0.0 ? cfg.R : 2.0 * rho;
  rc.R_out = cfg.R_out > 0.0 ? cfg.R_out
                             : std::max(5.0, std::pow(100.0, 1.0 / (m - 2))) * rc.R;
  rc.cell = cfg.cell > 0.0 ? cfg.cell : default_cell(target, cfg.h);
  return rc;
}

}  // namespace

std::vector<CapacityEstimate> cap_hitting_multi(const Sausage& target, const HittingConfig& cfg,
                                                const std::vector<double>& hs, RngSeed seed) {
  const int m = target.path.m;
  kappa(m);
  require(target.radius >= 0.0, "cap_hitting: sausage radius must be non-negative");
  require(!hs.empty(), "cap_hitting: no absorption shells");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) throw InvalidArgument("cap_hitting: h must be positive");
    if (i && hs[i] > hs[i - 1]) throw InvalidArgument("cap_hitting: shells must be descending");
  }
  require(cfg.n > 0, "cap_hitting: need at least one walker");

  HittingConfig c = cfg;
  c.h = hs.back();
  const double r = target.radius;
  // half a cell must exceed r + h so the index is exact inside the absorption shell
  double cell_guess = c.cell > 0.0 ? c.cell : default_cell(target, hs.front());
  LiftIndex index(target.path, std::max(cell_guess, 2.0 * (r + 2.0 * hs.front())));
  const double rho = index.enclosing_radius() + r;
  ResolvedConfig rc = resolve(target, c, rho);
  if (rho > 0.5 * rc.R * (1.0 + 1e-12))
    throw InvalidArgument("cap_hitting: target not enclosed by the ball of radius R/2");
  if (rc.R_out < 5.0 * rc.R * (1.0 - 1e-12))
    throw InvalidArgument("cap_hitting: R_out must be at least 5 R");

  const std::vector<double>& ctr = index.center();
  const double R = rc.R, R_out = rc.R_out, kill = 1e-3 * R_out;
  const std::size_t nh = hs.size();
  ChunkPlan plan = plan_chunks(cfg.n, kWalkerChunk);
  std::vector<std::vector<std::uint64_t>> hits(plan.count(), std::vector<std::uint64_t>(nh, 0));

  parallel_for(plan.count(), [&](std::size_t chunk) {
    Rng rng(seed.child(chunk));
    double x[kMaxDim], u[kMaxDim];
    auto& local = hits[chunk];
    for (std::size_t w = plan.begin(chunk); w < plan.end(chunk); ++w) {
      rng.unit_vector(u, m);
      for (int i = 0; i < m; ++i) x[i] = ctr[i] + R * u[i];
      std::size_t level = 0;  // shells already entered
      for (;;) {
        double rad2 = 0.0;
        for (int i = 0; i < m; ++i) rad2 += (x[i] - ctr[i]) * (x[i] - ctr[i]);
        double to_kill = R_out - std::sqrt(rad2);
        if (to_kill <= kill) break;
        double d = index.safe_radius(x) - r;
        while (level < nh && d <= hs[level]) {
          ++local[level];
          ++level;
        }
        if (level == nh) break;
        double step = std::min(d, to_kill);
        rng.unit_vector(u, m);
        for (int i = 0; i < m; ++i) x[i] += step * u[i];
      }
    }
  });

  double scale = kappa(m) * std::pow(R, m - 2);
  double bias = std::pow(R / R_out, m - 2);
  std::vector<CapacityEstimate> out(nh);
  for (std::size_t k = 0; k < nh; ++k) {
    std::uint64_t total = 0;
    for (const auto& hv : hits) total += hv[k];
    double p = static_cast<double>(total) / static_cast<double>(cfg.n);
    out[k].value = scale * p;
    out[k].stderr = scale * std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.n));
    out[k].n_replicates = cfg.n;
    out[k].bias_bound_rel = bias;
  }
  return out;
}

CapacityEstimate cap_hitting(const Sausage& target, const HittingConfig& cfg, RngSeed seed) {
  return cap_hitting_multi(target, cfg, {cfg.h}, seed).front();
}

CapacityEstimate cap_hitting(const Sausage& target, int m, double R, double R_out, double h,
                             std::uint64_t n, RngSeed seed) {
  require(m == target.path.m, "cap_hitting: dimension mismatch");
  require(R > 0.0 && R_out > 0.0, "cap_hitting: radii must be positive");
  HittingConfig cfg;
  cfg.R = R;
  cfg.R_out = R_out;
  cfg.h = h;
  cfg.n = n;
  return cap_hitting(target, cfg, seed);
}

namespace {

void point_at(const SampledPath& p, double t, double* out) {
  const int m = p.m;
  if (p.size() == 1) {
    std::copy(p.point(0), p.point(0) + m, out);
    return;
  }
  auto it = std::upper_bound(p.times.begin(), p.times.end(), t);
  std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - p.times.begin()), 1,
                                          p.size() - 1);
  double t0 = p.times[k - 1], t1 = p.times[k];
  double s = t1 > t0 ? std::clamp((t - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
  for (int i = 0; i < m; ++i) out[i] = p.point(k - 1)[i] + s * (p.point(k)[i] - p.point(k - 1)[i]);
}

void uniform_in_ball(Rng& rng, double r, int m, double* out) {
  rng.unit_vector(out, m);
  double rad = r * std::pow(rng.uniform(), 1.0 / m);
  for (int i = 0; i < m; ++i) out[i] *= rad;
}

}  // namespace

CapacityEstimate cap_sojourn_lower(const SampledPath& path, double r, std::uint64_t n_pairs,
                                   RngSeed seed) {
  const int m = path.m;
  const double km = kappa(m);
  if (r < 0.0) throw InvalidArgument("cap_sojourn_lower: r must be non-negative");
  if (n_pairs == 0) throw InvalidArgument("cap_sojourn_lower: n_pairs must be positive");
  const double t = path.t_total();
  if (r == 0.0 && !(t > 0.0))
    throw InvalidArgument("cap_sojourn_lower: bare single point has zero capacity");
  const double gap = path.size() > 1 ? path.dt : 0.0;

  ChunkPlan plan = plan_chunks(n_pairs, 4096);
  std::vector<RunningStats> parts(plan.count());
  parallel_for(plan.count(), [&](std::size_t chunk) {
    Rng rng(seed.child(chunk));
    double pu[kMaxDim], pv[kMaxDim], qu[kMaxDim], qv[kMaxDim], x[kMaxDim], y[kMaxDim];
    std::fill(x, x + m, 0.0);
    std::fill(y, y + m, 0.0);
    auto energy = [&](const double* a, const double* b) {
      double d2 = 0.0;
      for (int i = 0; i < m; ++i) d2 += std::pow(a[i] + x[i] - b[i] - y[i], 2);
      return 1.0 / (km * std::pow(d2, 0.5 * (m - 2)));
    };
    for (std::size_t k = plan.begin(chunk); k < plan.end(chunk); ++k) {
      double u = 0.0, v = 0.0;
      do {
        u = t * rng.uniform();
        v = t * rng.uniform();
      } while (r == 0.0 && std::fabs(u - v) < gap);
      if (r > 0.0) {
        uniform_in_ball(rng, r, m, x);
        uniform_in_ball(rng, r, m, y);
      }
      point_at(path, u, pu);
      point_at(path, v, pv);
      // time reflection (u, v) -> (t-u, t-v) as the antithetic partner
      point_at(path, t - u, qu);
      point_at(path, t - v, qv);
      parts[chunk].add(0.5 * (energy(pu, pv) + energy(qu, qv)));
    }
  });
  RunningStats all;
  for (const auto& p : parts) all.merge(p);
  CapacityEstimate est;
  est.value = 1.0 / all.mean;
  est.stderr = all.stderr_mean() / (all.mean * all.mean);
  est.n_replicates = n_pairs;
  return est;
}

double capacity_normalization(int m, double t) {
  require(m >= 4, "scaled capacity needs m >= 4");
  require(t >= 2.0, "scaled capacity needs t >= 2");
  return m == 4 ? std::log(t) / t : 1.0 / t;
}

ScaledCapacitySample scaled_capacity(const SampledPath& path, const HittingConfig& cfg,
                                     RngSeed seed) {
  const int m = path.m;
  if (m <= 3) throw InvalidArgument("scaled_capacity: m must be at least 4");
  double t = path.t_total();
  double norm = capacity_normalization(m, t);
  ScaledCapacitySample s;
  s.m = m;
  s.t = t;
  s.raw = cap_hitting(Sausage{path, 1.0}, cfg, seed);
  s.value = norm * s.raw.value;
  s.stderr = norm * s.raw.stderr;
  return s;
}

ScalingRelationReport check_scaling_relation(int m, double eps, const ScalingRelationConfig& cfg,
                                             RngSeed seed) {
  require(m >= 4, "check_scaling_relation: m must be at least 4");
  require(eps > 0.0 && eps <= 1.0, "check_scaling_relation: eps must be in (0, 1]");
  require(cfg.replicates >= 2, "check_scaling_relation: need at least two replicates");
  const auto reps = static_cast<std::size_t>(cfg.replicates);
  std::vector<double> left(reps), right(reps);
  const double scale = std::pow(eps, m - 2);
  const double t_long = 1.0 / (eps * eps);

  // Replicates run serially so each capacity estimate can use the pool.
  for (std::size_t k = 0; k < reps; ++k) {
    RngSeed sk = seed.child(k);
    HittingConfig hc;
    hc.n = cfg.walkers;

    SampledPath a = sample_path(m, 1.0, cfg.dt_unit, sk.child(1));
    hc.h = cfg.h_rel * eps;
    left[k] = cap_hitting(Sausage{a, eps}, hc, sk.child(2)).value;

    SampledPath b = sample_path(m, t_long, cfg.dt_unit * t_long, sk.child(3));
    hc.h = cfg.h_rel;
    right[k] = scale * cap_hitting(Sausage{b, 1.0}, hc, sk.child(4)).value;
  }
  ScalingRelationReport rep;
  rep.m = m;
  rep.eps = eps;
  rep.left = to_estimate(summarize(left));
  rep.right = to_estimate(summarize(right));
  rep.ratio = rep.left.mean / rep.right.mean;
  double rel = std::hypot(rep.left.stderr / rep.left.mean, rep.right.stderr / rep.right.mean);
  rep.ratio_lo = rep.ratio * (1.0 - 1.96 * rel);
  rep.ratio_hi = rep.ratio * (1.0 + 1.96 * rel);
  rep.contains_one = rep.ratio_lo <= 1.0 && 1.0 <= rep.ratio_hi;
  return rep;
}

}  // namespace ttl
