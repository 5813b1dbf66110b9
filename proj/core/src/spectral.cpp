#include "ttl/spectral.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ttl/error.hpp"
#include "ttl/geometry.hpp"
#include "ttl/linear_solver.hpp"
#include "ttl/parallel.hpp"

namespace ttl {

double ball_lambda1(int m) {
  double j = boost::math::cyl_bessel_j_zero(0.5 * m - 1.0, 1);
  return j * j;
}

double faber_krahn_bound(int m, double volume) {
  return ball_lambda1(m) * std::pow(unit_ball_volume(m) / volume, 2.0 / m);
}

namespace {

struct ComponentEigen {
  double mu = 0.0;  // eigenvalue of the h^2-scaled operator
  std::vector<double> x;
  double residual = 0.0;
  int iterations = 0;
};

ComponentEigen inverse_iteration(const FreeCellOperator& A, double obstacle_fraction) {
  const std::size_t N = A.size();
  auto M = default_preconditioner(A, obstacle_fraction);
  ComponentEigen out;
  std::vector<double> x(N, 1.0 / std::sqrt(static_cast<double>(N))), y(N, 0.0);
  double mu = 0.0;
  const int max_outer = 500;
  for (int it = 1; it <= max_outer; ++it) {
    if (mu > 0.0)
      for (std::size_t i = 0; i < N; ++i) y[i] = x[i] / mu;
    pcg(A, x, y, *M, 1e-10, 50 * A.n);
    double xy = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      xy += x[i] * y[i];
      yy += y[i] * y[i];
    }
    mu = xy / yy;
    double ny = std::sqrt(yy);
    // A (y/|y|) = x/|y|, so the residual needs no extra product
    double res = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double xn = y[i] / ny;
      double e = x[i] / ny - mu * xn;
      res += e * e;
      x[i] = xn;
    }
    out.residual = std::sqrt(res) / mu;
    out.iterations = it;
    if (out.residual <= 1e-8) break;
    if (it == max_outer)
      throw NumericalFailure("lambda1_grid: inverse iteration did not converge");
  }
  out.mu = mu;
  out.x = std::move(x);
  return out;
}

}  // namespace

EigenResult lambda1_grid(const Obstacle& ob) {
  const GridField& mask = ob.mask;
  std::size_t n_obs = ob.obstacle_cells();
  if (n_obs == 0) throw InvalidArgument("lambda1_grid: empty obstacle");
  if (n_obs == mask.size()) throw InvalidArgument("lambda1_grid: empty free set");
  Components comp = free_components(ob);
  const double vol = mask.cell_volume();
  const double h2 = 1.0 / (static_cast<double>(mask.n) * mask.n);
  const double frac = static_cast<double>(n_obs) / mask.size();

  std::vector<std::int32_t> order(comp.count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int32_t a, std::int32_t b) { return comp.sizes[a] > comp.sizes[b]; });

  EigenResult res;
  res.lambda1 = std::numeric_limits<double>::infinity();
  res.components = static_cast<std::size_t>(comp.count);
  std::int32_t best_id = -1;
  FreeCellOperator best_op;
  ComponentEigen best;
  for (std::int32_t id : order) {
    double fk = faber_krahn_bound(mask.m, static_cast<double>(comp.sizes[id]) * vol);
    if (0.9 * fk >= res.lambda1) continue;
    FreeCellOperator A = build_operator(ob, &comp.label, id);
    ComponentEigen e = inverse_iteration(A, frac);
    ++res.components_solved;
    double lam = e.mu / h2;
    if (lam < res.lambda1) {
      res.lambda1 = lam;
      best_id = id;
      best = std::move(e);
      best_op = std::move(A);
    }
  }
  res.phi1 = make_field(mask.m, mask.n, FieldKind::eigenfunction, 0.0);
  double sum = std::accumulate(best.x.begin(), best.x.end(), 0.0);
  double norm = 1.0 / std::sqrt(vol);  // x has unit counting norm
  if (sum < 0.0) norm = -norm;
  for (std::size_t i = 0; i < best_op.size(); ++i) res.phi1.values[best_op.cell[i]] = norm * best.x[i];
  res.residual = best.residual;
  res.iterations = best.iterations;
  res.component_cells = comp.sizes[best_id];
  return res;
}

EigenResult lambda1_grid(const GridField& obstacle_mask) {
  require(obstacle_mask.kind == FieldKind::mask, "lambda1_grid: expected a mask field");
  Obstacle ob;
  ob.mask = obstacle_mask;
  return lambda1_grid(ob);
}

double theta_image_sum(double s) {
  require(s > 0.0, "heat kernel: s must be positive");
  double acc = 1.0;
  for (int k = 1;; ++k) {
    double term = std::exp(-static_cast<double>(k) * k / (4.0 * s));
    acc += 2.0 * term;
    if (term < 1e-17 * acc) break;
  }
  return acc / std::sqrt(4.0 * std::numbers::pi * s);
}

double theta_spectral_sum(double s) {
  require(s > 0.0, "heat kernel: s must be positive");
  double acc = 1.0;
  const double c = 4.0 * std::numbers::pi * std::numbers::pi * s;
  for (int k = 1;; ++k) {
    double term = std::exp(-c * k * k);
    acc += 2.0 * term;
    if (term < 1e-17 * acc) break;
  }
  return acc;
}

double heat_kernel_diag(int m, double s) {
  check_dimension(m);
  if (!(s > 0.0)) throw InvalidArgument("heat_kernel_diag: s must be positive");
  // both series are the same function; use whichever converges fastest
  double f = s < 1.0 / (4.0 * std::numbers::pi) ? theta_image_sum(s) : theta_spectral_sum(s);
  return std::pow(f, m);
}

double small_k_constant(int m) {
  check_dimension(m);
  if (m <= 2) throw InvalidArgument("small_k_constant: m must be at least 3");
  auto f = [m](double s) {
    if (s <= 0.0) return 0.0;
    return std::pow(4.0 * std::numbers::pi * s, -0.5 * m) * std::exp(-m / (4.0 * s));
  };
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14, &err);
  if (err > 1e-10) throw NumericalFailure("small_k_constant: quadrature did not reach 1e-10");
  return v;
}

EigcapReport check_eigcap(const Sausage& target, const EigcapConfig& cfg, RngSeed seed) {
  const int m = target.path.m;
  if (m < 3) throw InvalidArgument("check_eigcap: m must be at least 3");
  double diam = 0.0;
  for (std::size_t a = 0; a < target.path.size(); ++a)
    for (std::size_t b = a + 1; b < target.path.size(); ++b) {
      double d2 = 0.0;
      for (int i = 0; i < m; ++i) d2 += std::pow(target.path.point(a)[i] - target.path.point(b)[i], 2);
      diam = std::max(diam, std::sqrt(d2));
    }
  diam += 2.0 * target.radius;
  if (diam > 0.5) throw InvalidArgument("check_eigcap: target diameter exceeds 1/2");

  EigcapReport rep;
  Obstacle ob = sausage_obstacle(target.path, target.radius, cfg.grid);
  rep.lambda1 = lambda1_grid(ob).lambda1;
  HittingConfig hc;
  hc.h = cfg.h;
  hc.n = cfg.walkers;
  rep.cap = cap_hitting(target, hc, seed);
  rep.k_m = small_k_constant(m);
  rep.rhs = rep.k_m * rep.cap.value;
  double rel = rep.cap.value > 0.0 ? rep.cap.stderr / rep.cap.value : 0.0;
  rep.holds = rep.lambda1 >= rep.rhs * (1.0 - 3.0 * rel);
  return rep;
}

LambdaTorsionReport check_lambda_torsion(int m, double t, double r, const LambdaTorsionConfig& cfg, RngSeed seed) {
  check_dimension(m);
  if (m <= 3) {
    require(r == 0.0, "check_lambda_torsion: m <= 3 uses the bare path (r = 0)");
  } else {
    require(r > 0.0, "check_lambda_torsion: m >= 4 needs r > 0");
  }
  require(cfg.replicates >= 2, "check_lambda_torsion: need at least two replicates");
  const auto reps = static_cast<std::size_t>(cfg.replicates);
  std::vector<double> lam(reps), tor(reps);
  parallel_for(reps, [&](std::size_t k) {
    SampledPath p = sample_path(m, t, cfg.dt, seed.child(k));
    Obstacle ob = sausage_obstacle(p, r, cfg.grid);
    lam[k] = lambda1_grid(ob).lambda1;
    tor[k] = torsion_grid(ob).estimate.value;
  });
  LambdaTorsionReport rep;
  rep.lambda1 = to_estimate(summarize(lam));
  rep.spade = to_estimate(summarize(tor));
  double e = -2.0 / (m + 2.0);
  rep.rhs = std::pow(rep.spade.mean, e);
  rep.rhs_stderr = std::fabs(e) * rep.rhs * rep.spade.stderr / rep.spade.mean;
  rep.applicable = rep.spade.mean <= 0.5;
  rep.holds = rep.lambda1.mean + 3.0 * rep.lambda1.stderr >= rep.rhs - 3.0 * rep.rhs_stderr;
  return rep;
}

}  // namespace ttl
