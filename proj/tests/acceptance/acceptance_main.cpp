// Acceptance runner: one PASS/FAIL line per criterion. Tolerances are fixed
// here and never adjusted after a run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ttl/brownian.hpp"
#include "ttl/capacity.hpp"
#include "ttl/experiments.hpp"
#include "ttl/geometry.hpp"
#include "ttl/grid.hpp"
#include "ttl/parallel.hpp"
#include "ttl/rigidity.hpp"
#include "ttl/run_record.hpp"
#include "ttl/spectral.hpp"
#include "ttl/stats.hpp"

namespace fs = std::filesystem;
using namespace ttl;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Collects sub-checks of one criterion.
struct Verdict {
  bool ok = true;
  void check(bool pass, const std::string& what) {
    std::cout << (pass ? "  ok        " : "  VIOLATED  ") << what << '\n';
    ok = ok && pass;
  }
  void note(const std::string& what) const { std::cout << "  note      " << what << '\n'; }
};

std::uint64_t seed_for(int criterion) { return 20240000ULL + static_cast<std::uint64_t>(criterion); }

std::string record_csv(const RunRecord& rec) {
  std::ostringstream os;
  write_raw_csv(os, rec);
  write_fits_csv(os, rec);
  return os.str();
}

void print_fit(const Verdict& v, const ScalingFit& f) {
  for (std::size_t i = 0; i < f.names.size(); ++i)
    v.note(fmt("%s.%s = %.6g +- %.3g", f.model.c_str(), f.names[i].c_str(), f.coef[i], f.stderr[i]));
}

// ---------------------------------------------------------------- 1

bool c01() {
  Verdict v;
  auto rel = [](double a, double b) { return std::fabs(a - b) / std::fabs(b); };
  v.check(rel(kappa(3), 4 * kPi) < 1e-14, fmt("kappa(3) = %.17g vs 4 pi", kappa(3)));
  v.check(rel(kappa(4), 4 * kPi * kPi) < 1e-14, fmt("kappa(4) = %.17g vs 4 pi^2", kappa(4)));
  v.check(rel(kappa(5), 8 * kPi * kPi) < 1e-14, fmt("kappa(5) = %.17g vs 8 pi^2", kappa(5)));
  double k3 = small_k_constant(3);
  v.check(std::fabs(k3 - 0.0101) <= 1e-4, fmt("k_3 = %.6f, band 0.0101 +- 0.0001", k3));
  double worst = 0.0;
  for (double s : {1e-3, 1e-2, 0.05, 0.1, 0.5, 1.0, 5.0, 50.0}) {
    double a = theta_image_sum(s), b = theta_spectral_sum(s);
    worst = std::max(worst, std::fabs(a - b) / b);
    for (int m = 2; m <= 4; ++m) {
      double h = heat_kernel_diag(m, s);
      worst = std::max(worst, std::fabs(h - std::pow(b, m)) / h);
    }
  }
  v.check(worst <= 1e-12, fmt("heat-kernel duality, worst relative gap %.3g (<= 1e-12)", worst));
  return v.ok;
}

// ---------------------------------------------------------------- 2

bool c02() {
  Verdict v;
  const double o[3] = {0.0, 0.0, 0.0};
  Sausage ball{single_point_path(o), 1.0};
  CapacityEstimate c = cap_hitting(ball, 3, 4.0, 400.0, 1e-4, 1000000, RngSeed{seed_for(2), 0});
  double exact = 4 * kPi;
  v.note(fmt("cap = %.5f +- %.5f, exact %.5f, bias bound %.3g", c.value, c.stderr, exact,
             c.bias_bound_rel));
  v.check(c.value >= 0.985 * exact && c.value <= 1.015 * exact,
          fmt("ratio %.4f in [0.985, 1.015]", c.value / exact));
  return v.ok;
}

// ---------------------------------------------------------------- 3

bool c03() {
  Verdict v;
  const double R = 0.25;
  const double c2[2] = {0.5, 0.5};
  TorsionGridResult d = torsion_grid(ball_domain(2, 512, c2, R));
  double exact2 = kPi * std::pow(R, 4) / 8.0;
  v.check(std::fabs(d.estimate.value / exact2 - 1.0) <= 0.01,
          fmt("disc n=512: T = %.6e, exact %.6e, ratio %.5f (within 1%%)", d.estimate.value, exact2,
              d.estimate.value / exact2));
  const double c3[3] = {0.5, 0.5, 0.5};
  TorsionGridResult b = torsion_grid(ball_domain(3, 128, c3, R));
  double exact3 = 4 * kPi * std::pow(R, 5) / 45.0;
  v.check(std::fabs(b.estimate.value / exact3 - 1.0) <= 0.02,
          fmt("ball n=128: T = %.6e, exact %.6e, ratio %.5f (within 2%%)", b.estimate.value, exact3,
              b.estimate.value / exact3));
  return v.ok;
}

// ---------------------------------------------------------------- 4

bool c04() {
  Verdict v;
  RngSeed s{seed_for(4), 0};
  Sausage target{sample_path(3, 1.0, 1e-3, s.child(0)), 0.05};
  const int n = 128;
  TorsionGridResult g = torsion_grid(sausage_obstacle(target.path, target.radius, n));
  const double h = 1e-3;
  RigidityEstimate w = torsion_wos_extrapolated(target, h, 40000, s.child(1));
  double gap = std::fabs(g.estimate.value / w.value - 1.0);
  v.note(fmt("grid n=%d: T = %.6e (%d CG iterations)", n, g.estimate.value, g.info.iterations));
  v.note(fmt("walk-on-spheres 2T(h/2) - T(h), h = %g: T = %.6e +- %.2e", h, w.value, w.stderr));
  v.check(gap <= 0.05, fmt("relative gap %.4f (<= 0.05)", gap));
  return v.ok;
}

// ---------------------------------------------------------------- 5

// Embeddable m=2 sausage: lift extent plus 2r stays below 1/2 per coordinate.
bool fits_half(const SampledPath& p, double r) {
  for (int i = 0; i < p.m; ++i) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t j = 0; j < p.size(); ++j) {
      lo = std::min(lo, p.point(j)[i]);
      hi = std::max(hi, p.point(j)[i]);
    }
    if (hi - lo + 2 * r >= 0.5) return false;
  }
  return true;
}

// Each inequality is tracked as the worst value of lhs / rhs over the tested
// domains, written so that it must stay <= 1.
struct Margins {
  std::map<std::string, std::pair<double, std::string>> worst;
  std::map<std::string, int> count;
  void add(const std::string& name, double q, const std::string& where) {
    auto [it, fresh] = worst.try_emplace(name, q, where);
    if (!fresh && q > it->second.first) it->second = {q, where};
    ++count[name];
  }
  void report(Verdict& v) const {
    for (const auto& [name, w] : worst)
      v.check(w.first <= 1.0, fmt("%s on %d domains: worst margin %.4f (<= 1) at %s", name.c_str(),
                                  count.at(name), w.first, w.second.c_str()));
  }
};

// Bounds (a)-(c) hold on any domain; the symmetrization inequalities need a
// domain that embeds in R^m.
void domain_checks(Margins& mg, const Obstacle& ob, int m, const std::string& label, bool embedded) {
  TorsionGridResult tg = torsion_grid(ob);
  EigenResult eg = lambda1_grid(ob);
  const double T = tg.estimate.value, lam = eg.lambda1;
  const double vol = static_cast<double>(ob.free_cells()) * ob.mask.cell_volume();
  double phimax = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < ob.mask.size(); ++i) {
    if (ob.mask.values[i] != 0.0) continue;
    phimax = std::max(phimax, std::fabs(eg.phi1.values[i]));
    vmax = std::max(vmax, tg.v.values[i]);
  }
  const double Rs = equal_volume_radius(m, vol);
  const double Tball = torsion_ball(m, Rs);
  const double lball = ball_lambda1(m) / (Rs * Rs);
  const double e = (m + 2) / 2.0;

  mg.add("bound(a) T <= 1.05 |O|/lambda1", T / (1.05 * vol / lam), label);
  mg.add("bound(b) T >= 0.95 / (lambda1 max phi^2)", 0.95 / (lam * phimax * phimax) / T, label);
  if (!ob.level.empty())
    mg.add("bound(c) T >= 0.95 int delta^2 / (2m)", 0.95 * delta_squared_integral(ob) / (2.0 * m) / T,
           label);
  if (!embedded) return;
  mg.add("Saint-Venant T <= 1.05 T(ball)", T / (1.05 * Tball), label);
  mg.add("Kohler-Jobin lambda1^{(m+2)/2} T >= 0.95 (ball)",
         0.95 * std::pow(lball, e) * Tball / (std::pow(lam, e) * T), label);
  mg.add("Talenti max v <= 1.05 R*^2/(2m)", vmax / (1.05 * Rs * Rs / (2.0 * m)), label);
}

bool c05() {
  Verdict v;
  RngSeed root{seed_for(5), 0};

  // Random embeddable sausage domains in T^2.
  {
    const int n = 256;
    const double r = 0.03;
    Margins mg;
    int accepted = 0;
    for (std::uint64_t tag = 0; accepted < 20 && tag < 200; ++tag) {
      SampledPath p = sample_path(2, 0.004, 1e-5, root.child(1).child(tag));
      if (!fits_half(p, r)) continue;
      Obstacle ob = sausage_domain(distance_field(p, n), r);
      domain_checks(mg, ob, 2, fmt("sausage #%d", accepted), true);
      ++accepted;
    }
    v.check(accepted == 20, fmt("%d embeddable sausage domains tested", accepted));
    domain_checks(mg, dyadic_square_obstacle(n, 3), 2, "T^2 minus S_3", false);
    mg.report(v);
  }

  // (1/4) D^2 (1 - tol) <= T <= 16 D^2 (1 + tol) on bare paths whose free
  // components all have diameter <= 1/2.
  {
    const int n = 512;
    const double tol = 0.1;
    int used = 0;
    for (double t : {4.0, 9.0}) {
      for (std::uint64_t j = 0; j < 3; ++j) {
        SampledPath p = sample_path(2, t, 1e-3, root.child(2).child(static_cast<std::uint64_t>(t)).child(j));
        GridField f = distance_field(p, n);
        TorsionGridResult tg = torsion_grid(sausage_obstacle(p, 0.0, n));
        std::vector<double> diam = component_diameters(tg.v, 0.0);
        double dmax = diam.empty() ? 0.0 : *std::max_element(diam.begin(), diam.end());
        if (dmax > 0.5) {
          v.note(fmt("sandwich t=%g rep %d skipped: component diameter %.3f", t, static_cast<int>(j), dmax));
          continue;
        }
        ++used;
        double D2 = dsquared(f), T = tg.estimate.value;
        v.check(0.25 * D2 * (1 - tol) <= T && T <= 16 * D2 * (1 + tol),
                fmt("bound(e) t=%g rep %d: %.4e <= T %.4e <= %.4e", t, static_cast<int>(j),
                    0.25 * D2 * (1 - tol), T, 16 * D2 * (1 + tol)));
      }
    }
    v.check(used > 0, fmt("bound(e) evaluated on %d realizations", used));
  }

  // Capacity monotonicity on nested sausages and the sojourn lower bound.
  {
    SampledPath p = sample_path(3, 1.0, 1e-3, root.child(3));
    HittingConfig hc;
    hc.h = 1e-3;
    hc.n = 40000;
    CapacityEstimate small = cap_hitting(Sausage{p, 0.1}, hc, root.child(4));
    CapacityEstimate big = cap_hitting(Sausage{p, 0.2}, hc, root.child(5));
    double se = std::hypot(small.stderr, big.stderr);
    v.check(small.value <= big.value + 3 * se,
            fmt("monotonicity: cap(W_0.1) %.4f <= cap(W_0.2) %.4f + 3 se", small.value, big.value));
    CapacityEstimate soj = cap_sojourn_lower(p, 0.1, 400000, root.child(6));
    double se2 = std::hypot(small.stderr, soj.stderr);
    v.check(soj.value <= small.value + 3 * se2,
            fmt("sojourn %.4f +- %.4f <= hitting %.4f +- %.4f", soj.value, soj.stderr, small.value,
                small.stderr));
  }

  // lambda1 >= k_m cap for a small ball.
  {
    const double c[3] = {0.5, 0.5, 0.5};
    EigcapReport e = check_eigcap(Sausage{single_point_path(c), 0.1}, EigcapConfig{}, root.child(7));
    v.check(e.holds, fmt("eigcap: lambda1 %.4f >= k_3 cap %.4f", e.lambda1, e.rhs));
  }

  // Avoidance of S_k against exp(-t lambda1).
  {
    std::map<int, double> lam;
    for (int k = 2; k <= 6; ++k) lam[k] = lambda1_grid(dyadic_square_obstacle(512, k)).lambda1;
    const std::vector<double> horizons = {2.0, 4.0};
    std::map<int, AvoidanceResult> av;
    for (int k = 2; k <= 6; ++k)
      av[k] = avoidance_exact(k, horizons, k >= 4 ? 1000000 : 200000, root.child(8).child(k));
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
      const double t = horizons[hi];
      int k0 = -1;
      for (int k = 2; k <= 6; ++k) {
        double p = av[k].p[hi], se = av[k].stderr[hi], bound = std::exp(-t * lam[k]);
        double upper = p > 0.0 ? bound * (1.0 + 3.0 * se / p) : bound;
        v.check(p <= upper, fmt("avoidance upper k=%d t=%g: p %.4e <= exp(-t lambda1) %.4e", k, t, p, bound));
        bool lower = p + 3 * se >= 0.25 * bound;
        if (k >= 4)
          v.check(lower, fmt("avoidance lower k=%d t=%g: p %.4e +- %.1e >= exp(-t lambda1)/4 %.4e", k, t, p, se,
                             0.25 * bound));
        if (lower && k0 < 0) k0 = k;
        if (!lower) k0 = -1;
      }
      v.note(k0 > 0 ? fmt("avoidance lower k0 at t=%g: %d (over k = 2..6)", t, k0)
                    : fmt("avoidance lower k0 at t=%g: not reached by k = 6", t));
    }
  }

  // lambda1 >= spade^{-2/(m+2)} at the estimate level.
  {
    LambdaTorsionConfig c2;
    c2.grid = 256;
    c2.replicates = 8;
    LambdaTorsionReport a = check_lambda_torsion(2, 9.0, 0.0, c2, root.child(9));
    v.check(a.applicable && a.holds, fmt("lambda1-torsion m=2 t=9: lambda1 %.4e +- %.1e vs %.4e", a.lambda1.mean,
                                         a.lambda1.stderr, a.rhs));
    LambdaTorsionConfig c3;
    c3.grid = 64;
    c3.replicates = 4;
    LambdaTorsionReport b = check_lambda_torsion(3, 8.0, 0.0, c3, root.child(10));
    v.check(b.applicable && b.holds, fmt("lambda1-torsion m=3 t=8: lambda1 %.4e +- %.1e vs %.4e", b.lambda1.mean,
                                         b.lambda1.stderr, b.rhs));
  }
  return v.ok;
}

// ---------------------------------------------------------------- 6

bool c06() {
  Verdict v;
  const int n = 512;
  std::map<int, double> res;
  for (int k = 2; k <= 6; ++k) {
    double lam = lambda1_grid(dyadic_square_obstacle(n, k)).lambda1;
    double lim = 2 * kPi / (k * std::log(2.0));
    res[k] = lam - lim;
    v.note(fmt("k=%d lambda1 %.5f, 2pi/(k log 2) %.5f, k^2 residual %.3f", k, lam, lim, k * k * res[k]));
  }
  // C is fitted on k = 2..4 and must bound the residuals at k = 5, 6.
  double C = 0.0;
  for (int k = 2; k <= 4; ++k) C = std::max(C, k * k * std::fabs(res[k]));
  double num = 0.0, den = 0.0;
  for (int k = 2; k <= 6; ++k) {
    num += res[k] / (k * k);
    den += 1.0 / std::pow(k, 4);
  }
  v.note(fmt("fitted C = %.3f (least squares over k = 2..6: %.3f)", C, num / den));
  for (int k = 5; k <= 6; ++k)
    v.check(std::fabs(res[k]) <= C / (k * k),
            fmt("k=%d |residual| %.4f <= C/k^2 %.4f", k, std::fabs(res[k]), C / (k * k)));
  return v.ok;
}

// ---------------------------------------------------------------- 7

bool c07() {
  Verdict v;
  ExperimentResult r = run_scaling_m2({4, 9, 16, 25}, M2Config{}, seed_for(7));
  for (const auto& f : r.record.fits) print_fit(v, f);
  double a = r.fit.get("alpha"), target = -4 * std::sqrt(kPi);
  v.check(a >= 1.15 * target && a <= 0.85 * target,
          fmt("alpha %.4f in -4 sqrt(pi) [0.85, 1.15] = [%.4f, %.4f]", a, 1.15 * target, 0.85 * target));
  return v.ok;
}

// ---------------------------------------------------------------- 8

bool c08() {
  Verdict v;
  const std::vector<double> ts = {4, 8, 16};
  ExperimentResult r = run_scaling_m3(ts, M3Config{}, seed_for(8));
  print_fit(v, r.fit);
  for (double t : ts) {
    double q = r.fit.get("ratio@" + format_double(t));
    v.check(q >= 0.7 && q <= 1.3, fmt("t=%g: t^2 spade / (2 E cap^-2) = %.4f in [0.7, 1.3]", t, q));
  }
  return v.ok;
}

// ---------------------------------------------------------------- 9

bool c09() {
  Verdict v;
  ExperimentResult r = estimate_cm(5, {8, 16, 32, 64}, CmConfig{}, seed_for(9));
  for (const auto& f : r.record.fits) print_fit(v, f);
  double slope = r.fit.get("slope");
  v.check(std::fabs(slope) <= 0.1, fmt("|d log C / d log t| = %.4f (<= 0.1)", std::fabs(slope)));
  const ScalingFit& table = r.record.fits.at(1);
  double checked = table.get("subadditivity_checked"), bad = table.get("subadditivity_violations");
  v.check(checked > 0 && bad == 0,
          fmt("subadditivity: %g violations over %g realizations", bad, checked));
  return v.ok;
}

// ---------------------------------------------------------------- 10

bool c10() {
  Verdict v;
  HighMConfig cfg;
  cfg.schedule = {0.2, 0.25};
  cfg.allow_infeasible = true;
  const std::vector<double> ts = {8, 16, 32};
  ExperimentResult r = run_scaling_high_m(5, ts, cfg, seed_for(10));
  for (const auto& line : r.notes) v.note(line);
  print_fit(v, r.fit);
  for (double t : ts) {
    double q = r.fit.get("ratio@" + format_double(t));
    v.check(q >= 0.6 && q <= 1.4, fmt("t=%g: spade / formula = %.4f in [0.6, 1.4]", t, q));
  }
  return v.ok;
}

// ---------------------------------------------------------------- 11

bool c11() {
  Verdict v;
  ExperimentResult a = inradius_scaling(2, {4, 9, 16, 25}, InradiusConfig{}, seed_for(11));
  for (const auto& f : a.record.fits) print_fit(v, f);
  double g = a.fit.get("gamma"), target = -std::sqrt(kPi);
  v.check(g >= 1.2 * target && g <= 0.8 * target,
          fmt("m=2 gamma %.4f in -sqrt(pi) [0.8, 1.2] = [%.4f, %.4f]", g, 1.2 * target, 0.8 * target));

  InradiusConfig c3;
  c3.replicates = 50;
  const std::vector<double> ts = {8, 16, 32};
  ExperimentResult b = inradius_scaling(3, ts, c3, seed_for(11) + 1000);
  print_fit(v, b.fit);
  double prev = 1e300;
  for (double t : ts) {
    double q = b.fit.get("ratio@" + format_double(t));
    v.check(q >= 0.5 && q <= 2.0, fmt("m=3 t=%g: ratio %.4f in [0.5, 2]", t, q));
    v.check(std::fabs(q - 1.0) <= prev, fmt("m=3 t=%g: |ratio - 1| = %.4f not above the previous t", t,
                                            std::fabs(q - 1.0)));
    prev = std::fabs(q - 1.0);
  }
  return v.ok;
}

// ---------------------------------------------------------------- 12

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

bool c12(const std::string& cli, const std::string& workdir) {
  Verdict v;
  // In-process: the same experiment under different pool sizes.
  {
    std::vector<std::string> out;
    for (int w : {1, 3}) {
      set_worker_count(w);
      InradiusConfig ic;
      ic.replicates = 6;
      std::string s = record_csv(inradius_scaling(3, {8, 16}, ic, seed_for(12)).record);
      M2Config mc;
      mc.grid = 64;
      mc.replicates = 6;
      s += record_csv(run_scaling_m2({1, 2}, mc, seed_for(12)).record);
      out.push_back(std::move(s));
    }
    set_worker_count(1);
    v.check(out[0] == out[1], fmt("library records identical for 1 and 3 workers (%zu bytes)", out[0].size()));
  }
  if (cli.empty()) {
    v.note("no --cli given; command-line runs skipped");
    return v.ok;
  }
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"scaling_t1", "scaling --theorem 1 --t 1,2 --reps 6 --grid 64"},
      {"scaling_t2", "scaling --theorem 2 --t 2,4 --reps 4 --walkers 2000 --paths 4 --points 200"},
      {"scaling_cm", "scaling --theorem cm --m 5 --t 4,8 --reps 3 --walkers 2000"},
      {"inradius_m3", "inradius --m 3 --t 8,16 --reps 6"},
  };
  for (const auto& [name, args] : runs) {
    std::vector<fs::path> dirs;
    bool ran = true;
    for (int w : {1, 4}) {
      fs::path dir = fs::path(workdir) / ("w" + std::to_string(w)) / name;
      fs::remove_all(dir);
      fs::create_directories(dir);
      std::string cmd = "\"" + cli + "\" " + args + " --seed " + std::to_string(seed_for(12)) +
                        " --workers " + std::to_string(w) + " --out \"" + dir.string() + "\" > \"" +
                        (dir / "stdout.txt").string() + "\" 2>&1";
      int rc = std::system(cmd.c_str());
      if (rc != 0) {
        v.check(false, fmt("%s: command failed with status %d", name.c_str(), rc));
        ran = false;
      }
      dirs.push_back(dir);
    }
    if (!ran) continue;
    for (const char* file : {"raw.csv", "fits.csv"}) {
      std::string a = slurp(dirs[0] / file), b = slurp(dirs[1] / file);
      v.check(!a.empty() && a == b, fmt("%s/%s identical for 1 and 4 workers (%zu bytes)", name.c_str(), file,
                                        a.size()));
    }
  }
  return v.ok;
}

const char* title(int c) {
  static const char* names[] = {"",
                                "closed-form oracles",
                                "ball capacity",
                                "ball torsion",
                                "walk-on-spheres vs grid",
                                "inequality suite",
                                "dyadic square eigenvalues",
                                "two-dimensional exponent",
                                "three-dimensional limit",
                                "capacity law flatness",
                                "high-dimensional cross-check",
                                "inradius",
                                "determinism"};
  return names[c];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks; prints one PASS/FAIL line per criterion"};
  std::vector<int> which;
  std::string cli, workdir = "acceptance_c12";
  app.add_option("--criterion", which, "criterion numbers (1..12); default all")->check(CLI::Range(1, 12));
  app.add_option("--cli", cli, "path of the ttl executable for criterion 12");
  app.add_option("--workdir", workdir, "scratch directory for criterion 12");
  CLI11_PARSE(app, argc, argv);
  if (which.empty())
    for (int c = 1; c <= 12; ++c) which.push_back(c);

  const std::map<int, std::function<bool()>> table = {
      {1, c01}, {2, c02}, {3, c03}, {4, c04}, {5, c05},  {6, c06},
      {7, c07}, {8, c08}, {9, c09}, {10, c10}, {11, c11}, {12, [&] { return c12(cli, workdir); }}};

  bool all = true;
  for (int c : which) {
    auto t0 = std::chrono::steady_clock::now();
    std::cout << "criterion " << c << ": " << title(c) << '\n' << std::flush;
    bool ok = false;
    std::string err;
    try {
      ok = table.at(c)();
    } catch (const std::exception& e) {
      err = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!err.empty()) std::cout << "  error     " << err << '\n';
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c << " (" << title(c) << ") "
              << fmt("%.1f s", secs) << '\n'
              << std::flush;
    all = all && ok;
  }
  return all ? 0 : 1;
}
