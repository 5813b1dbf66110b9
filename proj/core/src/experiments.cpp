#include "ttl/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <numbers>
#include <sstream>

#include "ttl/brownian.hpp"
#include "ttl/capacity.hpp"
#include "ttl/error.hpp"
#include "ttl/geometry.hpp"
#include "ttl/grid.hpp"
#include "ttl/parallel.hpp"
#include "ttl/polyline_index.hpp"
#include "ttl/rigidity.hpp"
#include "ttl/stats.hpp"

namespace ttl {

namespace {

std::string fmt(double v) { return format_double(v); }

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt(xs[i]);
  return out;
}

std::string now_utc() {
  // Timestamps live only in the manifest so CSV tables stay reproducible.
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

RunRecord new_record(const std::string& experiment, std::uint64_t seed) {
  RunRecord rec;
  rec.experiment = experiment;
  rec.seed = seed;
  rec.code_version = code_version();
  rec.created_at = now_utc();
  return rec;
}

std::string t_label(double t) { return fmt(t); }

RawValue row(double t, std::uint64_t rep, const std::string& q, double v, double se,
             const std::string& method, double param, RngSeed seed) {
  RawValue r;
  r.t = t;
  r.replicate = rep;
  r.quantity = q;
  r.value = v;
  r.stderr = se;
  r.method = method;
  r.param = param;
  r.seed = seed;
  return r;
}

// Mean and standard error of the values of one quantity at one t.
Estimate per_t(const RunRecord& rec, const std::string& q, double t) {
  RunningStats s;
  for (const auto* r : rec.select(q))
    if (r->t == t) s.add(r->value);
  return to_estimate(s);
}

// The row of a quantity stored once per t.
const RawValue* single(const RunRecord& rec, const std::string& q, double t) {
  for (const auto* r : rec.select(q))
    if (r->t == t) return r;
  return nullptr;
}

RngSeed cell_seed(std::uint64_t seed, std::size_t ti, std::uint64_t rep) {
  return RngSeed{seed, 0}.child(ti).child(rep);
}

void require_t_list(const std::vector<double>& t_list) {
  require(!t_list.empty(), "experiment: empty t list");
  for (double t : t_list) require(t > 0.0, "experiment: t must be positive");
}

ScalingFit make_fit(const std::string& model, const std::vector<std::string>& names,
                    const LinearFit& lf) {
  ScalingFit f;
  f.model = model;
  f.names = names;
  f.coef = lf.coef;
  f.stderr = lf.stderr;
  f.r2 = lf.r2;
  f.residuals = lf.residuals;
  return f;
}

ScalingFit table_fit(const std::string& model) {
  ScalingFit f;
  f.model = model;
  return f;
}

void add(ScalingFit& f, const std::string& name, double v, double se) {
  f.names.push_back(name);
  f.coef.push_back(v);
  f.stderr.push_back(se);
}

}  // namespace

double RSchedule::operator()(double t) const { return a * std::pow(t, -b); }

std::string FeasibilityReport::violated() const {
  std::string out;
  if (!eps_ok) out = "t^{1/(m-2)} r(t) -> 0 (eps(t) does not decrease over the t-range)";
  if (!q_ok) {
    if (!out.empty()) out += "; ";
    out += m == 4 ? "t/log^3 t / log(1/r(t)) -> infinity (not increasing over the t-range)"
                  : "t/log^3 t * r(t)^{m-4} -> infinity (not increasing over the t-range)";
  }
  return out;
}

std::vector<std::string> FeasibilityReport::lines() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::ostringstream os;
    os << "schedule t=" << fmt(t[i]) << " r=" << fmt(r[i]) << " eps=" << fmt(eps[i])
       << " q=" << fmt(q[i]);
    out.push_back(os.str());
  }
  out.push_back(std::string("schedule eps(t)->0 surrogate: ") + (eps_ok ? "pass" : "FAIL"));
  out.push_back(std::string("schedule growth surrogate: ") + (q_ok ? "pass" : "FAIL"));
  return out;
}

FeasibilityReport feasibility_report(int m, const RSchedule& schedule, const std::vector<double>& t_list) {
  check_dimension(m);
  require(m >= 4, "feasibility_report: needs m >= 4");
  require(t_list.size() >= 2, "feasibility_report: needs at least two t values");
  std::vector<double> ts = t_list;
  std::sort(ts.begin(), ts.end());
  for (double t : ts) require(t > 1.0, "feasibility_report: t must exceed 1");
  FeasibilityReport rep;
  rep.m = m;
  for (double t : ts) {
    double r = schedule(t);
    require(r > 0.0 && r < 1.0, "feasibility_report: r(t) must lie in (0, 1)");
    double lg3 = std::pow(std::log(t), 3);
    rep.t.push_back(t);
    rep.r.push_back(r);
    rep.eps.push_back(std::pow(t, 1.0 / (m - 2)) * r);
    rep.q.push_back(m == 4 ? t / lg3 / std::log(1.0 / r) : t / lg3 * std::pow(r, m - 4));
  }
  rep.eps_ok = rep.q_ok = true;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    rep.eps_ok = rep.eps_ok && rep.eps[i] < rep.eps[i - 1];
    rep.q_ok = rep.q_ok && rep.q[i] > rep.q[i - 1];
  }
  return rep;
}

// ---------------------------------------------------------------- m = 2

ExperimentResult run_scaling_m2(const std::vector<double>& t_list, const M2Config& cfg,
                                std::uint64_t seed) {
  require_t_list(t_list);
  require(cfg.replicates >= 2, "run_scaling_m2: need at least two replicates");
  require(cfg.grid >= 8 && (cfg.grid & (cfg.grid - 1)) == 0,
          "run_scaling_m2: grid must be a power of two");
  ExperimentResult res;
  for (double t : t_list)
    if (t < 4.0 || t > 36.0)
      res.notes.push_back("warning: t=" + fmt(t) +
                          " is outside [4, 36]; Monte Carlo variance grows quickly there");
  RunRecord rec = new_record("scaling_m2", seed);
  rec.config = {{"m", "2"},
                {"t", join(t_list)},
                {"grid", std::to_string(cfg.grid)},
                {"dt", fmt(cfg.dt)},
                {"replicates", std::to_string(cfg.replicates)}};
  int k_max = 0;
  while ((1 << k_max) < cfg.grid) ++k_max;
  const std::size_t reps = static_cast<std::size_t>(cfg.replicates);

  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    std::vector<std::vector<RawValue>> out(reps);
    parallel_for(reps, [&](std::size_t j) {
      RngSeed s = cell_seed(seed, ti, j);
      SampledPath path = sample_path(2, t, cfg.dt, s);
      GridField f = distance_field(path, cfg.grid);
      double d2 = dsquared(f);
      GoodSquareCounts g = good_square_counts(path, k_max);
      double lower = 0.0, upper = 0.0;
      auto& o = out[j];
      o.push_back(row(t, j, "D2", d2, 0.0, "grid", cfg.grid, s));
      for (int k = 1; k <= k_max; ++k) {
        double area = static_cast<double>(g.counts[k]) * std::ldexp(1.0, -2 * k);
        lower += std::ldexp(1.0, -2 * k) * area / 16.0;
        upper += 8.0 * std::ldexp(1.0, -2 * k) * area;
        o.push_back(row(t, j, "good_area", area, 0.0, "dyadic", k, s));
      }
      // points outside every good square up to k_max sit in a hit k_max-square
      upper += 2.0 * std::ldexp(1.0, -2 * k_max);
      o.push_back(row(t, j, "good_lower", lower, 0.0, "dyadic", k_max, s));
      o.push_back(row(t, j, "good_upper", upper, 0.0, "dyadic", k_max, s));
      o.push_back(row(t, j, "rho", inradius(f).value, 0.0, "grid", cfg.grid, s));
    });
    for (auto& o : out)
      for (auto& r : o) rec.rows.push_back(std::move(r));
  }
  rec.fits = fit_scaling_m2(rec);
  res.fit = rec.fits.front();
  res.record = std::move(rec);
  return res;
}

std::vector<ScalingFit> fit_scaling_m2(const RunRecord& rec) {
  std::vector<double> ts = rec.t_values("D2");
  require(ts.size() >= 2, "fit_scaling_m2: need at least two t values");
  std::vector<std::vector<double>> X;
  std::vector<double> y, w;
  ScalingFit table = table_fit("m2_sandwich");
  for (double t : ts) {
    Estimate e = per_t(rec, "D2", t);
    require(e.mean > 0.0, "fit_scaling_m2: non-positive mean D2");
    double rel = e.stderr / e.mean;
    X.push_back({std::sqrt(t), 1.0});
    y.push_back(std::log(e.mean) - 0.25 * std::log(t));
    w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1.0);
    Estimate lo = per_t(rec, "good_lower", t), hi = per_t(rec, "good_upper", t);
    add(table, "D2@" + t_label(t), e.mean, e.stderr);
    add(table, "lower@" + t_label(t), lo.mean, lo.stderr);
    add(table, "upper@" + t_label(t), hi.mean, hi.stderr);
    // p_k = sum_{j <= k} E(area of good j-squares), the chance a fixed
    // k-square is avoided
    double p = 0.0, weighted = 0.0;
    int k_last = 0;
    for (int k = 1;; ++k) {
      RunningStats s;
      for (const auto* r : rec.select("good_area"))
        if (r->t == t && r->param == k) s.add(r->value);
      if (s.n == 0) break;
      p += s.mean;
      weighted += std::ldexp(1.0, -2 * k) * p;
      k_last = k;
      add(table, "p" + std::to_string(k) + "@" + t_label(t), p, 0.0);
    }
    // (3/64) sum 4^-k p_k <= E D^2 <= 6 sum 4^-k p_k; the tail beyond k_last
    // is bounded with p_k <= 1
    add(table, "psum_lower@" + t_label(t), 3.0 / 64.0 * weighted, 0.0);
    add(table, "psum_upper@" + t_label(t), 6.0 * (weighted + std::ldexp(1.0, -2 * k_last) / 3.0), 0.0);
  }
  LinearFit lf = least_squares(X, y, w);
  std::vector<ScalingFit> fits;
  fits.push_back(make_fit("m2_exponent", {"alpha", "const"}, lf));
  fits.push_back(std::move(table));
  return fits;
}

// ---------------------------------------------------------------- m = 3

ExperimentResult run_scaling_m3(const std::vector<double>& t_list, const M3Config& cfg,
                                std::uint64_t seed) {
  require_t_list(t_list);
  require(cfg.cap_replicates >= 2, "run_scaling_m3: need at least two capacity replicates");
  ExperimentResult res;
  RunRecord rec = new_record("scaling_m3", seed);
  rec.config = {{"m", "3"},
                {"t", join(t_list)},
                {"dt_unit", fmt(cfg.dt_unit)},
                {"h_unit", fmt(cfg.h_unit)},
                {"paths", std::to_string(cfg.paths)},
                {"points_per_path", std::to_string(cfg.points_per_path)},
                {"cap_replicates", std::to_string(cfg.cap_replicates)},
                {"cap_walkers", std::to_string(cfg.cap_walkers)},
                {"extrapolate", cfg.extrapolate ? "1" : "0"}};

  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    SpadeConfig sc;
    sc.dt = cfg.dt_unit / (t * t);
    sc.h = cfg.h_unit / t;
    sc.paths = cfg.paths;
    sc.points_per_path = cfg.points_per_path;
    sc.extrapolate = cfg.extrapolate;
    RngSeed s = cell_seed(seed, ti, 0);
    RigidityEstimate e = spade_exit_time(3, t, 0.0, sc, s);
    rec.rows.push_back(row(t, 0, "spade", e.value, e.stderr, "wos", sc.h, s));
    rec.rows.push_back(row(t, 0, "spade_between", e.stderr_between, 0.0, "wos", sc.h, s));
    rec.rows.push_back(row(t, 0, "spade_within", e.stderr_within, 0.0, "wos", sc.h, s));
  }

  // independent unit-time capacities; t = 1 marks the unit horizon
  const std::size_t reps = static_cast<std::size_t>(cfg.cap_replicates);
  std::vector<RawValue> caps(reps);
  for (std::size_t j = 0; j < reps; ++j) {
    RngSeed s = RngSeed{seed, 1}.child(j);
    Sausage target{sample_path(3, 1.0, cfg.dt_unit, s.child(0)), 0.0};
    HittingConfig hc;
    hc.h = cfg.h_unit;
    hc.n = cfg.cap_walkers;
    CapacityEstimate c = cap_hitting(target, hc, s.child(1));
    caps[j] = row(1.0, j, "cap", c.value, c.stderr, "hitting", cfg.h_unit, s);
  }
  for (auto& r : caps) rec.rows.push_back(std::move(r));
  rec.fits = fit_scaling_m3(rec);
  res.fit = rec.fits.front();
  res.record = std::move(rec);
  return res;
}

std::vector<ScalingFit> fit_scaling_m3(const RunRecord& rec) {
  std::vector<double> inv2;
  for (const auto* r : rec.select("cap")) {
    require(r->value > 0.0, "fit_scaling_m3: zero capacity estimate; raise cap_walkers");
    inv2.push_back(1.0 / (r->value * r->value));
  }
  require(inv2.size() >= 4, "fit_scaling_m3: need capacity replicates");
  RunningStats all = summarize(inv2);
  RunningStats half = summarize(std::span<const double>(inv2.data(), inv2.size() / 2));
  const double limit = 2.0 * all.mean, limit_se = 2.0 * all.stderr_mean();
  ScalingFit f = table_fit("m3_ratio");
  add(f, "limit", limit, limit_se);
  add(f, "limit_half", 2.0 * half.mean, 2.0 * half.stderr_mean());
  for (double t : rec.t_values("spade")) {
    const RawValue* sp = single(rec, "spade", t);
    double v = t * t * sp->value, se = t * t * sp->stderr;
    double ratio = v / limit;
    double ratio_se = ratio * std::hypot(se / v, limit_se / limit);
    add(f, "t2spade@" + t_label(t), v, se);
    add(f, "ratio@" + t_label(t), ratio, ratio_se);
  }
  return {f};
}

// ---------------------------------------------------------------- m >= 4

ExperimentResult run_scaling_high_m(int m, const std::vector<double>& t_list, const HighMConfig& cfg,
                                    std::uint64_t seed) {
  check_dimension(m);
  require(m >= 4, "run_scaling_high_m: needs m >= 4");
  require_t_list(t_list);
  require(cfg.cap_replicates >= 2, "run_scaling_high_m: need at least two capacity replicates");
  require(cfg.h_rel > 0.0, "run_scaling_high_m: h_rel must be positive");
  ExperimentResult res;
  FeasibilityReport feas = feasibility_report(m, cfg.schedule, t_list);
  res.notes = feas.lines();
  if (!feas.feasible()) {
    if (!cfg.allow_infeasible)
      throw InvalidArgument("infeasible schedule at the configured t-range: violates " +
                            feas.violated());
    res.notes.push_back("warning: running an infeasible schedule; violates " + feas.violated());
  }
  RunRecord rec = new_record("scaling_high_m", seed);
  rec.config = {{"m", std::to_string(m)},
                {"t", join(t_list)},
                {"r_a", fmt(cfg.schedule.a)},
                {"r_b", fmt(cfg.schedule.b)},
                {"dt_unit", fmt(cfg.dt_unit)},
                {"h_rel", fmt(cfg.h_rel)},
                {"paths", std::to_string(cfg.paths)},
                {"points_per_path", std::to_string(cfg.points_per_path)},
                {"cap_replicates", std::to_string(cfg.cap_replicates)},
                {"cap_walkers", std::to_string(cfg.cap_walkers)},
                {"extrapolate", cfg.extrapolate ? "1" : "0"},
                {"allow_infeasible", cfg.allow_infeasible ? "1" : "0"},
                {"feasible", feas.feasible() ? "1" : "0"}};

  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    const double r = cfg.schedule(t);
    const double scale = std::pow(t, -1.0 / (m - 2));
    const double eps = r / scale;
    SpadeConfig sc;
    sc.dt = cfg.dt_unit * scale * scale;
    sc.h = cfg.h_rel * r;
    sc.paths = cfg.paths;
    sc.points_per_path = cfg.points_per_path;
    sc.extrapolate = cfg.extrapolate;
    RngSeed s = cell_seed(seed, ti, 0);
    RigidityEstimate e = spade_exit_time(m, t, r, sc, s);
    rec.rows.push_back(row(t, 0, "spade", e.value, e.stderr, "wos", sc.h, s));
    rec.rows.push_back(row(t, 0, "spade_between", e.stderr_between, 0.0, "wos", sc.h, s));
    rec.rows.push_back(row(t, 0, "spade_within", e.stderr_within, 0.0, "wos", sc.h, s));
    rec.rows.push_back(row(t, 0, "r", r, 0.0, "schedule", 0.0, s));
    rec.rows.push_back(row(t, 0, "eps", eps, 0.0, "schedule", 0.0, s));

    const std::size_t reps = static_cast<std::size_t>(cfg.cap_replicates);
    for (std::size_t j = 0; j < reps; ++j) {
      RngSeed cs = cell_seed(seed, ti, j + 1);
      Sausage target{sample_path(m, 1.0, cfg.dt_unit, cs.child(0)), eps};
      HittingConfig hc;
      hc.h = cfg.h_rel * eps;
      hc.n = cfg.cap_walkers;
      CapacityEstimate c = cap_hitting(target, hc, cs.child(1));
      rec.rows.push_back(row(t, j, "cap", c.value, c.stderr, "hitting", hc.h, cs));
    }
  }
  rec.fits = fit_scaling_high_m(rec);
  res.fit = rec.fits.front();
  res.record = std::move(rec);
  return res;
}

std::vector<ScalingFit> fit_scaling_high_m(const RunRecord& rec) {
  const int m = std::stoi(rec.config.at("m"));
  const double km = kappa(m);
  ScalingFit f = table_fit("high_m_ratio");
  for (double t : rec.t_values("spade")) {
    const RawValue* sp = single(rec, "spade", t);
    std::vector<double> inv;
    for (const auto* r : rec.select("cap"))
      if (r->t == t) {
        require(r->value > 0.0, "fit_scaling_high_m: zero capacity estimate; raise cap_walkers");
        inv.push_back(1.0 / r->value);
      }
    require(inv.size() >= 2, "fit_scaling_high_m: need capacity replicates at every t");
    RunningStats s = summarize(inv);
    double norm = 1.0 / (km * std::pow(t, 2.0 / (m - 2)));
    double rhs = norm * s.mean, rhs_se = norm * s.stderr_mean();
    double ratio = sp->value / rhs;
    double ratio_se = ratio * std::hypot(sp->stderr / sp->value, rhs_se / rhs);
    add(f, "spade@" + t_label(t), sp->value, sp->stderr);
    add(f, "rhs@" + t_label(t), rhs, rhs_se);
    add(f, "ratio@" + t_label(t), ratio, ratio_se);
    // same ratio with the rate-t capacity normalization (no 1/kappa_m)
    add(f, "ratio_unit_rate@" + t_label(t), ratio / km, ratio_se / km);
  }
  return {f};
}

// ---------------------------------------------------------------- c_m

ExperimentResult estimate_cm(int m, const std::vector<double>& t_list, const CmConfig& cfg,
                             std::uint64_t seed) {
  check_dimension(m);
  require(m >= 4, "estimate_cm: needs m >= 4");
  require_t_list(t_list);
  require(cfg.replicates >= 2, "estimate_cm: need at least two replicates");
  for (double t : t_list) require(t >= 2.0, "estimate_cm: t must be at least 2");
  ExperimentResult res;
  RunRecord rec = new_record("capacity_law", seed);
  rec.config = {{"m", std::to_string(m)},
                {"t", join(t_list)},
                {"dt", fmt(cfg.dt)},
                {"h", fmt(cfg.h)},
                {"replicates", std::to_string(cfg.replicates)},
                {"walkers", std::to_string(cfg.walkers)}};
  HittingConfig hc;
  hc.h = cfg.h;
  hc.n = cfg.walkers;
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    for (std::size_t j = 0; j < static_cast<std::size_t>(cfg.replicates); ++j) {
      RngSeed s = cell_seed(seed, ti, j);
      SampledPath path = sample_path(m, t, cfg.dt, s.child(0));
      std::size_t mid = index_at_time(path, 0.5 * t);
      CapacityEstimate whole = cap_hitting(Sausage{path, 1.0}, hc, s.child(1));
      CapacityEstimate first = cap_hitting(Sausage{slice(path, 0, mid), 1.0}, hc, s.child(2));
      CapacityEstimate second =
          cap_hitting(Sausage{slice(path, mid, path.size() - 1), 1.0}, hc, s.child(3));
      double norm = capacity_normalization(m, t);
      rec.rows.push_back(row(t, j, "C", norm * whole.value, norm * whole.stderr, "hitting", cfg.h, s));
      rec.rows.push_back(row(t, j, "cap_whole", whole.value, whole.stderr, "hitting", cfg.h, s));
      rec.rows.push_back(row(t, j, "cap_first", first.value, first.stderr, "hitting", cfg.h, s));
      rec.rows.push_back(row(t, j, "cap_second", second.value, second.stderr, "hitting", cfg.h, s));
    }
  }
  rec.fits = fit_cm(rec);
  res.fit = rec.fits.front();
  res.record = std::move(rec);
  return res;
}

std::vector<ScalingFit> fit_cm(const RunRecord& rec) {
  std::vector<double> ts = rec.t_values("C");
  require(ts.size() >= 2, "fit_cm: need at least two t values");
  std::vector<std::vector<double>> X;
  std::vector<double> y, w;
  ScalingFit table = table_fit("cm_table");
  for (double t : ts) {
    Estimate e = per_t(rec, "C", t);
    double rel = e.stderr / e.mean;
    X.push_back({std::log(t), 1.0});
    y.push_back(std::log(e.mean));
    w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1.0);
    add(table, "C@" + t_label(t), e.mean, e.stderr);
  }
  LinearFit lf = least_squares(X, y, w);
  ScalingFit slope = make_fit("cm_flatness", {"slope", "log_c"}, lf);

  // per realization: cap(whole) <= cap(first) + cap(second) within 3 combined stderr
  std::map<std::pair<double, std::uint64_t>, std::array<const RawValue*, 3>> groups;
  for (const auto& r : rec.rows) {
    int slot = r.quantity == "cap_whole" ? 0 : r.quantity == "cap_first" ? 1 : r.quantity == "cap_second" ? 2 : -1;
    if (slot >= 0) groups[{r.t, r.replicate}][static_cast<std::size_t>(slot)] = &r;
  }
  std::size_t checked = 0, violations = 0;
  double worst = -1e300;
  for (const auto& [key, g] : groups) {
    if (!g[0] || !g[1] || !g[2]) continue;
    ++checked;
    double excess = g[0]->value - g[1]->value - g[2]->value;
    double se = std::sqrt(g[0]->stderr * g[0]->stderr + g[1]->stderr * g[1]->stderr +
                          g[2]->stderr * g[2]->stderr);
    double z = se > 0.0 ? excess / se : (excess > 0.0 ? 1e300 : -1e300);
    worst = std::max(worst, z);
    if (excess > 3.0 * se) ++violations;
  }
  add(table, "subadditivity_checked", static_cast<double>(checked), 0.0);
  add(table, "subadditivity_violations", static_cast<double>(violations), 0.0);
  add(table, "subadditivity_worst_z", worst, 0.0);
  return {slope, table};
}

// ---------------------------------------------------------------- inradius

double inradius_prediction(int m, double t) {
  check_dimension(m);
  require(m >= 3, "inradius_prediction: needs m >= 3");
  require(t > 1.0, "inradius_prediction: t must exceed 1");
  return std::pow(m / ((m - 2) * kappa(m)) * std::log(t) / t, 1.0 / (m - 2));
}

ExperimentResult inradius_scaling(int m, const std::vector<double>& t_list, const InradiusConfig& cfg,
                                  std::uint64_t seed) {
  check_dimension(m);
  require_t_list(t_list);
  require(cfg.replicates >= 2, "inradius_scaling: need at least two replicates");
  ExperimentResult res;
  RunRecord rec = new_record("inradius", seed);
  rec.config = {{"m", std::to_string(m)},
                {"t", join(t_list)},
                {"replicates", std::to_string(cfg.replicates)}};
  if (m == 2) {
    rec.config["grid"] = std::to_string(cfg.grid);
    rec.config["dt"] = fmt(cfg.dt);
  } else {
    rec.config["dt_rel"] = fmt(cfg.dt_rel);
    rec.config["rel_tol"] = fmt(cfg.rel_tol);
  }
  const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    const double dt = m == 2 ? cfg.dt : cfg.dt_rel * std::pow(inradius_prediction(m, t), 2);
    std::vector<RawValue> out(reps);
    parallel_for(reps, [&](std::size_t j) {
      RngSeed s = cell_seed(seed, ti, j);
      SampledPath path = sample_path(m, t, dt, s);
      if (m == 2) {
        GridField f = distance_field(path, cfg.grid);
        out[j] = row(t, j, "rho", inradius(f).value, 0.0, "grid", cfg.grid, s);
      } else {
        TorusIndex index(path);
        FarthestPoint fp = farthest_point(index, cfg.rel_tol);
        out[j] = row(t, j, "rho", fp.value, 0.0, "branch_bound", dt, s);
      }
    });
    for (auto& r : out) rec.rows.push_back(std::move(r));
  }
  rec.fits = fit_inradius(rec);
  res.fit = rec.fits.front();
  res.record = std::move(rec);
  return res;
}

std::vector<ScalingFit> fit_inradius(const RunRecord& rec) {
  const int m = std::stoi(rec.config.at("m"));
  std::vector<double> ts = rec.t_values("rho");
  require(!ts.empty(), "fit_inradius: no inradius rows");
  ScalingFit table = table_fit("inradius_table");
  std::vector<std::vector<double>> X;
  std::vector<double> y, w;
  for (double t : ts) {
    Estimate e = per_t(rec, "rho", t);
    add(table, "rho@" + t_label(t), e.mean, e.stderr);
    if (m == 2) {
      double rel = e.stderr / e.mean;
      X.push_back({std::sqrt(t), 1.0});
      y.push_back(std::log(e.mean));
      w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1.0);
    } else {
      double pred = inradius_prediction(m, t);
      add(table, "ratio@" + t_label(t), e.mean / pred, e.stderr / pred);
    }
  }
  if (m == 2) {
    require(ts.size() >= 2, "fit_inradius: need at least two t values");
    ScalingFit g = make_fit("inradius_exponent", {"gamma", "const"}, least_squares(X, y, w));
    return {g, table};
  }
  return {table};
}

std::vector<ScalingFit> refit(const RunRecord& rec) {
  if (rec.experiment == "scaling_m2") return fit_scaling_m2(rec);
  if (rec.experiment == "scaling_m3") return fit_scaling_m3(rec);
  if (rec.experiment == "scaling_high_m") return fit_scaling_high_m(rec);
  if (rec.experiment == "capacity_law") return fit_cm(rec);
  if (rec.experiment == "inradius") return fit_inradius(rec);
  throw FormatError("refit: unknown experiment '" + rec.experiment + "'");
}

}  // namespace ttl
