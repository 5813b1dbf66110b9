#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ttl/brownian.hpp"
#include "ttl/capacity.hpp"
#include "ttl/error.hpp"
#include "ttl/experiments.hpp"
#include "ttl/geometry.hpp"
#include "ttl/grid.hpp"
#include "ttl/parallel.hpp"
#include "ttl/rigidity.hpp"
#include "ttl/run_record.hpp"
#include "ttl/spectral.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 1;
constexpr int kNumerical = 2;

struct Common {
  std::uint64_t seed = 1;
  int workers = 0;
  std::string out;
};

std::string num(double v) { return ttl::format_double(v); }

// Every option of the subcommand as it was finally resolved (flag, config
// file or default), so a record says exactly how it was produced.
void echo_options(const CLI::App* sub, std::map<std::string, std::string>& cfg) {
  for (const CLI::Option* opt : sub->get_options()) {
    std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "out") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
    } else {
      value = opt->get_default_str();
    }
    cfg["cli." + sub->get_name() + "." + name] = value;
  }
}

// Mean and standard error of one quantity at each t, for plotting.
void write_plot(const ttl::RunRecord& rec, const fs::path& dir) {
  std::string q = "rho", ylabel = "inradius", logy = "";
  if (rec.experiment == "scaling_m2") q = "D2", ylabel = "E D^2", logy = "set logscale y\n";
  if (rec.experiment == "scaling_m3" || rec.experiment == "scaling_high_m") q = "spade", ylabel = "E T";
  if (rec.experiment == "capacity_law") q = "C", ylabel = "C(t)";

  std::ofstream dat(dir / "plot.dat");
  dat << "# t mean stderr (" << q << ")\n";
  for (double t : rec.t_values(q)) {
    auto rows = rec.select(q);
    ttl::RunningStats s;
    double single_se = 0.0;
    for (const auto* r : rows)
      if (r->t == t) {
        s.add(r->value);
        single_se = r->stderr;
      }
    double se = s.n > 1 ? s.stderr_mean() : single_se;
    dat << num(t) << ' ' << num(s.mean) << ' ' << num(se) << '\n';
  }
  std::ofstream gp(dir / "plot.gp");
  gp << "set terminal pngcairo size 800,600\n"
     << "set output 'plot.png'\n"
     << "set xlabel 't'\n"
     << "set ylabel '" << ylabel << "'\n"
     << logy
     << "set title '" << rec.experiment << "'\n"
     << "plot 'plot.dat' using 1:2:3 with yerrorbars title '" << q << "', \\\n"
     << "     'plot.dat' using 1:2 with lines notitle\n";
}

void print_fits(const std::vector<ttl::ScalingFit>& fits) {
  for (const auto& f : fits) {
    std::cout << f.model;
    if (f.r2 != 0.0) std::cout << "  r2=" << num(f.r2);
    std::cout << '\n';
    for (std::size_t i = 0; i < f.names.size(); ++i)
      std::cout << "  " << f.names[i] << " = " << num(f.coef[i]) << " +- " << num(f.stderr[i]) << '\n';
  }
}

void finish_record(ttl::RunRecord& rec, const CLI::App* sub, const Common& common,
                   const std::vector<std::string>& notes) {
  echo_options(sub, rec.config);
  for (const auto& n : notes) std::cerr << n << '\n';
  print_fits(rec.fits);
  if (!common.out.empty()) {
    ttl::persist(rec, common.out);
    write_plot(rec, common.out);
    std::cout << "record written to " << common.out << '\n';
  }
}

std::vector<double> default_t(const std::vector<double>& t, std::vector<double> fallback) {
  return t.empty() ? fallback : t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttl: Brownian paths on the flat torus, their sausages, torsion, capacity and spectra"};
  app.require_subcommand(1);
  app.fallthrough();
  // "--h" is the absorption shell, so help keeps only its long form
  app.set_help_flag("--help", "print this help and exit");
  app.set_config("--config", "", "INI file with one [subcommand] section; flags override it");

  Common common;
  app.add_option("--seed", common.seed, "root seed (integer)")->capture_default_str();
  app.add_option("--workers", common.workers, "worker threads (count; default $TTL_WORKERS or 1)")
      ->envname("TTL_WORKERS")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", common.out, "output directory for records, tables and plots");

  // sample
  struct {
    int m = 2;
    double t = 1.0, dt = 1e-3;
  } sa;
  auto* sample = app.add_subcommand("sample", "sample one Brownian path on T^m and write it as CSV");
  sample->add_option("--m", sa.m, "dimension (2..6)")->capture_default_str();
  sample->add_option("--t", sa.t, "time horizon (Brownian time, generator Delta)")->capture_default_str();
  sample->add_option("--dt", sa.dt, "time step (Brownian time)")->capture_default_str();

  // rigidity
  struct {
    int m = 2, grid = 256;
    double t = 1.0, dt = 1e-3, r = 0.0, h = 1e-3;
    std::string method = "grid";
    std::uint64_t points = 1000;
  } ri;
  auto* rigidity = app.add_subcommand("rigidity", "torsional rigidity of T^m minus a Brownian sausage");
  rigidity->add_option("--m", ri.m, "dimension (2..6)")->capture_default_str();
  rigidity->add_option("--t", ri.t, "time horizon (Brownian time)")->capture_default_str();
  rigidity->add_option("--dt", ri.dt, "time step (Brownian time)")->capture_default_str();
  rigidity->add_option("--r", ri.r, "sausage radius (torus length; 0 = bare path)")->capture_default_str();
  rigidity->add_option("--grid", ri.grid, "grid cells per side (count)")->capture_default_str();
  rigidity->add_option("--h", ri.h, "walk-on-spheres absorption shell (torus length)")->capture_default_str();
  rigidity->add_option("--method", ri.method, "grid, wos or both")
      ->check(CLI::IsMember({"grid", "wos", "both"}))
      ->capture_default_str();
  rigidity->add_option("--points", ri.points, "walk-on-spheres start points (count)")->capture_default_str();

  // capacity
  struct {
    int m = 3;
    std::string target = "ball", method = "hitting";
    double radius = 1.0, t = 1.0, dt = 1e-3, h = 1e-4, R = 0.0, R_out = 0.0;
    std::uint64_t n = 100000;
  } ca;
  auto* capacity = app.add_subcommand("capacity", "Newtonian capacity of a ball or a sausage in R^m");
  capacity->add_option("--m", ca.m, "dimension (3..6)")->capture_default_str();
  capacity->add_option("--target", ca.target, "ball or path")
      ->check(CLI::IsMember({"ball", "path"}))
      ->capture_default_str();
  capacity->add_option("--radius,--r", ca.radius, "ball or sausage radius (length)")->capture_default_str();
  capacity->add_option("--t", ca.t, "path horizon for --target path (Brownian time)")->capture_default_str();
  capacity->add_option("--dt", ca.dt, "path time step (Brownian time)")->capture_default_str();
  capacity->add_option("--h", ca.h, "absorption shell (length)")->capture_default_str();
  capacity->add_option("--R", ca.R, "launch sphere radius (length; 0 = twice the target radius)")
      ->capture_default_str();
  capacity->add_option("--R-out", ca.R_out, "kill sphere radius (length; 0 = 1% bias bound)")
      ->capture_default_str();
  capacity->add_option("--n,--reps", ca.n, "walkers or sojourn pairs (count)")->capture_default_str();
  capacity->add_option("--method", ca.method, "hitting or sojourn (lower bound)")
      ->check(CLI::IsMember({"hitting", "sojourn"}))
      ->capture_default_str();

  // spectral
  struct {
    int m = 2, grid = 128, square = 0;
    double t = 1.0, dt = 1e-3, r = 0.0;
  } sp;
  auto* spectral = app.add_subcommand("spectral", "principal Dirichlet eigenvalue of T^m minus an obstacle");
  spectral->add_option("--m", sp.m, "dimension (2..6)")->capture_default_str();
  spectral->add_option("--t", sp.t, "time horizon (Brownian time)")->capture_default_str();
  spectral->add_option("--dt", sp.dt, "time step (Brownian time)")->capture_default_str();
  spectral->add_option("--r", sp.r, "sausage radius (torus length; 0 = bare path)")->capture_default_str();
  spectral->add_option("--grid", sp.grid, "grid cells per side (count)")->capture_default_str();
  spectral->add_option("--square", sp.square,
                       "use the dyadic square of side 2^-k instead of a path (k; 0 = path)")
      ->capture_default_str();

  // scaling
  struct {
    std::string theorem = "1";
    int m = 5;
    std::vector<double> t;
    std::optional<int> reps, grid;
    std::optional<double> dt, h;
    std::optional<std::uint64_t> walkers, paths, points;
    double r_a = 0.2, r_b = 0.25;
    bool allow_infeasible = false;
  } sc;
  auto* scaling = app.add_subcommand("scaling", "scaling-law experiments; writes a run record");
  scaling->add_option("--theorem", sc.theorem,
                      "1 (m=2 D^2 route), 2 (m=3 exit time), 3 (m>=4 sausage), cm (capacity law)")
      ->check(CLI::IsMember({"1", "2", "3", "cm"}))
      ->capture_default_str();
  scaling->add_option("--m", sc.m, "dimension for --theorem 3 and cm (4..6)")->capture_default_str();
  scaling->add_option("--t", sc.t, "time horizons (Brownian time, comma separated)")->delimiter(',');
  scaling->add_option("--reps", sc.reps, "replicates per t (count)");
  scaling->add_option("--grid", sc.grid, "grid cells per side for --theorem 1 (count)");
  scaling->add_option("--dt", sc.dt, "time step (Brownian time; unit-horizon step for --theorem 2 and 3)");
  scaling->add_option("--h", sc.h, "absorption shell (length; relative to the radius for --theorem 3)");
  scaling->add_option("--walkers", sc.walkers, "walkers per capacity estimate (count)");
  scaling->add_option("--paths", sc.paths, "torus paths per exit-time estimate (count)");
  scaling->add_option("--points", sc.points, "walk starts per torus path (count)");
  scaling->add_option("--r-a", sc.r_a, "radius schedule r(t) = a t^-b: a (torus length)")->capture_default_str();
  scaling->add_option("--r-b", sc.r_b, "radius schedule exponent b")->capture_default_str();
  scaling->add_flag("--allow-infeasible", sc.allow_infeasible,
                    "run --theorem 3 even when the schedule fails its feasibility surrogates");

  // inradius
  struct {
    int m = 2;
    std::vector<double> t;
    std::optional<int> reps, grid;
    std::optional<double> dt, dt_rel;
  } in;
  auto* inrad = app.add_subcommand("inradius", "largest distance from the torus to the path; writes a run record");
  inrad->add_option("--m", in.m, "dimension (2..6)")->capture_default_str();
  inrad->add_option("--t", in.t, "time horizons (Brownian time, comma separated)")->delimiter(',');
  inrad->add_option("--reps", in.reps, "replicates per t (count)");
  inrad->add_option("--grid", in.grid, "grid cells per side for m = 2 (count)");
  inrad->add_option("--dt", in.dt, "time step for m = 2 (Brownian time)");
  inrad->add_option("--dt-rel", in.dt_rel, "time step over the squared predicted inradius for m >= 3");

  // report
  std::string report_dir;
  auto* report = app.add_subcommand("report", "reload a run record, re-derive its fits and print them");
  report->add_option("dir", report_dir, "record directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  if (common.workers > 0) ttl::set_worker_count(common.workers);
  const ttl::RngSeed root{common.seed, 0};

  try {
    if (*sample) {
      ttl::SampledPath p = ttl::sample_path(sa.m, sa.t, sa.dt, root);
      std::cout << "points " << p.size() << "\n";
      if (!common.out.empty()) {
        fs::create_directories(common.out);
        std::ofstream os(fs::path(common.out) / "path.csv");
        ttl::write_path_csv(os, p);
        std::cout << "path written to " << (fs::path(common.out) / "path.csv").string() << '\n';
      }
    } else if (*rigidity) {
      ttl::SampledPath p = ttl::sample_path(ri.m, ri.t, ri.dt, root.child(0));
      ttl::RunRecord rec;
      rec.experiment = "rigidity";
      rec.seed = common.seed;
      rec.code_version = ttl::code_version();
      auto add_row = [&](const std::string& q, double v, double se, const std::string& method, double param) {
        ttl::RawValue r;
        r.t = ri.t;
        r.quantity = q;
        r.value = v;
        r.stderr = se;
        r.method = method;
        r.param = param;
        r.seed = root;
        rec.rows.push_back(r);
      };
      if (ri.method != "wos") {
        ttl::GridField dist = ttl::distance_field(p, ri.grid);
        ttl::Obstacle ob = ttl::sausage_obstacle(dist, ri.r);
        ttl::TorsionGridResult g = ttl::torsion_grid(ob);
        std::cout << "T_grid " << num(g.estimate.value) << "  (n=" << ri.grid << ", cg iterations "
                  << g.info.iterations << ")\n";
        add_row("T", g.estimate.value, 0.0, "grid", ri.grid);
        if (ri.m == 2) {
          double d2 = ttl::dsquared(dist);
          int k_max = 0;
          while ((1 << k_max) < ri.grid && k_max < 12) ++k_max;
          ttl::GoodSquareCounts gs = ttl::good_square_counts(p, k_max);
          double lower = 0.0, upper = 2.0 * std::ldexp(1.0, -2 * k_max);
          for (int k = 1; k <= k_max; ++k) {
            double area = static_cast<double>(gs.counts[k]) * std::ldexp(1.0, -2 * k);
            lower += std::ldexp(1.0, -2 * k) * area / 16.0;
            upper += 8.0 * std::ldexp(1.0, -2 * k) * area;
          }
          bool ok = lower <= d2 && d2 <= upper;
          std::cout << "D2 " << num(d2) << "\n"
                    << "sandwich " << num(lower) << " <= D2 <= " << num(upper) << "  "
                    << (ok ? "holds" : "VIOLATED") << "\n";
          add_row("D2", d2, 0.0, "grid", ri.grid);
          add_row("good_lower", lower, 0.0, "dyadic", k_max);
          add_row("good_upper", upper, 0.0, "dyadic", k_max);
        }
      }
      if (ri.method != "grid") {
        ttl::Sausage s{p, ri.r};
        ttl::RigidityEstimate w = ttl::torsion_wos(s, ri.m, ri.h, ri.points, 1, root.child(1));
        std::cout << "T_wos " << num(w.value) << " +- " << num(w.stderr) << "  (h=" << num(ri.h) << ")\n";
        add_row("T", w.value, w.stderr, "wos", ri.h);
      }
      echo_options(rigidity, rec.config);
      if (!common.out.empty()) ttl::persist(rec, common.out);
    } else if (*capacity) {
      ttl::check_dimension(ca.m);
      ttl::Sausage target;
      if (ca.target == "ball") {
        std::vector<double> o(ca.m, 0.0);
        target = ttl::Sausage{ttl::single_point_path(o), ca.radius};
      } else {
        target = ttl::Sausage{ttl::sample_path(ca.m, ca.t, ca.dt, root.child(0)), ca.radius};
      }
      ttl::CapacityEstimate c;
      if (ca.method == "sojourn") {
        c = ttl::cap_sojourn_lower(target.path, ca.radius, ca.n, root.child(1));
      } else {
        ttl::HittingConfig hc;
        hc.R = ca.R;
        hc.R_out = ca.R_out;
        hc.h = ca.h;
        hc.n = ca.n;
        c = ttl::cap_hitting(target, hc, root.child(1));
      }
      std::cout << "capacity " << num(c.value) << " +- " << num(c.stderr);
      if (c.bias_bound_rel > 0.0) std::cout << "  (low by at most " << num(100.0 * c.bias_bound_rel) << "%)";
      std::cout << '\n';
      if (ca.target == "ball") {
        double exact = ttl::cap_ball(ca.m, ca.radius);
        std::cout << "exact " << num(exact) << "  ratio " << num(c.value / exact) << '\n';
      }
    } else if (*spectral) {
      ttl::Obstacle ob;
      if (sp.square > 0) {
        if (sp.m != 2) throw ttl::InvalidArgument("--square needs --m 2");
        ob = ttl::dyadic_square_obstacle(sp.grid, sp.square);
      } else {
        ob = ttl::sausage_obstacle(ttl::sample_path(sp.m, sp.t, sp.dt, root.child(0)), sp.r, sp.grid);
      }
      ttl::EigenResult e = ttl::lambda1_grid(ob);
      std::cout << "lambda1 " << num(e.lambda1) << "\n"
                << "residual " << num(e.residual) << "  components " << e.components << " (solved "
                << e.components_solved << ")\n";
      if (sp.square > 0)
        std::cout << "2 pi / (k log 2) " << num(2.0 * std::numbers::pi / (sp.square * std::log(2.0))) << '\n';
    } else if (*scaling) {
      ttl::ExperimentResult res;
      if (sc.theorem == "1") {
        ttl::M2Config cfg;
        if (sc.grid) cfg.grid = *sc.grid;
        if (sc.dt) cfg.dt = *sc.dt;
        if (sc.reps) cfg.replicates = *sc.reps;
        res = ttl::run_scaling_m2(default_t(sc.t, {4, 9, 16, 25}), cfg, common.seed);
      } else if (sc.theorem == "2") {
        ttl::M3Config cfg;
        if (sc.dt) cfg.dt_unit = *sc.dt;
        if (sc.h) cfg.h_unit = *sc.h;
        if (sc.reps) cfg.cap_replicates = *sc.reps;
        if (sc.walkers) cfg.cap_walkers = *sc.walkers;
        if (sc.paths) cfg.paths = *sc.paths;
        if (sc.points) cfg.points_per_path = *sc.points;
        res = ttl::run_scaling_m3(default_t(sc.t, {4, 8, 16}), cfg, common.seed);
      } else if (sc.theorem == "3") {
        ttl::HighMConfig cfg;
        cfg.schedule = ttl::RSchedule{sc.r_a, sc.r_b};
        cfg.allow_infeasible = sc.allow_infeasible;
        if (sc.dt) cfg.dt_unit = *sc.dt;
        if (sc.h) cfg.h_rel = *sc.h;
        if (sc.reps) cfg.cap_replicates = *sc.reps;
        if (sc.walkers) cfg.cap_walkers = *sc.walkers;
        if (sc.paths) cfg.paths = *sc.paths;
        if (sc.points) cfg.points_per_path = *sc.points;
        res = ttl::run_scaling_high_m(sc.m, default_t(sc.t, {8, 16, 32}), cfg, common.seed);
      } else {
        ttl::CmConfig cfg;
        if (sc.dt) cfg.dt = *sc.dt;
        if (sc.h) cfg.h = *sc.h;
        if (sc.reps) cfg.replicates = *sc.reps;
        if (sc.walkers) cfg.walkers = *sc.walkers;
        res = ttl::estimate_cm(sc.m, default_t(sc.t, {8, 16, 32, 64}), cfg, common.seed);
      }
      finish_record(res.record, scaling, common, res.notes);
    } else if (*inrad) {
      ttl::InradiusConfig cfg;
      if (in.reps) cfg.replicates = *in.reps;
      if (in.grid) cfg.grid = *in.grid;
      if (in.dt) cfg.dt = *in.dt;
      if (in.dt_rel) cfg.dt_rel = *in.dt_rel;
      std::vector<double> fallback = in.m == 2 ? std::vector<double>{4, 9, 16, 25}
                                               : std::vector<double>{4, 8, 16, 32};
      ttl::ExperimentResult res = ttl::inradius_scaling(in.m, default_t(in.t, fallback), cfg, common.seed);
      finish_record(res.record, inrad, common, res.notes);
    } else if (*report) {
      ttl::RunRecord rec = ttl::load(report_dir);
      std::vector<ttl::ScalingFit> fits = ttl::refit(rec);
      std::cout << "experiment " << rec.experiment << "  seed " << rec.seed << "  config "
                << ttl::hex64(rec.config_hash()) << "  code " << rec.code_version << '\n';
      print_fits(fits);
      bool same = fits.size() == rec.fits.size();
      for (std::size_t i = 0; same && i < fits.size(); ++i)
        same = fits[i].coef == rec.fits[i].coef && fits[i].stderr == rec.fits[i].stderr;
      std::cout << "stored fits " << (same ? "reproduced" : "DIFFER from the re-derived ones") << '\n';
      if (!common.out.empty()) {
        fs::create_directories(common.out);
        write_plot(rec, common.out);
      }
      if (!same) return kNumerical;
    }
  } catch (const ttl::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const ttl::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const ttl::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return 0;
}
