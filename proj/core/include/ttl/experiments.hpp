#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttl/run_record.hpp"

namespace ttl {

struct ExperimentResult {
  RunRecord record;
  ScalingFit fit;
  std::vector<std::string> notes;  // warnings and feasibility lines for the caller to print
};

// r(t) = a t^-b.
struct RSchedule {
  double a = 0.2;
  double b = 0.25;
  double operator()(double t) const;
};

// Finite-t surrogates of the two limits the sausage radius must satisfy:
// eps(t) = t^{1/(m-2)} r(t) should decrease to 0, and
// q(t) = t/log^3 t * r^{m-4} (m >= 5) or t/log^3 t / log(1/r) (m = 4) should grow.
// A surrogate passes when it moves the right way across the whole t-range.
struct FeasibilityReport {
  int m = 5;
  std::vector<double> t, r, eps, q;
  bool eps_ok = false;
  bool q_ok = false;
  bool feasible() const { return eps_ok && q_ok; }
  std::string violated() const;
  std::vector<std::string> lines() const;
};

FeasibilityReport feasibility_report(int m, const RSchedule& schedule, const std::vector<double>& t_list);

// D^2 route in two dimensions: distance fields of torus paths and the
// dyadic good-square sandwich.
struct M2Config {
  int grid = 512;
  double dt = 1e-3;
  int replicates = 200;
};

ExperimentResult run_scaling_m2(const std::vector<double>& t_list, const M2Config& cfg,
                                std::uint64_t seed);
// Fits log E D^2 - (1/4) log t = alpha sqrt(t) + c with delta-method weights.
std::vector<ScalingFit> fit_scaling_m2(const RunRecord& rec);

// t^2 E T(B(t)) against 2 E cap(beta[0,1])^-2 in three dimensions. Both sides
// use the same discretization after Brownian scaling by 1/t: the torus path has
// step dt_unit / t^2 and absorption shell h_unit / t.
struct M3Config {
  double dt_unit = 3e-3;
  double h_unit = 3e-3;
  std::uint64_t paths = 16;
  std::uint64_t points_per_path = 2000;
  int cap_replicates = 200;
  std::uint64_t cap_walkers = 20000;
  bool extrapolate = false;
};

ExperimentResult run_scaling_m3(const std::vector<double>& t_list, const M3Config& cfg,
                                std::uint64_t seed);
std::vector<ScalingFit> fit_scaling_m3(const RunRecord& rec);

// E T of the torus minus W_r(t)[0,t] against E(1/cap(W_eps[0,1])) / (kappa_m t^{2/(m-2)}),
// eps = t^{1/(m-2)} r(t). Matched discretization: the torus side uses step
// dt_unit t^{-2/(m-2)}, and both sides absorb at h_rel times their radius.
struct HighMConfig {
  RSchedule schedule;
  double dt_unit = 1e-2;
  double h_rel = 0.05;
  std::uint64_t paths = 16;
  std::uint64_t points_per_path = 2000;
  int cap_replicates = 100;
  std::uint64_t cap_walkers = 20000;
  bool extrapolate = false;
  bool allow_infeasible = false;  // run anyway when the schedule fails the surrogates
};

ExperimentResult run_scaling_high_m(int m, const std::vector<double>& t_list, const HighMConfig& cfg,
                                    std::uint64_t seed);
std::vector<ScalingFit> fit_scaling_high_m(const RunRecord& rec);

// C(t) for radius-1 sausages in R^m, with per-path subadditivity across t/2.
struct CmConfig {
  double dt = 0.04;
  double h = 0.05;
  int replicates = 20;
  std::uint64_t walkers = 20000;
};

ExperimentResult estimate_cm(int m, const std::vector<double>& t_list, const CmConfig& cfg,
                             std::uint64_t seed);
std::vector<ScalingFit> fit_cm(const RunRecord& rec);

// Inradius of the path. m = 2 takes the maximum of a distance field; m >= 3
// maximizes the distance exactly by branch and bound, with the time step tied
// to the predicted inradius: dt = dt_rel * rho_pred(t)^2.
struct InradiusConfig {
  int grid = 512;
  double dt = 1e-3;
  double dt_rel = 0.02;
  int replicates = 100;
  double rel_tol = 1e-3;
};

// ((m/((m-2) kappa_m)) log t / t)^{1/(m-2)}.
double inradius_prediction(int m, double t);

ExperimentResult inradius_scaling(int m, const std::vector<double>& t_list, const InradiusConfig& cfg,
                                  std::uint64_t seed);
std::vector<ScalingFit> fit_inradius(const RunRecord& rec);

// Re-derives the fits of a record from its raw rows.
std::vector<ScalingFit> refit(const RunRecord& rec);

}  // namespace ttl
