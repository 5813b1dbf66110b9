#pragma once

#include <cstdint>
#include <vector>

#include "ttl/brownian.hpp"
#include "ttl/stats.hpp"

namespace ttl {

// Newtonian capacity of the unit ball in R^m: 4 pi^{m/2} / Gamma((m-2)/2).
double kappa(int m);
double cap_ball(int m, double R);

struct CapacityEstimate {
  double value = 0.0;
  double stderr = 0.0;
  std::uint64_t n_replicates = 0;
  double bias_bound_rel = 0.0;  // one-sided: the estimate is low by at most this fraction
};

struct HittingConfig {
  double R = 0.0;       // launch sphere radius; 0 picks twice the target's radius
  double R_out = 0.0;   // kill sphere radius; 0 picks the smallest with bias <= 1%
  double h = 1e-3;      // absorption shell
  std::uint64_t n = 100000;
  double cell = 0.0;    // index cell size; 0 picks a default from r and the step length
};

// cap(K) = kappa_m R^{m-2} P(walker uniform on the sphere of radius R about
// the target's centre hits K), estimated by walk-on-spheres in R^m with a kill
// sphere at R_out. Walkers are absorbed within h of the sausage.
CapacityEstimate cap_hitting(const Sausage& target, int m, double R, double R_out, double h,
                             std::uint64_t n, RngSeed seed);
CapacityEstimate cap_hitting(const Sausage& target, const HittingConfig& cfg, RngSeed seed);

// Capacity of a set of sausages sharing one walk: walkers are absorbed at the
// first shell among `hs` (sorted descending) they enter, so each h gets its own
// hitting fraction from common random numbers.
std::vector<CapacityEstimate> cap_hitting_multi(const Sausage& target, const HittingConfig& cfg,
                                                const std::vector<double>& hs, RngSeed seed);

// Reciprocal of a Monte Carlo sojourn-measure energy: a capacity lower bound.
CapacityEstimate cap_sojourn_lower(const SampledPath& path, double r, std::uint64_t n_pairs,
                                   RngSeed seed);

struct ScaledCapacitySample {
  int m = 5;
  double t = 0.0;
  double value = 0.0;
  double stderr = 0.0;
  CapacityEstimate raw;
};

double capacity_normalization(int m, double t);
// C(t) = cap(W_1[0,t]) / t for m >= 5 and (log t)/t cap(W_1[0,t]) for m = 4.
ScaledCapacitySample scaled_capacity(const SampledPath& path, const HittingConfig& cfg,
                                     RngSeed seed);

struct ScalingRelationReport {
  int m = 5;
  double eps = 0.5;
  Estimate left;    // E cap(W_eps[0,1])
  Estimate right;   // eps^{m-2} E cap(W_1[0, eps^-2])
  double ratio = 1.0;
  double ratio_lo = 1.0;
  double ratio_hi = 1.0;
  bool contains_one = true;
};

struct ScalingRelationConfig {
  int replicates = 200;
  double dt_unit = 1e-3;   // time step for the horizon-1 side, scaled by eps^-2 on the other
  double h_rel = 1e-2;     // absorption shell relative to the sausage radius
  std::uint64_t walkers = 2000;
};

ScalingRelationReport check_scaling_relation(int m, double eps, const ScalingRelationConfig& cfg,
                                             RngSeed seed);

}  // namespace ttl
