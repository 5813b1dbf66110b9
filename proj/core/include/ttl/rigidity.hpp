#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttl/brownian.hpp"
#include "ttl/grid.hpp"
#include "ttl/stats.hpp"

namespace ttl {

enum class RigidityMethod { wos, grid, dsq_lower, dsq_upper };
std::string to_string(RigidityMethod m);

struct RigidityEstimate {
  double value = 0.0;
  double stderr = 0.0;
  RigidityMethod method = RigidityMethod::grid;
  double n_or_h = 0.0;
  double dt = 0.0;
  RngSeed seed;
  // Variance split for nested estimates (paths outside, walks inside).
  double stderr_between = 0.0;
  double stderr_within = 0.0;
  std::uint64_t n = 0;
};

// Closed forms for a ball of radius R (generator Delta):
// v = (R^2 - |x|^2)/(2m), T = omega_m R^{m+2} / (m (m+2)).
double torsion_ball(int m, double R);
double torsion_ball_center(int m, double R);
// Radius of the ball with volume `vol`.
double equal_volume_radius(int m, double vol);

struct GridSolveInfo {
  int iterations = 0;
  double rel_residual = 0.0;
  std::size_t free_cells = 0;
};

struct TorsionGridResult {
  GridField v;
  RigidityEstimate estimate;
  GridSolveInfo info;
};

// Solves -Delta v = 1 on free cells, v = 0 on the obstacle, and integrates v
// by the midpoint rule. Throws if the obstacle is empty.
TorsionGridResult torsion_grid(const Obstacle& ob);
TorsionGridResult torsion_grid(const GridField& obstacle_mask, int n);

// Walk-on-spheres torsional rigidity of T^m minus a sausage: mean over
// uniform starts of sum R_i^2/(2m), balls capped at 0.49/sqrt(m), absorbed
// within h of the sausage.
RigidityEstimate torsion_wos(const Sausage& target, int m, double h, std::uint64_t n_points,
                             std::uint64_t n_walks, RngSeed seed);

// Same walks scored at several absorption shells (descending). The walk does
// not depend on h until absorption, so the estimates share random numbers.
std::vector<RigidityEstimate> torsion_wos_multi(const Sausage& target, const std::vector<double>& hs,
                                                std::uint64_t n_points, std::uint64_t n_walks,
                                                RngSeed seed);
// 2 T(h/2) - T(h) from a shared walk; stderr from the paired differences.
RigidityEstimate torsion_wos_extrapolated(const Sausage& target, double h, std::uint64_t n_points,
                                          RngSeed seed);

struct SpadeConfig {
  double dt = 1e-3;
  double h = 1e-3;
  std::uint64_t paths = 16;
  std::uint64_t points_per_path = 2000;
  bool extrapolate = true;   // Richardson on h and h/2
};

// Expected rigidity of the complement of a Brownian sausage: paths outside,
// walk-on-spheres inside; reports between- and within-path stderr.
RigidityEstimate spade_exit_time(int m, double t, double r, const SpadeConfig& cfg, RngSeed seed);

struct GoodSquareCounts {
  int k_max = 0;
  std::vector<std::uint64_t> counts;   // index k = 0..k_max
  std::vector<double> p_hat;           // avoidance frequency of S_k, if estimated
  std::vector<double> p_stderr;
};

// Dyadic squares of side 2^-k avoided by the polyline whose parent is hit.
GoodSquareCounts good_square_counts(const SampledPath& path, int k_max);

// True if the polyline meets the closed square [c - s/2, c + s/2]^2 on T^2.
bool path_hits_square(const SampledPath& path, const double* c, double side);

// Fraction of paths (uniform start, horizon t) avoiding S_k, the square of
// side 2^-k centred at (1/2, 1/2), for k = 0..k_max, from discretized paths.
GoodSquareCounts avoidance_frequencies(double t, double dt, int k_max, std::uint64_t reps,
                                       RngSeed seed);

// Same probabilities simulated without time discretization: walk-on-spheres
// with exactly sampled disc exit times, survival recorded at each horizon.
struct AvoidanceResult {
  std::vector<double> horizons;
  std::vector<double> p;
  std::vector<double> stderr;
};
AvoidanceResult avoidance_exact(int k, const std::vector<double>& horizons, std::uint64_t reps,
                                RngSeed seed, double eps = 1e-6);

// Torus diameters of the connected components of {f > threshold}.
std::vector<double> component_diameters(const GridField& f, double threshold);

// Midpoint integral over free cells of the squared distance to the obstacle
// boundary, taken from the obstacle's level function.
double delta_squared_integral(const Obstacle& ob);

}  // namespace ttl
