#pragma once

#include <cstdint>
#include <vector>

#include "ttl/capacity.hpp"
#include "ttl/grid.hpp"
#include "ttl/rigidity.hpp"

namespace ttl {

struct EigenResult {
  double lambda1 = 0.0;
  GridField phi1;            // L2-normalised on the free cells (cell-volume weights)
  double residual = 0.0;     // ||A phi - lambda phi|| / (lambda ||phi||)
  int iterations = 0;
  std::size_t component_cells = 0;
  std::size_t components = 0;
  std::size_t components_solved = 0;
};

// Principal Dirichlet eigenvalue of the free set: the minimum over its
// connected components, each by inverse iteration from the all-ones vector
// with CG inner solves. Components whose Faber-Krahn bound cannot beat the
// current minimum are skipped.
EigenResult lambda1_grid(const Obstacle& ob);
EigenResult lambda1_grid(const GridField& obstacle_mask);

// First Dirichlet eigenvalue of the unit ball in R^m (j_{m/2-1,1}^2).
double ball_lambda1(int m);
double faber_krahn_bound(int m, double volume);

// Torus heat kernel on the diagonal for the unit torus:
// (4 pi s)^{-m/2} sum_{k in Z^m} exp(-|k|^2 / 4s).
double heat_kernel_diag(int m, double s);
// One-dimensional factors of the two sides of the Poisson summation identity.
double theta_image_sum(double s);     // (4 pi s)^{-1/2} sum_k exp(-k^2/4s)
double theta_spectral_sum(double s);  // sum_k exp(-4 pi^2 k^2 s)

// k_m = int_0^1 (4 pi s)^{-m/2} exp(-m/4s) ds.
double small_k_constant(int m);

struct EigcapConfig {
  int grid = 64;
  double h = 1e-3;
  std::uint64_t walkers = 200000;
};

struct EigcapReport {
  double lambda1 = 0.0;
  CapacityEstimate cap;
  double k_m = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Checks lambda1(T^m \ K) >= k_m cap(K) for a sausage K of torus diameter at most 1/2.
EigcapReport check_eigcap(const Sausage& target, const EigcapConfig& cfg, RngSeed seed);

struct LambdaTorsionConfig {
  int grid = 128;
  double dt = 1e-3;
  int replicates = 8;
};

struct LambdaTorsionReport {
  Estimate lambda1;      // E lambda1(B(t))
  Estimate spade;        // E T(B(t)) from the grid solver
  double rhs = 0.0;      // spade^{-2/(m+2)}
  double rhs_stderr = 0.0;
  bool applicable = false;
  bool holds = false;
};

LambdaTorsionReport check_lambda_torsion(int m, double t, double r, const LambdaTorsionConfig& cfg, RngSeed seed);

}  // namespace ttl
