#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ttl/grid.hpp"

namespace ttl {

// h^2 times the (2m+1)-point Dirichlet Laplacian (-Delta, positive) restricted
// to free cells. A free cell next to an obstacle cell uses the symmetric
// second-order boundary treatment: the missing neighbour contributes
// 1/theta to the diagonal, theta being the fractional distance to the zero of
// the level function (theta = 1 when no level function is given).
struct FreeCellOperator {
  int m = 2;
  int n = 8;
  std::vector<std::uint32_t> cell;           // free index -> grid index
  std::vector<std::int32_t> nbr;             // 2m per free cell, -1 if Dirichlet
  std::vector<double> diag;
  std::vector<std::int32_t> grid_to_free;    // -1 on obstacle / excluded cells

  std::size_t size() const { return cell.size(); }
  void apply(const double* x, double* y) const;
  double h2() const { return 1.0 / (static_cast<double>(n) * n); }
};

// Minimum theta accepted by the boundary treatment.
inline constexpr double kMinTheta = 0.01;

// Operator over all free cells, or only over cells whose component label
// equals `only` when labels are given.
FreeCellOperator build_operator(const Obstacle& ob, const std::vector<std::int32_t>* labels = nullptr,
                                std::int32_t only = -1);

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(const double* r, double* z) const = 0;
};

std::unique_ptr<Preconditioner> jacobi_preconditioner(const FreeCellOperator& A);
// Inverse of the periodic Laplacian plus a shift, applied by FFT on the full
// grid. Effective when obstacles are a small fraction of the torus.
std::unique_ptr<Preconditioner> fft_preconditioner(const FreeCellOperator& A, double shift);
// Picks FFT for sparse obstacles on large m <= 3 grids, Jacobi otherwise.
std::unique_ptr<Preconditioner> default_preconditioner(const FreeCellOperator& A,
                                                       double obstacle_fraction);

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
};

// Preconditioned CG on A x = b from the given x. Throws NumericalFailure when
// the relative residual does not reach tol within max_iter iterations.
SolveStats pcg(const FreeCellOperator& A, const std::vector<double>& b, std::vector<double>& x,
               const Preconditioner& M, double tol, int max_iter);

}  // namespace ttl
