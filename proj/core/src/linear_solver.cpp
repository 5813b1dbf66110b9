#include "ttl/linear_solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "ttl/error.hpp"
#include "ttl/geometry.hpp"

namespace ttl {

void FreeCellOperator::apply(const double* x, double* y) const {
  const std::size_t N = size();
  const int k = 2 * m;
  for (std::size_t i = 0; i < N; ++i) {
    double acc = diag[i] * x[i];
    const std::int32_t* nb = &nbr[i * k];
    for (int j = 0; j < k; ++j)
      if (nb[j] >= 0) acc -= x[nb[j]];
    y[i] = acc;
  }
}

FreeCellOperator build_operator(const Obstacle& ob, const std::vector<std::int32_t>* labels,
                                std::int32_t only) {
  const GridField& mask = ob.mask;
  FreeCellOperator A;
  A.m = mask.m;
  A.n = mask.n;
  const bool use_level = !ob.level.empty();
  A.grid_to_free.assign(mask.size(), -1);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.values[i] != 0.0) continue;
    if (labels && (*labels)[i] != only) continue;
    A.grid_to_free[i] = static_cast<std::int32_t>(A.cell.size());
    A.cell.push_back(static_cast<std::uint32_t>(i));
  }
  const int k = 2 * A.m;
  A.nbr.assign(A.cell.size() * k, -1);
  A.diag.assign(A.cell.size(), 0.0);
  int idx[kMaxDim];
  for (std::size_t f = 0; f < A.cell.size(); ++f) {
    std::size_t g = A.cell[f];
    mask.unravel(g, idx);
    for (int dim = 0; dim < A.m; ++dim)
      for (int s = 0; s < 2; ++s) {
        int keep = idx[dim];
        idx[dim] = (keep + (s ? 1 : -1) + A.n) % A.n;
        std::size_t nb = mask.linear(idx);
        idx[dim] = keep;
        int slot = 2 * dim + s;
        if (mask.values[nb] == 0.0) {
          // free neighbour outside the selected component cannot occur for
          // face-connected labels
          A.nbr[f * k + slot] = A.grid_to_free[nb];
          A.diag[f] += 1.0;
        } else {
          double theta = 1.0;
          if (use_level) {
            double pi = ob.level[g], pj = ob.level[nb];
            theta = pi / (pi - pj);
            theta = std::clamp(theta, kMinTheta, 1.0);
          }
          A.diag[f] += 1.0 / theta;
        }
      }
  }
  return A;
}

namespace {

class Jacobi final : public Preconditioner {
 public:
  explicit Jacobi(const FreeCellOperator& A) : inv_(A.size()) {
    for (std::size_t i = 0; i < A.size(); ++i) inv_[i] = 1.0 / A.diag[i];
  }
  void apply(const double* r, double* z) const override {
    for (std::size_t i = 0; i < inv_.size(); ++i) z[i] = inv_[i] * r[i];
  }

 private:
  std::vector<double> inv_;
};

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

class FftShifted final : public Preconditioner {
 public:
  FftShifted(const FreeCellOperator& A, double shift) : A_(A) {
    std::vector<int> dims(A.m, A.n);
    std::size_t total = 1;
    for (int i = 0; i < A.m; ++i) total *= A.n;
    std::size_t last = A.n / 2 + 1;
    std::size_t spec = total / A.n * last;
    real_ = fftw_alloc_real(total);
    cplx_ = fftw_alloc_complex(spec);
    {
      std::lock_guard lock(fftw_planner_mutex());
      fwd_ = fftw_plan_dft_r2c(A.m, dims.data(), real_, cplx_, FFTW_ESTIMATE);
      inv_ = fftw_plan_dft_c2r(A.m, dims.data(), cplx_, real_, FFTW_ESTIMATE);
    }
    symbol_.resize(spec);
    std::vector<double> eig(A.n);
    for (int k = 0; k < A.n; ++k) eig[k] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / A.n);
    for (std::size_t s = 0; s < spec; ++s) {
      std::size_t rem = s;
      double lam = shift + eig[rem % last];
      rem /= last;
      for (int d = 0; d < A.m - 1; ++d) {
        lam += eig[rem % A.n];
        rem /= A.n;
      }
      symbol_[s] = 1.0 / (lam * static_cast<double>(total));
    }
  }
  ~FftShifted() override {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(real_);
    fftw_free(cplx_);
  }
  FftShifted(const FftShifted&) = delete;
  FftShifted& operator=(const FftShifted&) = delete;

  void apply(const double* r, double* z) const override {
    std::lock_guard lock(apply_mu_);
    std::size_t total = A_.grid_to_free.size();
    std::fill(real_, real_ + total, 0.0);
    for (std::size_t i = 0; i < A_.size(); ++i) real_[A_.cell[i]] = r[i];
    fftw_execute_dft_r2c(fwd_, real_, cplx_);
    for (std::size_t s = 0; s < symbol_.size(); ++s) {
      cplx_[s][0] *= symbol_[s];
      cplx_[s][1] *= symbol_[s];
    }
    fftw_execute_dft_c2r(inv_, cplx_, real_);
    for (std::size_t i = 0; i < A_.size(); ++i) z[i] = real_[A_.cell[i]];
  }

 private:
  const FreeCellOperator& A_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan fwd_ = nullptr, inv_ = nullptr;
  std::vector<double> symbol_;
  mutable std::mutex apply_mu_;
};

}  // namespace

std::unique_ptr<Preconditioner> jacobi_preconditioner(const FreeCellOperator& A) {
  return std::make_unique<Jacobi>(A);
}

std::unique_ptr<Preconditioner> fft_preconditioner(const FreeCellOperator& A, double shift) {
  require(shift > 0.0, "fft_preconditioner: shift must be positive");
  return std::make_unique<FftShifted>(A, shift);
}

std::unique_ptr<Preconditioner> default_preconditioner(const FreeCellOperator& A,
                                                       double obstacle_fraction) {
  if (A.m > 3 || A.size() < 65536 || obstacle_fraction >= 0.05 || obstacle_fraction <= 0.0)
    return jacobi_preconditioner(A);
  // shift near the expected lowest eigenvalue of a small obstacle of this volume
  double lam = 0.0;
  if (A.m == 2)
    lam = 2.0 * std::numbers::pi / std::log(1.0 / std::sqrt(obstacle_fraction));
  else
    lam = 4.0 * std::numbers::pi * std::cbrt(3.0 * obstacle_fraction / (4.0 * std::numbers::pi));
  return fft_preconditioner(A, lam * A.h2());
}

SolveStats pcg(const FreeCellOperator& A, const std::vector<double>& b, std::vector<double>& x,
               const Preconditioner& M, double tol, int max_iter) {
  const std::size_t N = A.size();
  require(b.size() == N, "pcg: rhs size mismatch");
  x.resize(N, 0.0);
  std::vector<double> r(N), z(N), p(N), q(N);
  A.apply(x.data(), q.data());
  double bnorm = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    r[i] = b[i] - q[i];
    bnorm += b[i] * b[i];
    rr += r[i] * r[i];
  }
  bnorm = std::sqrt(bnorm);
  SolveStats st;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return st;
  }
  st.rel_residual = std::sqrt(rr) / bnorm;
  if (st.rel_residual <= tol) return st;
  M.apply(r.data(), z.data());
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < N; ++i) rz += r[i] * z[i];
  for (int it = 1; it <= max_iter; ++it) {
    A.apply(p.data(), q.data());
    double pq = 0.0;
    for (std::size_t i = 0; i < N; ++i) pq += p[i] * q[i];
    if (!(pq > 0.0)) throw NumericalFailure("pcg: operator not positive definite");
    double alpha = rz / pq;
    rr = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      rr += r[i] * r[i];
    }
    st.iterations = it;
    st.rel_residual = std::sqrt(rr) / bnorm;
    if (!std::isfinite(st.rel_residual)) throw NumericalFailure("pcg: non-finite residual");
    if (st.rel_residual <= tol) return st;
    M.apply(r.data(), z.data());
    double rz_new = 0.0;
    for (std::size_t i = 0; i < N; ++i) rz_new += r[i] * z[i];
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
  }
  throw NumericalFailure("pcg: no convergence after " + std::to_string(max_iter) +
                         " iterations (relative residual " + std::to_string(st.rel_residual) + ")");
}

}  // namespace ttl
