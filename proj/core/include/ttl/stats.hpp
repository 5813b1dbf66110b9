#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace ttl {

// Welford accumulator with an exact-order merge.
struct RunningStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    double nt = static_cast<double>(n + o.n);
    double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / nt;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / nt;
    n += o.n;
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_mean() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

struct Estimate {
  double mean = 0.0;
  double stderr = 0.0;
  std::uint64_t n = 0;
  double bias_bound_rel = 0.0;
};

inline Estimate to_estimate(const RunningStats& s, double bias = 0.0) {
  return {s.mean, s.stderr_mean(), s.n, bias};
}

RunningStats summarize(std::span<const double> xs);

// Ordinary least squares y = X b; returns coefficients, their standard
// errors, r^2 and residuals.
struct LinearFit {
  std::vector<double> coef;
  std::vector<double> stderr;
  double r2 = 0.0;
  std::vector<double> residuals;
};

// Rows of X are observations. Empty weights mean unit weights.
LinearFit least_squares(const std::vector<std::vector<double>>& X, std::span<const double> y,
                        std::span<const double> weights = {});

}  // namespace ttl
