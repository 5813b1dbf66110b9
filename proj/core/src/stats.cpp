#include "ttl/stats.hpp"

#include <Eigen/Dense>

#include "ttl/error.hpp"

namespace ttl {

RunningStats summarize(std::span<const double> xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s;
}

LinearFit least_squares(const std::vector<std::vector<double>>& X, std::span<const double> y,
                        std::span<const double> weights) {
  const auto n = static_cast<Eigen::Index>(y.size());
  require(n > 0 && X.size() == y.size(), "least_squares: size mismatch");
  const auto p = static_cast<Eigen::Index>(X.front().size());
  require(n >= p, "least_squares: fewer observations than coefficients");
  require(weights.empty() || weights.size() == y.size(), "least_squares: weight size mismatch");

  Eigen::MatrixXd A(n, p);
  Eigen::VectorXd b(n), w = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) A(i, j) = X[i][j];
    b(i) = y[i];
    if (!weights.empty()) w(i) = weights[i];
  }
  Eigen::VectorXd sw = w.cwiseSqrt();
  Eigen::MatrixXd Aw = sw.asDiagonal() * A;
  Eigen::VectorXd bw = sw.asDiagonal() * b;
  Eigen::VectorXd coef = Aw.colPivHouseholderQr().solve(bw);

  LinearFit fit;
  fit.coef.assign(coef.data(), coef.data() + p);
  Eigen::VectorXd res = b - A * coef;
  fit.residuals.assign(res.data(), res.data() + n);

  double ybar = (w.array() * b.array()).sum() / w.sum();
  double ss_tot = (w.array() * (b.array() - ybar).square()).sum();
  double ss_res = (w.array() * res.array().square()).sum();
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  fit.stderr.assign(p, 0.0);
  if (n > p) {
    double sigma2 = weights.empty() ? ss_res / static_cast<double>(n - p) : 1.0;
    Eigen::MatrixXd cov = (Aw.transpose() * Aw).inverse() * sigma2;
    for (Eigen::Index j = 0; j < p; ++j) fit.stderr[j] = std::sqrt(std::max(0.0, cov(j, j)));
  }
  return fit;
}

}  // namespace ttl
