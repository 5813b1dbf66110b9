#pragma once

#include <cstdint>
#include <vector>

#include "ttl/brownian.hpp"

namespace ttl {

// Uniform cell grid over T^m holding the projected polyline. Each segment is
// registered in every cell its pieces can touch, so scanning all cells within
// Chebyshev radius L of a query cell sees every point within L cell widths.
class TorusIndex {
 public:
  explicit TorusIndex(const SampledPath& path, double cell_hint = 0.0);

  int dim() const { return m_; }
  int cells_per_side() const { return g_; }
  double cell_size() const { return 1.0 / g_; }
  std::size_t segment_count() const { return n_seg_; }

  // Exact torus distance from x to the polyline.
  double distance(const double* x) const;
  // min(distance, cap); exact whenever the distance is below cap.
  double distance_capped(const double* x, double cap) const;
  // A lower bound on the distance, capped at cap, that is exact whenever the
  // distance is below one cell width. Cheap far from the path.
  double safe_radius(const double* x, double cap) const;

 private:
  std::size_t cell_of(const double* x, int* idx) const;
  // Scans the Chebyshev shell at radius L around idx; returns false if the
  // shell wraps onto itself (caller should scan everything instead).
  bool scan_shell(const double* x, const int* idx, int L, double& best_sq) const;
  void scan_all(const double* x, double& best_sq) const;
  double seg_dist_sq(const double* x, std::uint32_t s) const;
  double brute(const double* x) const;

  int m_ = 2;
  int g_ = 1;
  std::size_t n_seg_ = 0;
  std::vector<double> a_;    // wrapped segment starts
  std::vector<double> d_;    // segment vectors
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
  std::vector<std::uint16_t> empty_;  // Chebyshev cell distance to nearest occupied cell
};

struct FarthestPoint {
  double value = 0.0;   // attained distance, a lower bound on the maximum
  double upper = 0.0;   // proven upper bound on the maximum
  std::vector<double> location;
};

// Maximum over T^m of the distance to the polyline, by branch and bound on
// dyadic cubes with the Lipschitz bound d(y) <= d(c) + |y - c|. Stops once the
// upper bound is within rel_tol of the best value found.
FarthestPoint farthest_point(const TorusIndex& index, double rel_tol = 1e-3);

// Hashed cells over R^m for the lift of a path, with coarse occupancy levels
// and an enclosing ball for cheap far-field bounds.
class LiftIndex {
 public:
  explicit LiftIndex(const SampledPath& path, double cell_size);

  int dim() const { return m_; }
  double cell_size() const { return c_; }
  const std::vector<double>& center() const { return center_; }
  double enclosing_radius() const { return rho_; }

  // Lower bound on the Euclidean distance to the polyline, exact whenever the
  // distance is below half a cell width.
  double safe_radius(const double* x) const;
  double distance(const double* x) const;

 private:
  static constexpr int kLevels = 4;
  std::uint64_t key(const std::int64_t* idx) const;
  const std::uint32_t* find(std::uint64_t k, std::uint32_t& count) const;
  bool occupied(int level, const std::int64_t* idx) const;

  int m_ = 3;
  double c_ = 1.0;
  std::size_t n_seg_ = 0;
  std::vector<double> a_, d_;
  std::vector<double> center_;
  double rho_ = 0.0;
  // open-addressing table: slot -> (key, begin, count)
  std::vector<std::uint64_t> slot_key_;
  std::vector<std::uint32_t> slot_begin_, slot_count_;
  std::uint64_t mask_ = 0;
  std::vector<std::uint32_t> items_;
  std::vector<std::vector<std::uint64_t>> coarse_;  // sorted keys per level >= 1
};

}  // namespace ttl
