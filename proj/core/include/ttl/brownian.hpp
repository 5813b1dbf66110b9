#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "ttl/rng.hpp"

namespace ttl {

// Longest segment kept after resampling; keeps periodic-image queries exact.
inline constexpr double kMaxSegment = 0.25;

// Discretized Brownian path with generator Delta, stored as the unwrapped lift
// in R^m starting at the origin. Bridge refinement can insert extra points, so
// sample times are stored explicitly.
struct SampledPath {
  int m = 2;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> coords;  // size() * m, row-major
  RngSeed seed;

  std::size_t size() const { return times.size(); }
  std::size_t segments() const { return size() > 1 ? size() - 1 : 1; }
  const double* point(std::size_t i) const { return coords.data() + i * m; }
  double t_total() const { return times.empty() ? 0.0 : times.back(); }
};

struct Sausage {
  SampledPath path;
  double radius = 0.0;
};

// ceil(t/dt)+1 points, increments N(0, 2 dt) per coordinate, then any segment
// longer than kMaxSegment is split by Brownian-bridge midpoints drawn from a
// dedicated substream.
SampledPath sample_path(int m, double t, double dt, RngSeed seed);

// Same law, started at a given lift point instead of the origin.
SampledPath sample_path_from(std::span<const double> start, double t, double dt, RngSeed seed);

// Halves every segment by inserting a bridge midpoint with variance tau/2 per
// coordinate (tau = segment duration). Deterministic given the seed.
SampledPath refine_path(const SampledPath& path, RngSeed seed);

// Sub-path on sample indices [i0, i1], re-based so times start at zero.
// Coordinates are kept as they are (not translated).
SampledPath slice(const SampledPath& path, std::size_t i0, std::size_t i1);

// Index of the first sample with time >= t.
std::size_t index_at_time(const SampledPath& path, double t);

SampledPath single_point_path(std::span<const double> p);
SampledPath polyline_path(int m, const std::vector<std::vector<double>>& pts);

// Affine image x -> scale * x + shift, with times scaled by scale^2.
SampledPath transform(const SampledPath& path, double scale, std::span<const double> shift);

// Brute-force torus distance from x to the projected polyline: every segment
// against the 3^m periodic images of x nearest to it.
double distance_to_path(std::span<const double> x, const SampledPath& path);
double distance_to_sausage(std::span<const double> x, const Sausage& s);

// Euclidean (lift) distance from x to the polyline, brute force.
double lift_distance_to_path(std::span<const double> x, const SampledPath& path);

void write_path_csv(std::ostream& os, const SampledPath& path);
SampledPath read_path_csv(std::istream& is);

}  // namespace ttl
