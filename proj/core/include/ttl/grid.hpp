#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ttl/brownian.hpp"

namespace ttl {

enum class FieldKind : std::uint8_t { distance = 0, torsion = 1, eigenfunction = 2, mask = 3 };

// Scalar field on the n^m cell centres ((i+0.5)/n, ...) of T^m. Linear index
// is row-major: the last coordinate varies fastest.
struct GridField {
  int m = 2;
  int n = 8;
  FieldKind kind = FieldKind::distance;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double cell_volume() const;
  void center(std::size_t lin, double* x) const;
  std::size_t linear(const int* idx) const;
  void unravel(std::size_t lin, int* idx) const;
};

GridField make_field(int m, int n, FieldKind kind, double fill = 0.0);

// Obstacle for the grid solvers: mask 1 marks Dirichlet cells. level, when
// present, is a signed function positive on free cells and <= 0 on obstacle
// cells whose zero set locates the boundary between centres.
struct Obstacle {
  GridField mask;
  std::vector<double> level;

  std::size_t obstacle_cells() const;
  std::size_t free_cells() const { return mask.size() - obstacle_cells(); }
};

// Exact torus distance to the polyline at every cell centre.
GridField distance_field(const SampledPath& path, int n);

double dsquared(const GridField& f);

struct Argmax {
  double value = 0.0;
  std::size_t index = 0;
  std::vector<double> location;
};
// Max over centres; ties go to the lowest linear index.
Argmax inradius(const GridField& f);

// Cells whose centre lies within r of the path; r = 0 uses half a cell
// diagonal as the thickening.
Obstacle sausage_obstacle(const SampledPath& path, double r, int n);
Obstacle sausage_obstacle(const GridField& dist, double r);
double bare_path_thickening(int m, int n);

// Free set is the ball of radius R about c (complement is the obstacle).
Obstacle ball_domain(int m, int n, std::span<const double> c, double R);
// Free set is the sausage (an embeddable random domain); obstacle its complement.
Obstacle sausage_domain(const GridField& dist, double r);
// Obstacle is the closed dyadic square of side 2^-k centred at (0.5, 0.5).
Obstacle dyadic_square_obstacle(int n, int k);

// Connected components of cells with value > threshold (face adjacency,
// periodic). Returns label per cell (-1 outside) and the component count.
struct Components {
  std::vector<std::int32_t> label;
  std::int32_t count = 0;
  std::vector<std::size_t> sizes;
};
Components label_components(const GridField& f, double threshold);
Components free_components(const Obstacle& ob);

void write_field_binary(std::ostream& os, const GridField& f);
GridField read_field_binary(std::istream& is);
void write_field_csv(std::ostream& os, const GridField& f);

}  // namespace ttl
