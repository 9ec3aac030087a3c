#ifndef LATTICE3B_GRID_HPP
#define LATTICE3B_GRID_HPP

#include <optional>
#include <vector>

#include "lattice3b/torus.hpp"

namespace lattice3b {

/// Radial-log grading descriptor. Adds logarithmically spaced spherical
/// shells around `center`, blended smoothly into the uniform tensor grid.
/// `levels` counts radial nodes per decade of [inner_radius, outer_radius].
struct RadialGrading {
  TorusVec center;
  double inner_radius = 1e-6;
  int levels = 24;
  int n_theta = 12;           // Gauss-Legendre nodes in cos(theta)
  int n_phi = 12;             // uniform nodes in phi
  double outer_radius = 1.2;  // blend support; must stay below pi
};

/// Description of a quadrature grid on the torus.
///
/// The plain grid is a tensor-product midpoint rule with n_per_axis nodes
/// per axis. With `offset` set (the default) nodes sit at half-cells, so
/// the grid never contains `center`; n_per_axis must then be even.
struct GridSpec {
  int n_per_axis = 32;
  bool offset = true;
  TorusVec center;  // anchor of the cell pattern (and of any grading)
  std::optional<RadialGrading> grading;
};

/// Flat node/weight list realizing a GridSpec. Weights are strictly
/// positive and sum to (2*pi)^3.
struct QuadratureRule {
  std::vector<TorusVec> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Build nodes and weights for a grid description.
/// Throws std::invalid_argument for invalid sizes (odd n with offset,
/// grading radii out of range).
QuadratureRule build_rule(const GridSpec& spec);

/// C-infinity cutoff used to blend the graded shells into the tensor grid:
/// 1 for r <= R/2, 0 for r >= R, smooth in between.
double blend_cutoff(double r, double outer_radius);

}  // namespace lattice3b

#endif
