#ifndef LATTICE3B_GAUSS_HPP
#define LATTICE3B_GAUSS_HPP

#include <vector>

namespace lattice3b {

/// Legendre polynomial P_l(x) by the three-term recurrence.
double legendre_p(int l, double x);

/// n-point Gauss-Legendre rule on [-1,1] (Newton on P_n, deterministic).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);  // cached by n

}  // namespace lattice3b

#endif
