#ifndef LATTICE3B_TORUS_HPP
#define LATTICE3B_TORUS_HPP

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lattice3b {

/// A point of the momentum torus (-pi,pi]^3. All arithmetic wraps
/// componentwise modulo 2*pi; the representative of -pi is +pi.
struct TorusVec {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;

  double operator[](int i) const { return i == 0 ? c1 : (i == 1 ? c2 : c3); }
  double& operator[](int i) { return i == 0 ? c1 : (i == 1 ? c2 : c3); }

  std::array<double, 3> as_array() const { return {c1, c2, c3}; }

  /// Euclidean norm of the wrapped representative.
  double norm() const { return std::sqrt(c1 * c1 + c2 * c2 + c3 * c3); }

  friend bool operator==(const TorusVec& a, const TorusVec& b) {
    return a.c1 == b.c1 && a.c2 == b.c2 && a.c3 == b.c3;
  }
};

/// Reduce one angle to (-pi,pi].
double wrap_angle(double x);

/// Reduce a raw 3-vector to the fundamental cell (-pi,pi]^3.
/// Throws std::domain_error on non-finite input.
TorusVec wrap(double x1, double x2, double x3);
TorusVec wrap(const std::array<double, 3>& x);

TorusVec operator+(const TorusVec& a, const TorusVec& b);
TorusVec operator-(const TorusVec& a, const TorusVec& b);
TorusVec operator-(const TorusVec& a);
TorusVec operator*(double s, const TorusVec& a);

/// Single-particle lattice dispersion  eps(p) = sum_i (1 - cos p_i),
/// values in [0,6].
double dispersion(const TorusVec& p);

/// Lattice site, used only for the hopping-coefficient table.
using LatticeSite = std::array<int, 3>;

/// Fourier coefficients of the dispersion over sites |s_i| <= max_shell,
/// computed by torus quadrature of eps(p) e^{-i(s,p)}. The exact table is
/// 3 at s=0, -1/2 on the six unit shells, 0 elsewhere.
std::map<LatticeSite, double> hopping_coefficients(int max_shell);

}  // namespace lattice3b

#endif
