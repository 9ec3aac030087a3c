#include "lattice3b/torus.hpp"

#include "lattice3b/grid.hpp"
#include "lattice3b/quadrature.hpp"

namespace lattice3b {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double wrap_angle(double x) {
  if (!std::isfinite(x)) throw std::domain_error("wrap: non-finite component");
  double r = std::remainder(x, kTwoPi);  // lands in [-pi, pi]
  if (r <= -0.5 * kTwoPi + 0.0) r += kTwoPi;
  return r;
}

TorusVec wrap(double x1, double x2, double x3) {
  return {wrap_angle(x1), wrap_angle(x2), wrap_angle(x3)};
}

TorusVec wrap(const std::array<double, 3>& x) { return wrap(x[0], x[1], x[2]); }

TorusVec operator+(const TorusVec& a, const TorusVec& b) {
  return wrap(a.c1 + b.c1, a.c2 + b.c2, a.c3 + b.c3);
}

TorusVec operator-(const TorusVec& a, const TorusVec& b) {
  return wrap(a.c1 - b.c1, a.c2 - b.c2, a.c3 - b.c3);
}

TorusVec operator-(const TorusVec& a) { return wrap(-a.c1, -a.c2, -a.c3); }

TorusVec operator*(double s, const TorusVec& a) {
  return wrap(s * a.c1, s * a.c2, s * a.c3);
}

namespace {
// 1 - cos x without cancellation at small x
double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}
}  // namespace

double dispersion(const TorusVec& p) {
  return one_minus_cos(p.c1) + one_minus_cos(p.c2) + one_minus_cos(p.c3);
}

std::map<LatticeSite, double> hopping_coefficients(int max_shell) {
  if (max_shell < 1) throw std::invalid_argument("hopping_coefficients: max_shell >= 1");

  // eps is a trigonometric polynomial of degree 1 per axis, so the offset
  // midpoint rule with n > max_shell + 1 integrates eps * e^{-i(s,p)} exactly.
  GridSpec spec;
  spec.n_per_axis = 2 * (max_shell + 2);
  const QuadratureRule rule = build_rule(spec);

  std::map<LatticeSite, double> out;
  const double norm = 1.0 / (kTwoPi * kTwoPi * kTwoPi);
  for (int s1 = -max_shell; s1 <= max_shell; ++s1)
    for (int s2 = -max_shell; s2 <= max_shell; ++s2)
      for (int s3 = -max_shell; s3 <= max_shell; ++s3) {
        // eps is even, so the transform is the plain cosine average.
        const double val = quadrature(
            [&](const TorusVec& p) {
              return dispersion(p) *
                     std::cos(s1 * p.c1 + s2 * p.c2 + s3 * p.c3);
            },
            rule);
        out[{s1, s2, s3}] = val * norm;
      }
  return out;
}

}  // namespace lattice3b
