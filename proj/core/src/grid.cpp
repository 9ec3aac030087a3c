#include "lattice3b/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lattice3b/gauss.hpp"
#include "lattice3b/quadrature.hpp"

namespace lattice3b {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCellVolume = kTwoPi * kTwoPi * kTwoPi;
}  // namespace

double blend_cutoff(double r, double outer_radius) {
  const double t = (r - 0.5 * outer_radius) / (0.5 * outer_radius);
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));  // -> chi = 1 side
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

namespace {

// Distance from p to c measured on the torus.
double torus_distance(const TorusVec& p, const TorusVec& c) {
  return (p - c).norm();
}

void append_uniform(const GridSpec& spec, QuadratureRule& rule,
                    const RadialGrading* grading) {
  const int n = spec.n_per_axis;
  if (n < 1) throw std::invalid_argument("GridSpec: n_per_axis must be positive");
  if (spec.offset && n % 2 != 0)
    throw std::invalid_argument("GridSpec: offset grids need even n_per_axis");

  const double h = kTwoPi / n;
  const double w0 = h * h * h;
  const double shift = spec.offset ? 0.5 : 0.0;

  std::vector<double> axis(n);
  for (int i = 0; i < n; ++i) axis[i] = -kPi + (i + shift) * h;

  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3) {
        const TorusVec p = wrap(spec.center.c1 + axis[i1],
                                spec.center.c2 + axis[i2],
                                spec.center.c3 + axis[i3]);
        double w = w0;
        if (grading) {
          const double chi =
              blend_cutoff(torus_distance(p, grading->center), grading->outer_radius);
          w *= (1.0 - chi);
          if (w == 0.0) continue;
        }
        rule.nodes.push_back(p);
        rule.weights.push_back(w);
      }
}

void append_shells(const RadialGrading& g, QuadratureRule& rule) {
  if (!(g.inner_radius > 0.0) || g.inner_radius >= g.outer_radius)
    throw std::invalid_argument("RadialGrading: need 0 < inner_radius < outer_radius");
  if (g.outer_radius >= kPi)
    throw std::invalid_argument("RadialGrading: outer_radius must stay below pi");
  if (g.levels < 1 || g.n_theta < 2 || g.n_phi < 2)
    throw std::invalid_argument("RadialGrading: resolution too small");

  const double u_lo = std::log(g.inner_radius);
  const double u_hi = std::log(g.outer_radius);
  const double decades = (u_hi - u_lo) / std::log(10.0);
  const int n_r = std::max(2, static_cast<int>(std::ceil(g.levels * decades)));
  const double du = (u_hi - u_lo) / n_r;

  const GaussLegendre& gl = gauss_legendre(g.n_theta);
  const double dphi = kTwoPi / g.n_phi;

  for (int ir = 0; ir < n_r; ++ir) {
    const double r = std::exp(u_lo + (ir + 0.5) * du);
    const double chi = blend_cutoff(r, g.outer_radius);
    if (chi == 0.0) continue;
    const double wr = r * r * r * du * chi;  // int r^2 dr = int e^{3u} du
    for (int it = 0; it < g.n_theta; ++it) {
      const double ct = gl.nodes[it];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      const double wt = wr * gl.weights[it] * dphi;
      for (int ip = 0; ip < g.n_phi; ++ip) {
        const double phi = (ip + 0.5) * dphi;
        rule.nodes.push_back(wrap(g.center.c1 + r * st * std::cos(phi),
                                  g.center.c2 + r * st * std::sin(phi),
                                  g.center.c3 + r * ct));
        rule.weights.push_back(wt);
      }
    }
  }
}

}  // namespace

QuadratureRule build_rule(const GridSpec& spec) {
  QuadratureRule rule;

  if (!spec.grading) {
    append_uniform(spec, rule, nullptr);
    return rule;  // weights sum to (2pi)^3 exactly by construction
  }

  const std::size_t shells_begin = 0;
  append_shells(*spec.grading, rule);
  const std::size_t tensor_begin = rule.nodes.size();
  append_uniform(spec, rule, &*spec.grading);

  // The chi blend splits 1 = chi + (1-chi); rescale the tensor block so the
  // total weight is the exact cell volume.
  double sum_shell = 0.0, sum_tensor = 0.0;
  for (std::size_t i = shells_begin; i < tensor_begin; ++i) sum_shell += rule.weights[i];
  for (std::size_t i = tensor_begin; i < rule.weights.size(); ++i)
    sum_tensor += rule.weights[i];
  if (sum_tensor <= 0.0 || sum_shell >= kCellVolume)
    throw std::invalid_argument("build_rule: degenerate graded grid");
  const double scale = (kCellVolume - sum_shell) / sum_tensor;
  for (std::size_t i = tensor_begin; i < rule.weights.size(); ++i)
    rule.weights[i] *= scale;

  return rule;
}

}  // namespace lattice3b
