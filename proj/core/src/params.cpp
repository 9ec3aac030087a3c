#include "lattice3b/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lattice3b/torus.hpp"

namespace lattice3b {

QuadratureEstimate compute_mu0(double tol, const RefineOptions& opts) {
  if (!(tol > 0.0)) throw std::invalid_argument("compute_mu0: tol must be positive");

  // Integrand 1/eps has the integrable |p|^-2 singularity at the grid-cell
  // corner p = 0; the ladder refinement recovers it to below tol.
  GridSpec base;  // offset, centered at 0
  QuadratureEstimate inv = refine(
      [](const TorusVec& p) { return 1.0 / dispersion(p); }, tol, base, opts);

  constexpr double norm = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi *
                                 std::numbers::pi);
  const double integral = inv.value * norm;  // (2pi)^-3 int dp/eps
  QuadratureEstimate out;
  out.value = 1.0 / integral;
  // first-order error propagation through the reciprocal
  out.error_estimate = inv.error_estimate * norm * out.value * out.value;
  out.levels_used = inv.levels_used;
  out.converged = inv.converged;
  return out;
}

ModelParams make_params(double gamma, const QuadratureEstimate& mu0) {
  if (!(gamma > 0.0)) throw std::invalid_argument("make_params: gamma must be positive");
  ModelParams p;
  p.gamma = gamma;
  p.mu0 = mu0.value;
  p.mu0_error = mu0.error_estimate;
  p.v_gamma = p.mu0 * (1.0 + gamma);
  p.u_gamma = (1.0 + gamma) / std::sqrt(1.0 + 2.0 * gamma);
  p.s_gamma = gamma / (1.0 + gamma);
  p.D_gamma = std::pow(1.0 + gamma, 1.5) /
              (2.0 * std::numbers::pi * std::numbers::pi);
  p.n_gamma = (1.0 + 2.0 * gamma) / (1.0 + gamma);
  p.M_gamma = (1.0 + 2.0 * gamma) / gamma;
  return p;
}

ModelParams make_params(double gamma, double mu0_tol) {
  return make_params(gamma, compute_mu0(mu0_tol));
}

}  // namespace lattice3b
