#ifndef LATTICE3B_PARAMS_HPP
#define LATTICE3B_PARAMS_HPP

#include "lattice3b/quadrature.hpp"

namespace lattice3b {

/// Mass ratio, coupling normalization and the derived constants used by
/// the two- and three-body layers.
///
///   mu0     = (2pi)^3 (int 1/eps)^-1   (resonance coupling at gamma-independent
///                                       normalization of the fermion-boson pair)
///   v_gamma = mu0 (1+gamma)
///   u_gamma = (1+gamma)/sqrt(1+2gamma)
///   s_gamma = gamma/(1+gamma)
///   D_gamma = (1+gamma)^{3/2}/(2 pi^2)
///   n_gamma = (1+2gamma)/(1+gamma)
///   M_gamma = (1+2gamma)/gamma
struct ModelParams {
  double gamma = 1.0;
  double mu0 = 0.0;
  double mu0_error = 0.0;
  double v_gamma = 0.0;
  double u_gamma = 0.0;
  double s_gamma = 0.0;
  double D_gamma = 0.0;
  double n_gamma = 0.0;
  double M_gamma = 0.0;
};

/// mu0 = 1 / [(2pi)^-3 int dp/eps(p)], by offset-grid refinement.
/// The reported error is the refinement estimate, <= tol on convergence.
QuadratureEstimate compute_mu0(double tol, const RefineOptions& opts = {});

/// Populate every derived constant from gamma (mu0 computed at `tol`).
ModelParams make_params(double gamma, double mu0_tol = 1e-9);

/// Same, reusing an already computed mu0 estimate.
ModelParams make_params(double gamma, const QuadratureEstimate& mu0);

}  // namespace lattice3b

#endif
