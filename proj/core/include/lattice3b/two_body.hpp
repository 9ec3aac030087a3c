#ifndef LATTICE3B_TWO_BODY_HPP
#define LATTICE3B_TWO_BODY_HPP

#include <stdexcept>

#include "lattice3b/params.hpp"

namespace lattice3b {

/// Pair dispersion  E_{k,gamma}(q) = eps(q) + gamma eps(k-q).
double pair_energy(const TorusVec& k, const TorusVec& q, const ModelParams& par);

/// Equivalent product form  3(1+g) - sum_j sqrt(1+2g cos k_j+g^2) cos(q_j - phi_j),
/// used as a cross-check of pair_energy and as the source of the closed-form
/// band edges below.
double pair_energy_product_form(const TorusVec& k, const TorusVec& q,
                                const ModelParams& par);

/// Bottom/top of the pair band:  3(1+g) -+ sum_j sqrt(1+2g cos k_j + g^2).
double band_bottom(const TorusVec& k, const ModelParams& par);
double band_top(const TorusVec& k, const ModelParams& par);

/// Componentwise minimizer phase of the pair dispersion; odd in k.
/// Uses atan2(g sin k_j, 1 + g cos k_j), which stays on the minimizing
/// branch for every gamma (the arcsin form loses the branch once
/// 1 + gamma cos k_j < 0).
TorusVec shifted_minimizer(const TorusVec& k, const ModelParams& par);

/// Controls for determinant evaluation.
struct DetOptions {
  double tol = 1e-9;
  int n_start = 16;
  int n_max = 256;
  /// Switch to the graded spherical rule once sqrt(m-z) drops below this;
  /// the offset tensor ladder loses its error expansion in that regime.
  double graded_switch = 0.05;
  double graded_r_inner = 1e-9;
  int graded_levels = 48;  // radial nodes per decade
  int graded_n_theta = 24;
  int graded_n_phi = 24;
  int graded_tensor_n = 64;
};

/// Lighter graded resolution for inner loops (channel-minimum searches,
/// kernel assembly); roughly 1e-6 relative near threshold.
DetOptions fast_det_options();

struct DeterminantEval {
  TorusVec k;
  double z = 0.0;
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Fredholm determinant  Delta(k,z) = 1 - v(g)(2pi)^-3 int dq/(E_{k,g}(q)-z),
/// for z <= m(k,gamma); the boundary value is taken in the integrable sense.
/// Throws std::domain_error when z exceeds the band bottom.
DeterminantEval determinant(const TorusVec& k, double z, const ModelParams& par,
                            const DetOptions& opts = {});

/// Determinant discretized with a fixed rule (no refinement). This is the
/// exact algebra shared with the rank-one and Birman-Schwinger oracles.
double determinant_on_rule(const TorusVec& k, double z, const ModelParams& par,
                           const QuadratureRule& rule);

/// Thrown when no sign change brackets the bound state (possible only from
/// quadrature noise at tiny |k|); carries the endpoint evaluations.
struct BracketFailure : std::runtime_error {
  BracketFailure(const std::string& msg, double zl, double zh, double dl, double dh)
      : std::runtime_error(msg), z_lo(zl), z_hi(zh), delta_lo(dl), delta_hi(dh) {}
  double z_lo, z_hi, delta_lo, delta_hi;
};

struct BoundStateSample {
  TorusVec k;
  double z_gamma = 0.0;
  double m_k = 0.0;          // band bottom at k
  double bracket_width = 0.0;
};

/// Unique root of Delta(k,.) in (0, m(k,gamma)) by bisection (monotone
/// decreasing integrand makes bisection unconditionally safe). tol <= 0
/// selects the default 1e-10*(1+m). Requires k != 0.
BoundStateSample bound_state_energy(const TorusVec& k, const ModelParams& par,
                                    double tol = 0.0, const DetOptions& opts = {});

/// Same root-find with the determinant frozen on a fixed rule, for
/// grid-for-grid comparison against two_body_oracle.
BoundStateSample bound_state_on_rule(const TorusVec& k, const ModelParams& par,
                                     const QuadratureRule& rule, double tol = 0.0);

/// Lowest eigenvalue of diag(E_{k,g}(q_i)) - v(g)(2pi)^-3 sqrt(w_i w_j),
/// solved through the rank-one secular equation on the given grid.
double two_body_oracle(const TorusVec& k, const ModelParams& par,
                       const GridSpec& grid);

/// Finite-difference slope of omega -> Delta(0,-omega^2) at 0+, Richardson
/// extrapolated over h and h/2.
double threshold_slope(const ModelParams& par, double h = 1e-2,
                       const DetOptions& opts = {});

/// The two closed-form candidates for that slope. They differ by a factor
/// gamma^{3/2} and coincide at gamma = 1; the acceptance suite records which
/// one the finite-difference value matches.
double threshold_slope_form_a(const ModelParams& par);  // v g^{3/2} / (sqrt2 pi (1+g)^{3/2})
double threshold_slope_form_b(const ModelParams& par);  // v / (sqrt2 pi (1+g)^{3/2})

}  // namespace lattice3b

#endif
