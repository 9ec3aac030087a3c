#ifndef LATTICE3B_EFIMOV_HPP
#define LATTICE3B_EFIMOV_HPP

#include <vector>

#include "lattice3b/params.hpp"

namespace lattice3b {

/// Scale-invariant model kernel  S(t;y) = (2pi)^-2 u_g / (cosh y + s_g t),
/// t = cos angle between directions, y = log-radial separation. |t| <= 1.
double s_kernel(double t, double y, const ModelParams& par);

/// Its symbol (Fourier transform in y), positive convention:
///   (2pi)^-1 u_g sinh(lambda arccos(s_g t)) / (sqrt(1-s_g^2 t^2) sinh(pi lambda)),
/// with the lambda -> 0 limit arccos(s_g t)/pi taken explicitly.
double s_hat(double t, double lambda, const ModelParams& par);

/// Partial-wave symbol  S^(l)(lambda) = 2pi int_{-1}^{1} P_l(t) s_hat(t,lambda) dt
/// by Gauss-Legendre quadrature.
double partial_wave(int l, double lambda, const ModelParams& par, int n_gauss = 64);

/// Closed form of the l = 0 symbol:
///   u_g sinh(lambda arcsin s_g) / (s_g lambda cosh(pi lambda / 2)).
double s0_closed_form(double lambda, const ModelParams& par);

/// Lebesgue measure of {lambda : S^(l)(lambda) > mu}. The symbol is even
/// and decays exponentially; crossings are bracketed by a scan and
/// bisected to tol.
double level_set_measure(int l, double mu, const ModelParams& par,
                         double tol = 1e-10, double window = 20.0);

struct PartialWaveTable {
  double gamma = 0.0;
  int l_max = 0;
  std::vector<double> lambda_grid;
  std::vector<std::vector<double>> values;   // [l][lambda index]
  std::vector<double> level_measures;        // per-l measure of {S^(l) > mu}
  double mu = 1.0;
};
PartialWaveTable build_partial_wave_table(const ModelParams& par, int l_max,
                                          double mu = 1.0, double lambda_max = 8.0,
                                          int n_lambda = 161);

struct EfimovCoefficient {
  double mu = 1.0;
  double gamma = 0.0;
  double value = 0.0;  // U(mu,gamma) >= 0
  int l_max = 0;
  double window = 0.0;
  double truncation_estimate = 0.0;  // first omitted l term
};

/// U(mu,gamma) = (4pi)^-1 sum_{l<=l_max} (2l+1) mes{S^(l) > mu}.
EfimovCoefficient efimov_coefficient(double mu, const ModelParams& par,
                                     int l_max = 8, double tol = 1e-10);

struct SOperatorCount {
  double r = 0.0;
  int count = 0;
  double ratio = 0.0;  // count / (2r), converges to U(mu,gamma)
};

/// Eigenvalue count above mu of the truncated model operator on (0,r):
/// per-l Nystrom tables of the convolution kernel S^(l)(x-x') on a uniform
/// midpoint x-grid, weighted by (2l+1).
SOperatorCount s_operator_count(double r, double mu, const ModelParams& par,
                                int l_max = 8, int n_x = 600);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of y - (slope x + intercept)
};

/// Least-squares line through (x_j, N_j); needs at least 4 points.
LineFit slope_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lattice3b

#endif
