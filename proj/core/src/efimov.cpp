#include "lattice3b/efimov.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lattice3b/gauss.hpp"

namespace lattice3b {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sinh(a*theta)/sinh(a*pi) for a = |lambda|, stable at both ends.
double sinh_ratio(double theta, double lambda) {
  const double a = std::abs(lambda);
  if (a < 1e-6) {
    // series of the ratio around a = 0
    return theta / kPi *
           (1.0 + a * a * (theta * theta - kPi * kPi) / 6.0);
  }
  return std::exp(a * (theta - kPi)) * (-std::expm1(-2.0 * a * theta)) /
         (-std::expm1(-2.0 * a * kPi));
}

}  // namespace

double s_kernel(double t, double y, const ModelParams& par) {
  if (std::abs(t) > 1.0)
    throw std::domain_error("s_kernel: |t| <= 1 required");
  return par.u_gamma / (kTwoPi * kTwoPi) / (std::cosh(y) + par.s_gamma * t);
}

double s_hat(double t, double lambda, const ModelParams& par) {
  if (std::abs(t) > 1.0)
    throw std::domain_error("s_hat: |t| <= 1 required");
  const double st = par.s_gamma * t;
  const double theta = std::acos(st);
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - st * st));
  return par.u_gamma / kTwoPi * sinh_ratio(theta, lambda) / sin_theta;
}

double partial_wave(int l, double lambda, const ModelParams& par, int n_gauss) {
  if (l < 0) throw std::invalid_argument("partial_wave: l >= 0");
  if (n_gauss < 32) throw std::invalid_argument("partial_wave: n_gauss >= 32");
  const GaussLegendre& gl = gauss_legendre(n_gauss);
  double acc = 0.0;
  for (int i = 0; i < n_gauss; ++i)
    acc += gl.weights[i] * legendre_p(l, gl.nodes[i]) *
           s_hat(gl.nodes[i], lambda, par);
  return kTwoPi * acc;
}

double s0_closed_form(double lambda, const ModelParams& par) {
  const double a = std::asin(par.s_gamma);
  if (std::abs(lambda) < 1e-10)
    return par.u_gamma * a / par.s_gamma;
  return par.u_gamma * std::sinh(lambda * a) /
         (par.s_gamma * lambda * std::cosh(0.5 * kPi * lambda));
}

double level_set_measure(int l, double mu, const ModelParams& par, double tol,
                         double window) {
  if (!(mu > 0.0)) throw std::invalid_argument("level_set_measure: mu > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("level_set_measure: tol > 0");

  auto symbol = [&](double lam) { return partial_wave(l, lam, par); };

  // widen until the boundary value is safely below level (symbols decay
  // exponentially in |lambda|)
  double w = window;
  while (symbol(w) > 0.01 * mu && w < 400.0) w *= 1.5;

  // scan [0, w] and bisect every crossing; the symbol is even in lambda
  const double step = 0.02;
  double measure_half = 0.0;
  double lam_prev = 0.0;
  bool above_prev = symbol(0.0) > mu;
  double seg_start = above_prev ? 0.0 : -1.0;
  for (double lam = step; lam <= w + 0.5 * step; lam += step) {
    const bool above = symbol(lam) > mu;
    if (above != above_prev) {
      double lo = lam_prev, hi = lam;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if ((symbol(mid) > mu) == above_prev)
          lo = mid;
        else
          hi = mid;
      }
      const double crossing = 0.5 * (lo + hi);
      if (above_prev)
        measure_half += crossing - seg_start;
      else
        seg_start = crossing;
      above_prev = above;
    }
    lam_prev = lam;
  }
  if (above_prev) measure_half += w - seg_start;  // open tail (cannot happen after widening)
  return 2.0 * measure_half;
}

PartialWaveTable build_partial_wave_table(const ModelParams& par, int l_max,
                                          double mu, double lambda_max,
                                          int n_lambda) {
  PartialWaveTable t;
  t.gamma = par.gamma;
  t.l_max = l_max;
  t.mu = mu;
  t.lambda_grid.resize(n_lambda);
  for (int i = 0; i < n_lambda; ++i)
    t.lambda_grid[i] = lambda_max * i / (n_lambda - 1);
  t.values.resize(l_max + 1);
  t.level_measures.resize(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    t.values[l].resize(n_lambda);
    for (int i = 0; i < n_lambda; ++i)
      t.values[l][i] = partial_wave(l, t.lambda_grid[i], par);
    t.level_measures[l] = level_set_measure(l, mu, par);
  }
  return t;
}

EfimovCoefficient efimov_coefficient(double mu, const ModelParams& par,
                                     int l_max, double tol) {
  if (!(mu > 0.0)) throw std::invalid_argument("efimov_coefficient: mu > 0");
  if (l_max < 4) throw std::invalid_argument("efimov_coefficient: l_max >= 4");

  EfimovCoefficient out;
  out.mu = mu;
  out.gamma = par.gamma;
  out.l_max = l_max;
  out.window = 20.0;
  double acc = 0.0;
  for (int l = 0; l <= l_max; ++l)
    acc += (2.0 * l + 1.0) * level_set_measure(l, mu, par, tol, out.window);
  out.value = acc / (4.0 * kPi);
  out.truncation_estimate =
      (2.0 * (l_max + 1) + 1.0) * level_set_measure(l_max + 1, mu, par, tol) /
      (4.0 * kPi);
  return out;
}

SOperatorCount s_operator_count(double r, double mu, const ModelParams& par,
                                int l_max, int n_x) {
  if (!(r > 0.0) || n_x < 8)
    throw std::invalid_argument("s_operator_count: need r > 0 and n_x >= 8");

  const double h = r / n_x;
  const int n_gauss = 96;
  const GaussLegendre& gl = gauss_legendre(n_gauss);

  SOperatorCount out;
  out.r = r;
  int total = 0;
  for (int l = 0; l <= l_max; ++l) {
    std::vector<double> pl(n_gauss);
    for (int i = 0; i < n_gauss; ++i) pl[i] = legendre_p(l, gl.nodes[i]);

    // convolution kernel values on the difference grid
    std::vector<double> tab(n_x);
    for (int d = 0; d < n_x; ++d) {
      const double y = d * h;
      double acc = 0.0;
      for (int i = 0; i < n_gauss; ++i)
        acc += gl.weights[i] * pl[i] * s_kernel(gl.nodes[i], y, par);
      tab[d] = kTwoPi * acc;
    }

    Eigen::MatrixXd M(n_x, n_x);
    for (int i = 0; i < n_x; ++i)
      for (int j = 0; j < n_x; ++j) M(i, j) = h * tab[std::abs(i - j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    int c = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (ev(i) > mu) ++c;
    total += (2 * l + 1) * c;
  }
  out.count = total;
  out.ratio = total / (2.0 * r);
  return out;
}

LineFit slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("slope_fit: size mismatch");
  if (x.size() < 4)
    throw std::invalid_argument("slope_fit: need at least 4 points");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw std::invalid_argument("slope_fit: abscissae must increase");

  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.slope * x[i] + fit.intercept);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

}  // namespace lattice3b
