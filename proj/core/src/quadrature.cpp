#include "lattice3b/quadrature.hpp"

#include <array>
#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lattice3b {

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

double quadrature(const Integrand& f, const QuadratureRule& rule) {
  const std::size_t n = rule.size();
  std::vector<double> terms(n);
  std::atomic<bool> singular{false};

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double val = f(rule.nodes[i]);
    if (!std::isfinite(val)) singular.store(true, std::memory_order_relaxed);
    terms[i] = val * rule.weights[i];
  }
  if (singular)
    throw SingularNodeError(
        "quadrature: integrand not finite at a node (use an offset or graded grid)");
  return pairwise_sum(terms);
}

namespace {

// Uniform tensor grids are evaluated slab by slab so refinement up to
// n = 256 never materializes an n^3 node list.
double quadrature_uniform(const Integrand& f, const GridSpec& spec) {
  const int n = spec.n_per_axis;
  if (n < 1) throw std::invalid_argument("quadrature: n_per_axis must be positive");
  if (spec.offset && n % 2 != 0)
    throw std::invalid_argument("quadrature: offset grids need even n_per_axis");
  constexpr double kPi = 3.141592653589793238462643383279502884;
  const double h = 2.0 * kPi / n;
  const double shift = spec.offset ? 0.5 : 0.0;

  std::array<std::vector<double>, 3> axis;
  for (int j = 0; j < 3; ++j) {
    axis[j].resize(n);
    for (int i = 0; i < n; ++i)
      axis[j][i] = spec.center[j] - kPi + (i + shift) * h;
  }

  std::vector<double> slab(n);
  std::atomic<bool> singular{false};
#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<double> terms(static_cast<std::size_t>(n) * n);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int i1 = 0; i1 < n; ++i1) {
      std::size_t idx = 0;
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) {
          const double v =
              f(wrap(axis[0][i1], axis[1][i2], axis[2][i3]));
          if (!std::isfinite(v)) singular.store(true, std::memory_order_relaxed);
          terms[idx++] = v;
        }
      slab[i1] = pairwise_sum(terms);
    }
  }
  if (singular)
    throw SingularNodeError(
        "quadrature: integrand not finite at a node (use an offset or graded grid)");
  return pairwise_sum(slab) * h * h * h;
}

}  // namespace

double quadrature(const Integrand& f, const GridSpec& spec) {
  if (!spec.grading) return quadrature_uniform(f, spec);
  return quadrature(f, build_rule(spec));
}

double extrapolate_ladder(std::span<const double> level_values,
                          std::span<const int> orders) {
  std::vector<double> col(level_values.begin(), level_values.end());
  for (std::size_t k = 0; k < orders.size() && col.size() > 1; ++k) {
    const double r = std::pow(2.0, orders[k]);
    std::vector<double> next(col.size() - 1);
    for (std::size_t i = 0; i + 1 < col.size(); ++i)
      next[i] = (r * col[i + 1] - col[i]) / (r - 1.0);
    col.swap(next);
  }
  return col.back();
}

QuadratureEstimate refine(const Integrand& f, double tol, const GridSpec& base,
                          const RefineOptions& opts) {
  if (!(tol > 0.0)) throw std::invalid_argument("refine: tol must be positive");
  if (opts.n_start < 2 || opts.n_max < opts.n_start)
    throw std::invalid_argument("refine: bad level budget");

  QuadratureEstimate est;
  std::vector<double> plain;  // per-level raw midpoint values
  double prev = 0.0;
  bool have_prev = false;

  for (int n = opts.n_start; n <= opts.n_max; n *= 2) {
    GridSpec spec = base;
    spec.n_per_axis = n;
    plain.push_back(quadrature(f, spec));
    est.levels_used.push_back(n);

    const double value = extrapolate_ladder(plain, opts.orders);
    if (have_prev) {
      est.error_estimate = std::abs(value - prev);
      est.value = value;
      if (est.error_estimate < tol) {
        est.converged = true;
        return est;
      }
    } else {
      est.value = value;
      est.error_estimate = std::abs(value);
    }
    prev = value;
    have_prev = true;
  }
  return est;  // budget exhausted; converged stays false
}

}  // namespace lattice3b
