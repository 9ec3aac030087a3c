#include "lattice3b/two_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lattice3b {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvCell = 1.0 / (kTwoPi * kTwoPi * kTwoPi);

double radical(double gamma, double cos_kj) {
  return std::sqrt(1.0 + 2.0 * gamma * cos_kj + gamma * gamma);
}

}  // namespace

double pair_energy(const TorusVec& k, const TorusVec& q, const ModelParams& par) {
  return dispersion(q) + par.gamma * dispersion(wrap(k.c1 - q.c1, k.c2 - q.c2, k.c3 - q.c3));
}

double pair_energy_product_form(const TorusVec& k, const TorusVec& q,
                                const ModelParams& par) {
  const TorusVec phi = shifted_minimizer(k, par);
  double e = 3.0 * (1.0 + par.gamma);
  for (int j = 0; j < 3; ++j)
    e -= radical(par.gamma, std::cos(k[j])) * std::cos(q[j] - phi[j]);
  return e;
}

double band_bottom(const TorusVec& k, const ModelParams& par) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j) s += radical(par.gamma, std::cos(k[j]));
  return 3.0 * (1.0 + par.gamma) - s;
}

double band_top(const TorusVec& k, const ModelParams& par) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j) s += radical(par.gamma, std::cos(k[j]));
  return 3.0 * (1.0 + par.gamma) + s;
}

TorusVec shifted_minimizer(const TorusVec& k, const ModelParams& par) {
  TorusVec out;
  for (int j = 0; j < 3; ++j)
    out[j] = std::atan2(par.gamma * std::sin(k[j]), 1.0 + par.gamma * std::cos(k[j]));
  return out;
}

// ---------------------------------------------------------------------------
// Determinant evaluation
//
// The integral I(z) = (2pi)^-3 int dq / (E_{k,g}(q) - z) is evaluated on
// grids anchored at the minimizer of E so that its singular point sits at a
// cell corner. Away from threshold the offset tensor ladder converges; once
// sqrt(m - z) is small the integrand varies on that scale and the rule
// switches to logarithmically graded spherical shells.
// ---------------------------------------------------------------------------

namespace {

struct TensorLevel {
  int n = 0;
  double w0 = 0.0;  // h^3
  std::array<std::vector<double>, 3> axis;  // per-axis pair-energy tables
};

TensorLevel build_tensor_level(const TorusVec& k, const TorusVec& center,
                               double gamma, int n) {
  TensorLevel lv;
  lv.n = n;
  const double h = kTwoPi / n;
  lv.w0 = h * h * h;
  auto omc = [](double x) {  // 1 - cos x, stable at small x
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s;
  };
  for (int j = 0; j < 3; ++j) {
    lv.axis[j].resize(n);
    for (int i = 0; i < n; ++i) {
      const double q = center[j] - kPi + (i + 0.5) * h;
      lv.axis[j][i] = omc(q) + gamma * omc(k[j] - q);
    }
  }
  return lv;
}

// (2pi)^-3 sum w0 / (E - z), pairwise per (i2,i3) slab then across slabs.
double tensor_level_integral(const TensorLevel& lv, double z) {
  const int n = lv.n;
  std::vector<double> slab(n);

#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<double> terms(static_cast<std::size_t>(n) * n);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int i1 = 0; i1 < n; ++i1) {
      const double a1 = lv.axis[0][i1] - z;
      std::size_t idx = 0;
      for (int i2 = 0; i2 < n; ++i2) {
        const double a12 = a1 + lv.axis[1][i2];
        for (int i3 = 0; i3 < n; ++i3) terms[idx++] = 1.0 / (a12 + lv.axis[2][i3]);
      }
      slab[i1] = pairwise_sum(terms);
    }
  }
  return pairwise_sum(slab) * lv.w0 * kInvCell;
}

struct GradedArrays {
  std::vector<double> energy;
  std::vector<double> weight;
};

GradedArrays build_graded_arrays(const TorusVec& k, const TorusVec& center,
                                 const ModelParams& par, double r_inner,
                                 int levels, int n_theta, int n_phi,
                                 int tensor_n) {
  GridSpec spec;
  spec.n_per_axis = tensor_n;
  spec.center = center;
  RadialGrading g;
  g.center = center;
  g.inner_radius = r_inner;
  g.levels = levels;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  spec.grading = g;

  const QuadratureRule rule = build_rule(spec);
  GradedArrays out;
  out.energy.resize(rule.size());
  out.weight = rule.weights;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rule.size()); ++i)
    out.energy[i] = pair_energy(k, rule.nodes[i], par);
  return out;
}

double graded_integral(const GradedArrays& a, double z) {
  std::vector<double> terms(a.energy.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(terms.size()); ++i)
    terms[i] = a.weight[i] / (a.energy[i] - z);
  return pairwise_sum(terms) * kInvCell;
}

}  // namespace

/// Caches grids and per-node energies for one k, so a bisection pays the
/// trigonometry once and each z evaluation is a sweep of divisions.
class DetEvaluator {
 public:
  DetEvaluator(const TorusVec& k, const ModelParams& par, const DetOptions& opts)
      : k_(k), par_(par), opts_(opts), m_(band_bottom(k, par)),
        center_(shifted_minimizer(k, par)) {}

  double m() const { return m_; }

  // I(z) with an error estimate.
  std::pair<double, double> integral(double z) {
    const double gap = m_ - z;
    if (gap < opts_.graded_switch * opts_.graded_switch)
      return graded(z);
    return tensor_ladder(z);
  }

 private:
  std::pair<double, double> tensor_ladder(double z) {
    const double tol_i = opts_.tol / std::max(par_.v_gamma, 1.0);
    static const int orders[] = {1, 3, 5};
    std::vector<double> plain;
    double prev = 0.0, value = 0.0, err = 0.0;
    std::size_t lvl = 0;
    for (int n = opts_.n_start; n <= opts_.n_max; n *= 2, ++lvl) {
      if (lvl == tensor_.size())
        tensor_.push_back(build_tensor_level(k_, center_, par_.gamma, n));
      plain.push_back(tensor_level_integral(tensor_[lvl], z));
      value = extrapolate_ladder(plain, orders);
      if (lvl > 0) {
        err = std::abs(value - prev);
        if (err < tol_i) break;
      }
      prev = value;
    }
    return {value, err};
  }

  std::pair<double, double> graded(double z) {
    if (graded_.empty()) {
      graded_.push_back(build_graded_arrays(
          k_, center_, par_, opts_.graded_r_inner, opts_.graded_levels,
          opts_.graded_n_theta, opts_.graded_n_phi, opts_.graded_tensor_n));
      graded_.push_back(build_graded_arrays(
          k_, center_, par_, opts_.graded_r_inner,
          opts_.graded_levels + opts_.graded_levels / 2,
          opts_.graded_n_theta + 8, opts_.graded_n_phi + 8,
          opts_.graded_tensor_n + 16));
    }
    const double coarse = graded_integral(graded_[0], z);
    const double fine = graded_integral(graded_[1], z);
    return {fine, std::abs(fine - coarse)};
  }

  TorusVec k_;
  const ModelParams& par_;
  DetOptions opts_;
  double m_;
  TorusVec center_;
  std::vector<TensorLevel> tensor_;
  std::vector<GradedArrays> graded_;
};

namespace {

DeterminantEval determinant_with(DetEvaluator& ev, const TorusVec& k, double z,
                                 const ModelParams& par) {
  const auto [integral, ierr] = ev.integral(z);
  DeterminantEval out;
  out.k = k;
  out.z = z;
  out.value = 1.0 - par.v_gamma * integral;
  out.error_estimate = par.v_gamma * ierr;
  return out;
}

}  // namespace

DetOptions fast_det_options() {
  DetOptions o;
  o.tol = 1e-8;
  o.n_max = 128;
  o.graded_levels = 20;
  o.graded_n_theta = 12;
  o.graded_n_phi = 12;
  o.graded_tensor_n = 32;
  return o;
}

DeterminantEval determinant(const TorusVec& k, double z, const ModelParams& par,
                            const DetOptions& opts) {
  const double m = band_bottom(k, par);
  if (z > m + 1e-12 * (1.0 + std::abs(m)))
    throw std::domain_error("determinant: z above the band bottom m(k,gamma)");
  DetEvaluator ev(k, par, opts);
  return determinant_with(ev, k, std::min(z, m), par);
}

double determinant_on_rule(const TorusVec& k, double z, const ModelParams& par,
                           const QuadratureRule& rule) {
  std::vector<double> terms(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double e = pair_energy(k, rule.nodes[i], par);
    terms[i] = rule.weights[i] / (e - z);
  }
  return 1.0 - par.v_gamma * kInvCell * pairwise_sum(terms);
}

namespace {

template <typename DetFn>
BoundStateSample bisect_bound_state(const TorusVec& k, double m, double tol,
                                    DetFn&& det) {
  constexpr double kTiny = 1e-6;
  double z_lo = kTiny * m;
  double z_hi = (1.0 - kTiny) * m;
  double d_lo = det(z_lo);
  double d_hi = det(z_hi);

  // The root lies in (0, m); quadrature noise near the resonance regime can
  // push the lower endpoint's sign, so walk it to 0 and then negative.
  if (d_lo <= 0.0) {
    z_lo = 0.0;
    d_lo = det(z_lo);
    double step = kTiny * m;
    while (d_lo <= 0.0 && step < 0.2 * (1.0 + m)) {
      z_lo = -step;
      d_lo = det(z_lo);
      step *= 4.0;
    }
  }
  if (d_hi >= 0.0) {
    z_hi = m;
    d_hi = det(z_hi);
  }
  if (!(d_lo > 0.0 && d_hi < 0.0))
    throw BracketFailure("bound_state_energy: no sign change across (0, m)",
                         z_lo, z_hi, d_lo, d_hi);

  while (z_hi - z_lo > tol) {
    const double mid = 0.5 * (z_lo + z_hi);
    if (mid <= z_lo || mid >= z_hi) break;  // bracket at rounding limit
    if (det(mid) > 0.0)
      z_lo = mid;
    else
      z_hi = mid;
  }

  BoundStateSample out;
  out.k = k;
  out.m_k = m;
  out.z_gamma = 0.5 * (z_lo + z_hi);
  out.bracket_width = z_hi - z_lo;
  return out;
}

}  // namespace

BoundStateSample bound_state_energy(const TorusVec& k, const ModelParams& par,
                                    double tol, const DetOptions& opts) {
  const double m = band_bottom(k, par);
  if (m <= 0.0)
    throw std::invalid_argument("bound_state_energy: k must be nonzero");
  if (tol <= 0.0) tol = 1e-10 * (1.0 + m);

  DetEvaluator ev(k, par, opts);
  return bisect_bound_state(
      k, m, tol, [&](double z) { return determinant_with(ev, k, z, par).value; });
}

BoundStateSample bound_state_on_rule(const TorusVec& k, const ModelParams& par,
                                     const QuadratureRule& rule, double tol) {
  const double m = band_bottom(k, par);
  if (m <= 0.0)
    throw std::invalid_argument("bound_state_on_rule: k must be nonzero");

  // Cache node energies; each z evaluation is then a single sweep.
  std::vector<double> energy(rule.size());
  double e_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rule.size(); ++i) {
    energy[i] = pair_energy(k, rule.nodes[i], par);
    e_min = std::min(e_min, energy[i]);
  }
  std::vector<double> terms(rule.size());
  auto det = [&](double z) {
    for (std::size_t i = 0; i < rule.size(); ++i)
      terms[i] = rule.weights[i] / (energy[i] - z);
    return 1.0 - par.v_gamma * kInvCell * pairwise_sum(terms);
  };
  // The frozen determinant's band bottom is the grid minimum, which sits
  // above m(k,gamma); the discrete root can fall between the two.
  const double top = e_min * (1.0 - 1e-13) - 1e-13;
  if (tol <= 0.0) tol = 1e-12 * (1.0 + m);
  BoundStateSample out = bisect_bound_state(k, top, tol, det);
  out.m_k = m;
  return out;
}

double two_body_oracle(const TorusVec& k, const ModelParams& par,
                       const GridSpec& grid) {
  if (grid.n_per_axis > 24)
    throw std::invalid_argument("two_body_oracle: grid capped at n = 24 per axis");
  const QuadratureRule rule = build_rule(grid);

  std::vector<double> energy(rule.size());
  double e_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rule.size(); ++i) {
    energy[i] = pair_energy(k, rule.nodes[i], par);
    e_min = std::min(e_min, energy[i]);
  }

  // diag(E_i) - c sqrt(w_i w_j) has exactly one eigenvalue below min E_i,
  // the root of the rank-one secular function below the diagonal spectrum.
  std::vector<double> terms(rule.size());
  auto secular = [&](double lam) {
    for (std::size_t i = 0; i < rule.size(); ++i)
      terms[i] = rule.weights[i] / (energy[i] - lam);
    return 1.0 - par.v_gamma * kInvCell * pairwise_sum(terms);
  };

  double hi = e_min - 1e-13 * (1.0 + std::abs(e_min));
  double lo = e_min - 0.5;
  while (secular(lo) <= 0.0) {
    lo = e_min - 2.0 * (e_min - lo);
    if (e_min - lo > 1e6) throw std::runtime_error("two_body_oracle: no bracket");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (secular(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double threshold_slope(const ModelParams& par, double h, const DetOptions& opts) {
  if (!(h > 0.0) || h > 0.2)
    throw std::invalid_argument("threshold_slope: need 0 < h <= 0.2");
  const TorusVec zero{};
  DetEvaluator ev(zero, par, opts);
  const double d0 = determinant_with(ev, zero, 0.0, par).value;
  auto slope_at = [&](double w) {
    return (determinant_with(ev, zero, -w * w, par).value - d0) / w;
  };
  const double s1 = slope_at(h);
  const double s2 = slope_at(0.5 * h);
  return 2.0 * s2 - s1;  // kills the O(h) term of the expansion
}

double threshold_slope_form_a(const ModelParams& par) {
  const double g = par.gamma;
  return par.v_gamma * std::pow(g, 1.5) /
         (std::sqrt(2.0) * kPi * std::pow(1.0 + g, 1.5));
}

double threshold_slope_form_b(const ModelParams& par) {
  const double g = par.gamma;
  return par.v_gamma / (std::sqrt(2.0) * kPi * std::pow(1.0 + g, 1.5));
}

}  // namespace lattice3b
