#include "lattice3b/three_body.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lattice3b {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvCell = 1.0 / (kTwoPi * kTwoPi * kTwoPi);

}  // namespace

double total_energy(const TorusVec& K, const TorusVec& p, const TorusVec& q,
                    const ModelParams& par) {
  const TorusVec r = wrap(K.c1 - p.c1 - q.c1, K.c2 - p.c2 - q.c2, K.c3 - p.c3 - q.c3);
  return dispersion(p) + dispersion(q) + par.gamma * dispersion(r);
}

// ---------------------------------------------------------------------------
// Band edges. E(K;p,q) splits into independent per-axis terms
//   e_j(a,b) = (1-cos a) + (1-cos b) + g (1-cos(K_j - a - b)),
// so the 6D extrema are sums of three 2D extrema. Each 2D problem is solved
// by a scan over a 2D grid followed by Newton refinement.
// ---------------------------------------------------------------------------

namespace {

struct AxisExtremum {
  double value = 0.0;
  double a = 0.0, b = 0.0;
};

AxisExtremum axis_extremum(double Kj, double gamma, bool maximize, int scan_n) {
  const double sign = maximize ? -1.0 : 1.0;
  auto f = [&](double a, double b) {
    return sign * ((1.0 - std::cos(a)) + (1.0 - std::cos(b)) +
                   gamma * (1.0 - std::cos(Kj - a - b)));
  };

  const double h = kTwoPi / scan_n;
  AxisExtremum best;
  best.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan_n; ++i)
    for (int j = 0; j < scan_n; ++j) {
      const double a = -kPi + i * h, b = -kPi + j * h;
      const double v = f(a, b);
      if (v < best.value) best = {v, a, b};
    }

  // Newton on the 2x2 system; falls back to halved gradient steps if the
  // Hessian loses definiteness.
  double a = best.a, b = best.b;
  for (int it = 0; it < 60; ++it) {
    const double s3 = std::sin(Kj - a - b), c3 = std::cos(Kj - a - b);
    const double ga = sign * (std::sin(a) - gamma * s3);
    const double gb = sign * (std::sin(b) - gamma * s3);
    const double haa = sign * (std::cos(a) + gamma * c3);
    const double hbb = sign * (std::cos(b) + gamma * c3);
    const double hab = sign * (gamma * c3);
    const double det = haa * hbb - hab * hab;
    double da, db;
    if (det > 1e-12 && haa > 0.0) {
      da = -(hbb * ga - hab * gb) / det;
      db = -(haa * gb - hab * ga) / det;
    } else {
      da = -0.25 * ga;
      db = -0.25 * gb;
    }
    a += da;
    b += db;
    if (std::abs(da) + std::abs(db) < 1e-14) break;
  }
  const double refined = f(a, b);
  if (refined < best.value) best = {refined, a, b};
  best.value *= sign;
  return best;
}

}  // namespace

BandEdges band_edges(const TorusVec& K, const ModelParams& par, int scan_n) {
  BandEdges out;
  for (int j = 0; j < 3; ++j) {
    const AxisExtremum lo = axis_extremum(K[j], par.gamma, false, 4 * scan_n);
    const AxisExtremum hi = axis_extremum(K[j], par.gamma, true, 4 * scan_n);
    out.e_min += lo.value;
    out.e_max += hi.value;
    out.argmin_p[j] = wrap_angle(lo.a);
    out.argmin_q[j] = wrap_angle(lo.b);
    out.argmax_p[j] = wrap_angle(hi.a);
    out.argmax_q[j] = wrap_angle(hi.b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Channel minimum tau(K) = min_p { z_gamma(K-p) + eps(p) }.
// ---------------------------------------------------------------------------

namespace {

// z_gamma with the continuity convention z_gamma(0) = 0. For k so small
// that the whole window (0, m(k)) is below resolvable scale the midpoint is
// returned, bounding the error by m/2.
class ZGammaCache {
 public:
  ZGammaCache(const ModelParams& par, double tol, const DetOptions& det)
      : par_(par), tol_(tol), det_(det) {}

  double operator()(const TorusVec& k) {
    if (k.norm() < 1e-9) return 0.0;
    const std::array<double, 3> key = k.as_array();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double m = band_bottom(k, par_);
    const double z = (m < 1e-10)
                         ? 0.5 * m
                         : bound_state_energy(k, par_, tol_, det_).z_gamma;
    cache_.emplace(key, z);
    return z;
  }

 private:
  const ModelParams& par_;
  double tol_;
  DetOptions det_;
  std::map<std::array<double, 3>, double> cache_;
};

}  // namespace

ChannelMin tau_channel_min(const TorusVec& K, const ModelParams& par,
                           const TauOptions& opts) {
  ChannelMin out;
  out.K = K;

  // Stage 1: coarse proxy scan with a single-level frozen-grid bound state.
  // Accuracy is irrelevant here; only the basin ranking matters.
  GridSpec coarse_spec;
  coarse_spec.n_per_axis = 16;
  const QuadratureRule coarse_rule = build_rule(coarse_spec);
  auto z_coarse = [&](const TorusVec& k) -> double {
    if (k.norm() < 1e-9) return 0.0;
    try {
      return bound_state_on_rule(k, par, coarse_rule, 1e-4).z_gamma;
    } catch (const BracketFailure&) {
      return 0.0;  // resonance regime; stage 2 re-evaluates
    }
  };

  const int n = opts.scan_n;
  const double h = kTwoPi / n;
  std::vector<std::pair<double, TorusVec>> ranked;
  ranked.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3) {
        const TorusVec p = wrap(-kPi + i1 * h, -kPi + i2 * h, -kPi + i3 * h);
        ranked.emplace_back(z_coarse(wrap(K.c1 - p.c1, K.c2 - p.c2, K.c3 - p.c3)) +
                                dispersion(p),
                            p);
      }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Stage 2: accurate channel value on the leading candidates, then a
  // compass (coordinate pattern) polish from the best one.
  ZGammaCache z_acc(par, 0.1 * opts.tol, opts.det);
  auto Z = [&](const TorusVec& p) {
    return z_acc(wrap(K.c1 - p.c1, K.c2 - p.c2, K.c3 - p.c3)) + dispersion(p);
  };

  const int starts = std::max(1, opts.polish_starts);
  TorusVec best_p = ranked.front().second;
  double best_v = Z(best_p);
  for (int s = 1; s < starts && s < static_cast<int>(ranked.size()); ++s) {
    const double v = Z(ranked[s].second);
    if (v < best_v) {
      best_v = v;
      best_p = ranked[s].second;
    }
  }

  double step = 0.5 * h;
  while (step > 1e-6) {
    bool moved = false;
    for (int j = 0; j < 3; ++j)
      for (double sgn : {+1.0, -1.0}) {
        TorusVec trial = best_p;
        trial[j] = wrap_angle(trial[j] + sgn * step);
        const double v = Z(trial);
        if (v < best_v - 1e-15) {
          best_v = v;
          best_p = trial;
          moved = true;
        }
      }
    if (!moved) step *= 0.5;
  }

  out.tau = best_v;
  out.minimizer = best_p;

  // Hessian by central differences.
  const double hh = opts.hessian_step;
  auto shifted = [&](int j, double s) {
    TorusVec p = best_p;
    p[j] = wrap_angle(p[j] + s);
    return p;
  };
  const double f0 = best_v;
  if (!opts.compute_hessian) {
    if (opts.verify_below_band)
      out.below_band = out.tau < band_edges(K, par).e_min + 1e-10;
    return out;
  }
  for (int j = 0; j < 3; ++j) {
    out.hessian[j][j] = (Z(shifted(j, hh)) + Z(shifted(j, -hh)) - 2.0 * f0) / (hh * hh);
    for (int l = j + 1; l < 3; ++l) {
      TorusVec pp = shifted(j, hh);
      pp[l] = wrap_angle(pp[l] + hh);
      TorusVec pm = shifted(j, hh);
      pm[l] = wrap_angle(pm[l] - hh);
      TorusVec mp = shifted(j, -hh);
      mp[l] = wrap_angle(mp[l] + hh);
      TorusVec mm = shifted(j, -hh);
      mm[l] = wrap_angle(mm[l] - hh);
      const double v = (Z(pp) - Z(pm) - Z(mp) + Z(mm)) / (4.0 * hh * hh);
      out.hessian[j][l] = v;
      out.hessian[l][j] = v;
    }
  }
  Eigen::Matrix3d H;
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) H(j, l) = out.hessian[j][l];
  const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(H)
                                 .eigenvalues();
  out.hessian_positive_definite = ev.minCoeff() > 0.0;

  if (opts.verify_below_band) {
    const BandEdges be = band_edges(K, par);
    out.below_band = out.tau < be.e_min + 1e-10;
  }
  return out;
}

SpectrumInterval essential_spectrum(const TorusVec& K, const ModelParams& par,
                                    const TauOptions& opts) {
  const ChannelMin cm = tau_channel_min(K, par, opts);
  const BandEdges be = band_edges(K, par);
  return {cm.tau, be.e_max};
}

DeterminantEval delta_shifted(const TorusVec& K, const TorusVec& p, double z,
                              const ModelParams& par, const DetOptions& opts) {
  const TorusVec k = wrap(K.c1 - p.c1, K.c2 - p.c2, K.c3 - p.c3);
  return determinant(k, z - dispersion(p), par, opts);
}

// ---------------------------------------------------------------------------
// Birman-Schwinger kernel and counting.
// ---------------------------------------------------------------------------

SymmetricKernel bs_assemble(const TorusVec& K, double z, const ModelParams& par,
                            const GridSpec& grid, DeltaEval delta_eval,
                            const DetOptions& det) {
  SymmetricKernel ker;
  const QuadratureRule rule = build_rule(grid);
  const std::size_t N = rule.size();
  ker.nodes = rule.nodes;
  ker.weights = rule.weights;
  ker.n = N;

  // Pair energies E(K;p_i,p_j), symmetric.
  std::vector<double> E(N * N);
  std::atomic<bool> below{false};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(N); ++i) {
    for (std::size_t j = i; j < N; ++j) {
      const double e = total_energy(K, rule.nodes[i], rule.nodes[j], par);
      if (e - z <= 0.0) below.store(true, std::memory_order_relaxed);
      E[i * N + j] = e;
      E[j * N + i] = e;
    }
  }
  if (below.load())
    throw std::domain_error("bs_assemble: E(K;p,q) - z not positive on the grid");

  // Diagonal Delta factors.
  std::vector<double> delta(N);
  if (delta_eval == DeltaEval::shared_grid) {
    for (std::size_t i = 0; i < N; ++i) {
      std::vector<double> terms(N);
      for (std::size_t j = 0; j < N; ++j)
        terms[j] = rule.weights[j] / (E[i * N + j] - z);
      delta[i] = 1.0 - par.v_gamma * kInvCell * pairwise_sum(terms);
    }
  } else {
    std::atomic<bool> failed{false};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(N); ++i) {
      try {
        delta[i] = delta_shifted(K, rule.nodes[i], z, par, det).value;
      } catch (...) {
        failed.store(true, std::memory_order_relaxed);
        delta[i] = std::numeric_limits<double>::quiet_NaN();
      }
    }
    if (failed.load())
      throw std::runtime_error(
          "bs_assemble: Delta evaluation failed at a node (z above a local band bottom?)");
  }
  for (std::size_t i = 0; i < N; ++i)
    if (!(delta[i] > 0.0))
      throw std::runtime_error(
          "bs_assemble: Delta(K,p,z) not positive below tau (tau or Delta inaccurate)");

  std::vector<double> s(N);
  for (std::size_t i = 0; i < N; ++i) s[i] = std::sqrt(rule.weights[i] / delta[i]);

  ker.values.resize(N * N);
  const double c = par.v_gamma * kInvCell;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(N); ++i)
    for (std::size_t j = i; j < N; ++j) {
      const double v = c * s[i] * s[j] / (E[i * N + j] - z);
      ker.values[i * N + j] = v;
      ker.values[j * N + i] = v;
    }
  return ker;
}

CountReport count_above(const SymmetricKernel& kernel, double mu) {
  const std::size_t N = kernel.n;
  Eigen::Map<const Eigen::MatrixXd> M(kernel.values.data(), N, N);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();

  CountReport rep;
  rep.mu_level = mu;
  rep.grid_points = N;
  const double radius = std::max(std::abs(ev(0)), std::abs(ev(N - 1)));
  const double guard = 1e-8 * radius;
  rep.margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > mu) ++rep.count;
    rep.margin = std::min(rep.margin, std::abs(ev(i) - mu));
  }
  if (rep.margin <= guard) {
    rep.ambiguous = true;
    rep.note = "eigenvalue within guard band of the counting level";
  }
  return rep;
}

CountReport eigen_count_N(const TorusVec& K, double z, const ModelParams& par,
                          const GridSpec& grid, ExchangeSector sector,
                          DeltaEval delta_eval, const DetOptions& det) {
  SymmetricKernel ker = bs_assemble(K, z, par, grid, delta_eval, det);
  if (sector == ExchangeSector::antisymmetric) {
    // Counting below -1 of the kernel equals counting above +1 of its negative.
    for (double& v : ker.values) v = -v;
  }
  CountReport rep = count_above(ker, 1.0);
  rep.K = K;
  rep.z = z;
  return rep;
}

GridSpec make_bs_grid(const ChannelMin& channel, double z, int n_per_axis,
                      int levels, int n_theta, int n_phi) {
  GridSpec grid;
  grid.n_per_axis = n_per_axis;
  grid.center = channel.minimizer;
  RadialGrading g;
  g.center = channel.minimizer;
  g.inner_radius = std::clamp(std::sqrt(std::abs(channel.tau - z)) / 10.0, 1e-4, 0.3);
  g.levels = levels;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  grid.grading = g;
  return grid;
}

// ---------------------------------------------------------------------------
// Direct oracle: dense diagonalization in the exchange sector.
//
// On the grid, H = diag(E(K;p_i,p_j)) - v (V1 + V2) with V2 = I (x) vv^T,
// V1 = vv^T (x) I, v_i = sqrt(w_i)/(2pi)^{3/2}. In the orthonormal sector
// basis b_{ij} = (e_ij + sigma e_ji)/sqrt2 (i<j), b_ii (sigma=+ only):
//   <b_ij|V1+V2|b_kl> = d_jl v_i v_k + d_ik v_j v_l
//                       + sigma (d_jk v_i v_l + d_il v_j v_k)
//   <b_ii|V1+V2|b_kl> = sqrt2 (d_il v_i v_k + d_ik v_i v_l),   k < l
//   <b_ii|V1+V2|b_kk> = 2 d_ik v_i^2.
// ---------------------------------------------------------------------------

OracleReport direct_count_oracle(const TorusVec& K, double z,
                                 const ModelParams& par, int n,
                                 ExchangeSector sector) {
  if (n < 2 || n > 5)
    throw std::invalid_argument("direct_count_oracle: need 2 <= n <= 5");

  GridSpec spec;
  spec.n_per_axis = n;
  spec.offset = (n % 2 == 0);  // odd plain grids also avoid the origin
  const QuadratureRule rule = build_rule(spec);
  const std::size_t M = rule.size();

  std::vector<double> vv(M);
  for (std::size_t i = 0; i < M; ++i)
    vv[i] = std::sqrt(rule.weights[i] * kInvCell);

  // index the sector basis
  struct Pair {
    std::size_t i, j;
  };
  std::vector<Pair> basis;
  const bool sym = sector == ExchangeSector::symmetric;
  for (std::size_t i = 0; i < M; ++i) {
    if (sym) basis.push_back({i, i});
    for (std::size_t j = i + 1; j < M; ++j) basis.push_back({i, j});
  }
  const std::size_t D = basis.size();
  const double sigma = sym ? 1.0 : -1.0;

  Eigen::MatrixXd H(D, D);
  const double v = par.v_gamma;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 32)
#endif
  for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(D); ++a) {
    const auto [i, j] = basis[a];
    for (std::size_t b = a; b < D; ++b) {
      const auto [k, l] = basis[b];
      double w = 0.0;
      if (i == j && k == l) {
        w = (i == k) ? 2.0 * vv[i] * vv[i] : 0.0;
      } else if (i == j) {  // diagonal row, off-diagonal column
        w = std::numbers::sqrt2 *
            ((i == l ? vv[i] * vv[k] : 0.0) + (i == k ? vv[i] * vv[l] : 0.0));
      } else if (k == l) {
        w = std::numbers::sqrt2 *
            ((k == j ? vv[k] * vv[i] : 0.0) + (k == i ? vv[k] * vv[j] : 0.0));
      } else {
        w = (j == l ? vv[i] * vv[k] : 0.0) + (i == k ? vv[j] * vv[l] : 0.0) +
            sigma * ((j == k ? vv[i] * vv[l] : 0.0) + (i == l ? vv[j] * vv[k] : 0.0));
      }
      double h = -v * w;
      if (a == static_cast<std::ptrdiff_t>(b))
        h += total_energy(K, rule.nodes[i], rule.nodes[j], par);
      H(a, b) = h;
      H(b, a) = h;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  OracleReport rep;
  rep.dim = D;
  rep.margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < ev.size(); ++a) {
    if (ev(a) < z) ++rep.count;
    rep.margin = std::min(rep.margin, std::abs(ev(a) - z));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cutoff comparison kernel.
// ---------------------------------------------------------------------------

SymmetricKernel cutoff_kernel(double delta, const TorusVec& K, double z,
                              const ModelParams& par, const GridSpec& grid) {
  if (!(delta > 0.0) || delta >= kPi)
    throw std::invalid_argument("cutoff_kernel: need 0 < delta < pi");

  SymmetricKernel ker;
  const QuadratureRule rule = build_rule(grid);
  const std::size_t N = rule.size();
  ker.nodes = rule.nodes;
  ker.weights = rule.weights;
  ker.n = N;
  ker.values.assign(N * N, 0.0);

  const double Ksq = K.c1 * K.c1 + K.c2 * K.c2 + K.c3 * K.c3;
  const double beta = Ksq / (2.0 * par.M_gamma) + std::abs(std::min(z, 0.0));
  const double g = par.gamma;

  std::vector<double> prefac(N);  // sqrt(w) chi (n p^2 + 2 beta)^{-1/4}
  for (std::size_t i = 0; i < N; ++i) {
    const double pn = rule.nodes[i].norm();
    if (pn >= delta) {
      prefac[i] = 0.0;
      continue;
    }
    prefac[i] = std::sqrt(rule.weights[i]) *
                std::pow(par.n_gamma * pn * pn + 2.0 * beta, -0.25);
  }

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(N); ++i) {
    if (prefac[i] == 0.0) continue;
    const auto pi_ = ker.nodes[i].as_array();
    const double pi2 = pi_[0] * pi_[0] + pi_[1] * pi_[1] + pi_[2] * pi_[2];
    for (std::size_t j = i; j < N; ++j) {
      if (prefac[j] == 0.0) continue;
      const auto pj = ker.nodes[j].as_array();
      const double pj2 = pj[0] * pj[0] + pj[1] * pj[1] + pj[2] * pj[2];
      const double dot = pi_[0] * pj[0] + pi_[1] * pj[1] + pi_[2] * pj[2];
      const double denom = (1.0 + g) * (pi2 + pj2) + 2.0 * g * dot + 2.0 * beta;
      const double v = par.D_gamma * prefac[i] * prefac[j] / denom;
      ker.values[i * N + j] = v;
      ker.values[j * N + i] = v;
    }
  }
  return ker;
}

double hs_difference(const TorusVec& K, double z, double delta,
                     const ModelParams& par, const GridSpec& grid,
                     DeltaEval delta_eval) {
  const SymmetricKernel a = bs_assemble(K, z, par, grid, delta_eval);
  const SymmetricKernel b = cutoff_kernel(delta, K, z, par, grid);
  std::vector<double> sq(a.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sq[i] = d * d;
  }
  return std::sqrt(pairwise_sum(sq));
}

}  // namespace lattice3b
