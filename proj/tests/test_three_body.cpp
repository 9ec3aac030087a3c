#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "lattice3b/three_body.hpp"

using namespace lattice3b;

namespace {

constexpr double kPi = std::numbers::pi;

const ModelParams& params(double gamma) {
  static const QuadratureEstimate mu0 = compute_mu0(1e-9);
  static std::map<double, ModelParams> cache;
  auto it = cache.find(gamma);
  if (it == cache.end()) it = cache.emplace(gamma, make_params(gamma, mu0)).first;
  return it->second;
}

TorusVec rand_k(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  return wrap(u(rng), u(rng), u(rng));
}

TauOptions quick_tau() {
  TauOptions t;
  t.scan_n = 6;
  t.tol = 1e-7;
  return t;
}

}  // namespace

TEST_CASE("total energy: symmetry, positivity, quadratic form") {
  const ModelParams& par = params(1.3);
  CHECK(total_energy({}, {}, {}, par) == 0.0);

  std::mt19937_64 rng(41);
  for (int it = 0; it < 200; ++it) {
    const TorusVec K = rand_k(rng), p = rand_k(rng), q = rand_k(rng);
    const double a = total_energy(K, p, q, par);
    CHECK(a >= 0.0);
    CHECK(a == doctest::Approx(total_energy(K, q, p, par)).epsilon(1e-13));
  }

  // near zero: E = ((1+g)p^2 + 2g(p,q) + (1+g)q^2)/2 + higher order
  for (double g : {0.5, 1.0, 2.0}) {
    const TorusVec p = wrap(1e-3, -0.5e-3, 0.0), q = wrap(-0.5e-3, 0.25e-3, 1e-3);
    const double p2 = p.c1 * p.c1 + p.c2 * p.c2 + p.c3 * p.c3;
    const double q2 = q.c1 * q.c1 + q.c2 * q.c2 + q.c3 * q.c3;
    const double pq = p.c1 * q.c1 + p.c2 * q.c2 + p.c3 * q.c3;
    const double quad = 0.5 * ((1 + g) * p2 + 2 * g * pq + (1 + g) * q2);
    CHECK(total_energy({}, p, q, params(g)) ==
          doctest::Approx(quad).epsilon(1e-5));
  }
}

TEST_CASE("band edges bound the surface") {
  std::mt19937_64 rng(43);
  for (double g : {0.5, 1.0, 2.0}) {
    const ModelParams& par = params(g);
    const BandEdges b0 = band_edges({}, par);
    CHECK(b0.e_min == doctest::Approx(0.0).epsilon(1e-12));

    const TorusVec K = rand_k(rng);
    const BandEdges be = band_edges(K, par);
    CHECK(be.e_min < be.e_max);
    // extrema certified against random probes
    for (int it = 0; it < 10000; ++it) {
      const double e = total_energy(K, rand_k(rng), rand_k(rng), par);
      CHECK(e >= be.e_min - 1e-9);
      CHECK(e <= be.e_max + 1e-9);
    }
    // the reported arg attains the edge
    CHECK(total_energy(K, be.argmin_p, be.argmin_q, par) ==
          doctest::Approx(be.e_min).epsilon(1e-9));
    CHECK(total_energy(K, be.argmax_p, be.argmax_q, par) ==
          doctest::Approx(be.e_max).epsilon(1e-9));
  }
}

TEST_CASE("band edge continuity in K") {
  const ModelParams& par = params(1.0);
  const TorusVec K1 = wrap(0.8, 0.3, -0.2);
  const TorusVec K2 = wrap(0.8 + 1e-4, 0.3, -0.2);
  CHECK(std::abs(band_edges(K1, par).e_min - band_edges(K2, par).e_min) < 1e-3);
}

TEST_CASE("tau at K = 0 is the resonance point") {
  const ModelParams& par = params(1.0);
  const ChannelMin cm = tau_channel_min({}, par, quick_tau());
  CHECK(std::abs(cm.tau) < 1e-6);
  CHECK(cm.minimizer.norm() < 1e-3);
  CHECK(cm.hessian_positive_definite);
  CHECK(cm.below_band);  // tau = E_min = 0 here, equality within tolerance
}

TEST_CASE("tau: below band, even in K, positive-definite Hessian") {
  std::mt19937_64 rng(47);
  for (double g : {0.5, 2.0}) {
    const ModelParams& par = params(g);
    const TorusVec K = rand_k(rng);
    if (K.norm() < 0.5) continue;
    const ChannelMin cm = tau_channel_min(K, par, quick_tau());
    const BandEdges be = band_edges(K, par);
    CHECK(cm.tau < be.e_min);
    CHECK(cm.hessian_positive_definite);

    const ChannelMin cmm = tau_channel_min(-K, par, quick_tau());
    CHECK(cm.tau == doctest::Approx(cmm.tau).epsilon(1e-6));
  }
}

TEST_CASE("essential spectrum covers the channel fibers") {
  const ModelParams& par = params(1.0);
  const TorusVec K = wrap(1.1, -0.6, 0.4);
  TauOptions topt = quick_tau();
  const ChannelMin cm = tau_channel_min(K, par, topt);
  const BandEdges be = band_edges(K, par);
  const SpectrumInterval si = essential_spectrum(K, par, topt);
  CHECK(si.lower == doctest::Approx(cm.tau).epsilon(1e-9));
  CHECK(si.upper == doctest::Approx(be.e_max).epsilon(1e-12));
  CHECK(si.lower < si.upper);

  // fiber pieces {z(K-p)+eps(p)} and the band [m+eps, M+eps] sit inside
  std::mt19937_64 rng(53);
  for (int it = 0; it < 4; ++it) {
    const TorusVec p = rand_k(rng);
    const TorusVec kk = wrap(K.c1 - p.c1, K.c2 - p.c2, K.c3 - p.c3);
    const double ep = dispersion(p);
    if (kk.norm() > 1e-6) {
      const double zb = bound_state_energy(kk, par, 1e-8, fast_det_options()).z_gamma;
      CHECK(zb + ep >= si.lower - 1e-6);
      CHECK(zb + ep <= si.upper + 1e-6);
    }
    CHECK(band_bottom(kk, par) + ep >= si.lower - 1e-9);
    CHECK(band_top(kk, par) + ep <= si.upper + 1e-9);
  }
}

TEST_CASE("delta_shifted: limits and positivity below tau") {
  const ModelParams& par = params(1.0);
  const TorusVec K = wrap(0.9, 0.2, 0.0);
  const TorusVec p = wrap(0.4, -0.3, 0.5);
  CHECK(delta_shifted(K, p, -1e6, par).value == doctest::Approx(1.0).epsilon(1e-5));

  // K=0, p=0, z=0 is the resonance value
  const DeterminantEval d = delta_shifted({}, {}, 0.0, par);
  CHECK(std::abs(d.value) <= 10.0 * std::max(d.error_estimate, 1e-15));
}

TEST_CASE("near-threshold quadratic bounds of delta_shifted") {
  const ModelParams& par = params(1.0);
  const TorusVec K = wrap(1.0, 0.0, 0.0);
  TauOptions topt = quick_tau();
  const ChannelMin cm = tau_channel_min(K, par, topt);

  // c|p-p*|^2 <= Delta(K,p,tau) <= C|p-p*|^2 on a small ball
  std::vector<double> ratios;
  for (double r : {0.02, 0.04, 0.08}) {
    for (int dir = 0; dir < 3; ++dir) {
      TorusVec p = cm.minimizer;
      p[dir] = wrap_angle(p[dir] + r);
      const double val = delta_shifted(K, p, cm.tau, par, fast_det_options()).value;
      CHECK(val > 0.0);
      ratios.push_back(val / (r * r));
    }
  }
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(lo > 0.0);
  CHECK(hi / lo < 20.0);  // comparable constants on the ball
}

TEST_CASE("bs_assemble: symmetry, positivity, domain checks") {
  const ModelParams& par = params(1.0);
  GridSpec grid;
  grid.n_per_axis = 6;
  const SymmetricKernel ker = bs_assemble({}, -0.3, par, grid, DeltaEval::shared_grid);
  CHECK(ker.n == 216);
  for (std::size_t i = 0; i < ker.n; i += 17)
    for (std::size_t j = 0; j < ker.n; j += 23) {
      CHECK(ker.at(i, j) == ker.at(j, i));
      CHECK(std::isfinite(ker.at(i, j)));
    }
  // refined Delta mode agrees with shared-grid counts on safe z
  const CountReport a = eigen_count_N({}, -0.3, par, grid,
                                      ExchangeSector::symmetric,
                                      DeltaEval::shared_grid);
  const CountReport b = eigen_count_N({}, -0.3, par, grid,
                                      ExchangeSector::symmetric,
                                      DeltaEval::refined, fast_det_options());
  CHECK(a.count == b.count);

  CHECK_THROWS_AS(bs_assemble({}, 2.0, par, grid, DeltaEval::shared_grid),
                  std::exception);  // z inside the grid band
}

TEST_CASE("count_above basics") {
  const ModelParams& par = params(1.0);
  GridSpec grid;
  grid.n_per_axis = 4;
  const SymmetricKernel ker = bs_assemble({}, -0.1, par, grid, DeltaEval::shared_grid);

  const CountReport far = count_above(ker, 1e9);
  CHECK(far.count == 0);

  // counting function is non-increasing in mu
  int prev = 1 << 30;
  for (double mu : {0.25, 0.5, 1.0, 2.0}) {
    const CountReport r = count_above(ker, mu);
    CHECK(r.count <= prev);
    prev = r.count;
  }
}

TEST_CASE("Birman-Schwinger equals direct diagonalization in both sectors") {
  std::mt19937_64 rng(59);
  const std::vector<std::pair<TorusVec, double>> cells = {
      {{}, -0.5},       {{}, -0.05},
      {wrap(kPi / 2, 0, 0), -0.3}, {wrap(0.5, 0.5, 0), -0.8}};
  for (double g : {0.5, 1.0, 2.0}) {
    const ModelParams& par = params(g);
    for (const auto& [K, z] : cells) {
      GridSpec grid;
      grid.n_per_axis = 4;
      for (ExchangeSector sec :
           {ExchangeSector::symmetric, ExchangeSector::antisymmetric}) {
        const CountReport bs = eigen_count_N(K, z, par, grid, sec,
                                             DeltaEval::shared_grid);
        const OracleReport dir = direct_count_oracle(K, z, par, 4, sec);
        INFO("gamma=", g, " z=", z, " sector=",
             sec == ExchangeSector::symmetric ? "sym" : "anti");
        CHECK(bs.count == dir.count);
      }
    }
  }
}

TEST_CASE("direct oracle: counting function behaviour") {
  const ModelParams& par = params(1.0);
  // far below every eigenvalue the count is zero
  CHECK(direct_count_oracle({}, -50.0, par, 3).count == 0);

  // non-decreasing in z
  int prev = 0;
  for (double z : {-2.0, -0.5, -0.1, -0.01}) {
    const int c = direct_count_oracle({}, z, par, 3).count;
    CHECK(c >= prev);
    prev = c;
  }
  CHECK_THROWS_AS(direct_count_oracle({}, -1.0, par, 6), std::invalid_argument);
  CHECK_THROWS_AS(direct_count_oracle({}, -1.0, par, 1), std::invalid_argument);
}

TEST_CASE("count monotone as z approaches threshold at K=0") {
  const ModelParams& par = params(1.0);
  TauOptions topt = quick_tau();
  const ChannelMin cm = tau_channel_min({}, par, topt);
  int prev = -1;
  for (double z : {-1e-2, -1e-4}) {
    const GridSpec grid = make_bs_grid(cm, z, 8, 6);
    const CountReport r = eigen_count_N({}, z, par, grid,
                                        ExchangeSector::symmetric,
                                        DeltaEval::refined, fast_det_options());
    CHECK(r.count >= prev);
    prev = r.count;
  }
  CHECK(prev >= 1);
}

TEST_CASE("cutoff kernel: support, symmetry, bounded difference") {
  const ModelParams& par = params(1.0);
  GridSpec grid;
  grid.n_per_axis = 6;
  const double delta = 1.0;
  const SymmetricKernel ck = cutoff_kernel(delta, {}, -0.1, par, grid);
  for (std::size_t i = 0; i < ck.n; ++i) {
    if (ck.nodes[i].norm() >= delta) {
      for (std::size_t j = 0; j < ck.n; j += 11) CHECK(ck.at(i, j) == 0.0);
    }
  }
  for (std::size_t i = 0; i < ck.n; i += 13)
    for (std::size_t j = 0; j < ck.n; j += 7) CHECK(ck.at(i, j) == ck.at(j, i));

  CHECK_THROWS_AS(cutoff_kernel(4.0, {}, -0.1, par, grid), std::invalid_argument);

  // the difference to the BS kernel stays bounded as z -> 0-
  std::vector<double> diffs;
  for (double z : {-1e-1, -1e-2, -1e-3, -1e-4})
    diffs.push_back(hs_difference({}, z, delta, par, grid, DeltaEval::shared_grid));
  const double first = diffs.front();
  for (double d : diffs) {
    CHECK(std::isfinite(d));
    CHECK(d < 3.0 * first + 1.0);
  }
}

TEST_CASE("graded counting grid construction") {
  ChannelMin cm;
  cm.tau = 0.0;
  const GridSpec g = make_bs_grid(cm, -1e-6, 8, 6);
  REQUIRE(g.grading.has_value());
  CHECK(g.grading->inner_radius == doctest::Approx(1e-4));
  const QuadratureRule rule = build_rule(g);
  double sum = 0.0;
  for (double w : rule.weights) sum += w;
  CHECK(sum == doctest::Approx(8.0 * kPi * kPi * kPi).epsilon(1e-12));
}
