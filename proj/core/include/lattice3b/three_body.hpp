#ifndef LATTICE3B_THREE_BODY_HPP
#define LATTICE3B_THREE_BODY_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lattice3b/two_body.hpp"

namespace lattice3b {

/// Total three-body energy surface  E(K;p,q) = eps(p)+eps(q)+g eps(K-p-q).
/// Symmetric in (p,q); the two explicit momenta are the identical-particle
/// pair, the third is fixed by momentum conservation.
double total_energy(const TorusVec& K, const TorusVec& p, const TorusVec& q,
                    const ModelParams& par);

struct BandEdges {
  double e_min = 0.0;
  double e_max = 0.0;
  TorusVec argmin_p, argmin_q;
  TorusVec argmax_p, argmax_q;
};

/// Extrema of E(K;.,.) over (T^3)^2: coarse 16^6 scan plus Newton polish.
BandEdges band_edges(const TorusVec& K, const ModelParams& par,
                     int scan_n = 16);

/// Minimum of the dispersion channel  Z(K,p) = z_gamma(K-p) + eps(p).
struct ChannelMin {
  TorusVec K;
  double tau = 0.0;
  TorusVec minimizer;
  std::array<std::array<double, 3>, 3> hessian{};  // central differences at the minimizer
  bool hessian_positive_definite = false;
  bool below_band = false;  // tau < E_min(K) verified
};

struct TauOptions {
  double tol = 1e-8;
  int scan_n = 8;          // coarse multi-start grid (includes p = 0)
  int polish_starts = 3;
  double hessian_step = 0.05;
  bool compute_hessian = true;
  bool verify_below_band = true;
  DetOptions det = fast_det_options();
};

ChannelMin tau_channel_min(const TorusVec& K, const ModelParams& par,
                           const TauOptions& opts = {});

/// Essential spectrum [tau(K), E_max(K)] of the three-body fiber.
struct SpectrumInterval {
  double lower = 0.0;
  double upper = 0.0;
};
SpectrumInterval essential_spectrum(const TorusVec& K, const ModelParams& par,
                                    const TauOptions& opts = {});

/// Delta in total-momentum coordinates: Delta(K,p,z) = Delta(K-p, z-eps(p)).
DeterminantEval delta_shifted(const TorusVec& K, const TorusVec& p, double z,
                              const ModelParams& par, const DetOptions& opts = {});

/// Nystrom table of a symmetric integral operator: entry(i,j) =
/// sqrt(w_i w_j) kernel(p_i,p_j), assembled on the upper triangle and
/// mirrored, so symmetry holds exactly.
struct SymmetricKernel {
  std::vector<TorusVec> nodes;
  std::vector<double> weights;
  std::vector<double> values;  // dense row-major, size n*n
  std::size_t n = 0;

  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// How the diagonal Delta factors of the Birman-Schwinger kernel are
/// evaluated: `shared_grid` freezes them on the kernel's own rule (the
/// exact algebra of the direct oracle); `refined` evaluates each to
/// quadrature tolerance.
enum class DeltaEval { shared_grid, refined };

/// Birman-Schwinger kernel at energy z < tau(K):
///   entry(i,j) = sqrt(w_i w_j) v(g)(2pi)^-3
///                Delta^{-1/2}(K,p_i,z) Delta^{-1/2}(K,p_j,z) / (E(K;p_i,p_j)-z).
/// Assembled with the positive sign convention; see eigen_count_N for how
/// the exchange sector picks the counting side.
SymmetricKernel bs_assemble(const TorusVec& K, double z, const ModelParams& par,
                            const GridSpec& grid,
                            DeltaEval delta_eval = DeltaEval::refined,
                            const DetOptions& det = {});

struct CountReport {
  TorusVec K;
  double z = 0.0;
  double mu_level = 1.0;
  int count = 0;
  std::size_t grid_points = 0;
  double margin = 0.0;  // distance from mu_level to the nearest eigenvalue
  bool ambiguous = false;
  std::string note;
};

/// Count eigenvalues of the kernel above mu, with a tie guard band of
/// 1e-8 * spectral radius; ties are flagged, never silently resolved.
CountReport count_above(const SymmetricKernel& kernel, double mu);

/// Exchange symmetry sector of the identical pair.
enum class ExchangeSector { symmetric, antisymmetric };

/// Eigenvalue count N(K,z) below z via the Birman-Schwinger kernel:
/// symmetric sector counts kernel eigenvalues above +1, antisymmetric
/// counts below -1. Defaults to the symmetric sector, which carries the
/// threshold accumulation for every gamma.
CountReport eigen_count_N(const TorusVec& K, double z, const ModelParams& par,
                          const GridSpec& grid,
                          ExchangeSector sector = ExchangeSector::symmetric,
                          DeltaEval delta_eval = DeltaEval::refined,
                          const DetOptions& det = {});

/// Standard counting grid near threshold: radial-log shells around the
/// channel minimizer with inner radius max(1e-4, sqrt|tau - z|/10).
GridSpec make_bs_grid(const ChannelMin& channel, double z, int n_per_axis = 10,
                      int levels = 8, int n_theta = 6, int n_phi = 8);

/// Brute-force oracle: dense diagonalization of the two-variable grid
/// Hamiltonian diag(E(K;p_i,p_j)) - v(V1+V2) restricted to the exchange
/// sector; returns the number of eigenvalues below z. n <= 5.
struct OracleReport {
  int count = 0;
  double margin = 0.0;  // distance from z to the nearest eigenvalue
  std::size_t dim = 0;
};
OracleReport direct_count_oracle(const TorusVec& K, double z,
                                 const ModelParams& par, int n,
                                 ExchangeSector sector = ExchangeSector::symmetric);

/// Explicit small-momentum comparison kernel with a sharp |p| < delta
/// cutoff; beta = K^2/(2 M_gamma) + |z| regularizes the quadratic forms.
SymmetricKernel cutoff_kernel(double delta, const TorusVec& K, double z,
                              const ModelParams& par, const GridSpec& grid);

/// Frobenius norm of (BS kernel - cutoff kernel) on a shared rule; stays
/// bounded as z -> 0- while each term's norm grows.
double hs_difference(const TorusVec& K, double z, double delta,
                     const ModelParams& par, const GridSpec& grid,
                     DeltaEval delta_eval = DeltaEval::refined);

}  // namespace lattice3b

#endif
