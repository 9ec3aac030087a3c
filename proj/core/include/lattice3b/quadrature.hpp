#ifndef LATTICE3B_QUADRATURE_HPP
#define LATTICE3B_QUADRATURE_HPP

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lattice3b/grid.hpp"

namespace lattice3b {

/// Thrown when an integrand returns NaN/Inf at a quadrature node.
struct SingularNodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Integrand = std::function<double(const TorusVec&)>;

/// Fixed-order pairwise (cascade) sum. The reduction tree depends only on
/// the index order, so results are independent of how the values were
/// produced (serial or parallel).
double pairwise_sum(std::span<const double> values);

/// Integrate f over T^3 with the given rule. Node evaluations may run in
/// parallel; the reduction follows the fixed pairwise order.
/// Throws SingularNodeError if f is not finite at some node.
double quadrature(const Integrand& f, const QuadratureRule& rule);
double quadrature(const Integrand& f, const GridSpec& spec);

/// Result of a refinement run.
struct QuadratureEstimate {
  double value = 0.0;
  double error_estimate = 0.0;  // |difference of the two finest level values|
  std::vector<int> levels_used;
  bool converged = false;
};

/// Repeated Richardson elimination over a doubling level sequence.
/// `orders` are the assumed error exponents (err ~ sum c_k n^{-p_k});
/// for the offset midpoint rule applied to integrands with an isolated
/// inverse-square singularity at a cell corner the ladder is 1,3,5,...
/// For smooth integrands the correction terms are negligible and the
/// extrapolated value coincides with the finest level.
double extrapolate_ladder(std::span<const double> level_values,
                          std::span<const int> orders);

/// Refinement controls.
struct RefineOptions {
  int n_start = 16;
  int n_max = 256;                      // per-axis budget
  std::vector<int> orders = {1, 3, 5};  // Richardson ladder
};

/// Double n_per_axis until two successive (extrapolated) values differ by
/// less than tol or the budget is reached. The estimate is returned either
/// way; `converged` records which case occurred.
QuadratureEstimate refine(const Integrand& f, double tol, const GridSpec& base,
                          const RefineOptions& opts = {});

}  // namespace lattice3b

#endif
