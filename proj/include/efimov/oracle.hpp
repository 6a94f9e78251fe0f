#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "efimov/fast.hpp"
#include "efimov/slow.hpp"

namespace efimov::oracle {

/// Uniform grid r_i = i h, i = 1..n_points, h = r_max/(n_points + 1); Dirichlet at 0 and r_max.
struct RadialGrid {
  double r_max = 0.0;
  long n_points = 0;

  double spacing() const { return r_max / static_cast<double>(n_points + 1); }
  /// Grid with half the spacing over the same box.
  RadialGrid refined() const { return {r_max, 2 * n_points + 1}; }
};

struct FdEigenvalues {
  RadialGrid grid;
  std::vector<double> eigenvalues;  // -lambda^2 (= mu E), ascending
};

struct OracleResult {
  std::vector<double> eigenvalues;  // ascending; Richardson-extrapolated when a pair is present
  RadialGrid grid;
  std::vector<double> coarse;       // eigenvalues on `grid`
  std::optional<FdEigenvalues> richardson_pair;
};

/**
 * Lowest k negative eigenvalues of the central-difference discretisation of -d^2/dr^2 + v_eff,
 * v_eff = v on (0, r0] and -(beta^2 + 1/4)/r^2 beyond, by Sturm-sequence bisection.
 * Throws InsufficientDomain when an eigenvector keeps more than 1e-8 of its mass in the
 * outer tenth of the box, unless check_containment is false (genuine box problems).
 */
FdEigenvalues fd_eigenvalues(const EffectivePotential& pot, const BetaParam& beta,
                             const RadialGrid& grid, int k, bool check_containment = true);

/// fd_eigenvalues on `grid` and on grid.refined(), combined as (4 E(h/2) - E(h)) / 3.
OracleResult fd_spectrum(const EffectivePotential& pot, const BetaParam& beta,
                         const RadialGrid& grid, int k);

/// Number of eigenvalues of the symmetric tridiagonal (diag, constant off-diagonal) below x.
long sturm_count(const Eigen::VectorXd& diag, double off, double x);

/// Independent reference for K_{i beta}(x): trapezoid rule on the cosh-integral with
/// panel doubling until successive sums agree to abs_tol. Requires x > 1e-8.
double quadrature_reference_K(double beta, double x, double abs_tol = 1e-13);

/// Bisection for W0 on [-1, max(1, ln(1+x)) + 1] to 1e-13.
double lambert_reference(double x);

}  // namespace efimov::oracle
