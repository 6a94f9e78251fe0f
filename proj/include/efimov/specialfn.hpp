#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "efimov/errors.hpp"

namespace efimov {

/**
 * Principal branch W0 of the Lambert function, the inverse of w -> w e^w on w >= -1.
 *
 * Halley iteration started from a piecewise guess: branch-point series below -1/4,
 * a log1p-based uniform guess in the middle and the asymptotic log form above e^3.
 * Arguments up to a few ulps below -1/e are clamped onto the branch point.
 */
template <typename Scalar = double>
Scalar lambert_w0(Scalar x) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::log1p;
  using std::sqrt;

  constexpr Scalar e = std::numbers::e_v<Scalar>;
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar branch = -1 / e;

  if (std::isnan(x)) return x;
  if (x < branch) {
    if (branch - x > 8 * eps * abs(branch)) throw DomainError("lambert_w0: argument below -1/e");
    return Scalar(-1);
  }
  if (x == branch) return Scalar(-1);
  if (x == 0) return Scalar(0);
  if (std::isinf(x)) return x;

  Scalar w;
  if (x < Scalar(-0.25)) {
    const Scalar p = sqrt(2 * (e * x + 1));
    w = -1 + p * (1 + p * (Scalar(-1) / 3 + p * Scalar(11) / 72));
  } else if (x < Scalar(20)) {
    const Scalar l = log1p(x);
    w = l * (1 - log1p(l) / (2 + l));
  } else {
    const Scalar l1 = log(x);
    const Scalar l2 = log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int iter = 0; iter < 32; ++iter) {
    const Scalar ew = exp(w);
    const Scalar f = w * ew - x;
    const Scalar wp1 = w + 1;
    if (wp1 == 0) break;
    const Scalar denom = ew * wp1 - (w + 2) * f / (2 * wp1);
    const Scalar dw = f / denom;
    const Scalar w_old = w;
    w -= dw;
    if (w <= -1) w = (w_old - 1) / 2;
    if (abs(dw) <= 2 * eps * (1 + abs(w))) break;
  }
  return w;
}

/// arg and squared modulus of Gamma(1 + i beta).
struct GammaPhase {
  double beta = 0.0;
  double theta_beta = 0.0;  // wrapped into (-pi, pi]
  double abs_sq = 1.0;      // pi beta / sinh(pi beta)
};

GammaPhase gamma_phase(double beta);

/// Leading small-argument amplitude sqrt(pi / (beta sinh(pi beta))), overflow-safe.
double macdonald_amplitude(double beta);

enum class MacdonaldMethod { quadrature, small_argument_asymptotic, large_argument_asymptotic };

const char* to_string(MacdonaldMethod m);

/// K_{i beta}(x) and its derivative with respect to x.
struct MacdonaldValue {
  double value = 0.0;
  double derivative = 0.0;
  MacdonaldMethod method = MacdonaldMethod::quadrature;
};

/// Below this argument the small-z expansion replaces quadrature (beta > 0 only).
inline double macdonald_small_crossover(double beta) { return 1e-6 * (1.0 + beta); }
/// Above this argument the large-z asymptotic series replaces quadrature.
inline constexpr double macdonald_large_crossover = 50.0;

/**
 * K_{i beta}(x) for real beta >= 0 and x > 0, dispatching on x:
 * small-z leading asymptotics below macdonald_small_crossover(beta),
 * adaptive quadrature of the cosh-integral on the middle range,
 * large-z asymptotic series above macdonald_large_crossover.
 *
 * Throws DomainError for x <= 0 or beta < 0, UnderflowError when e^{-x} underflows.
 */
MacdonaldValue macdonald(double beta, double x);

/// As above, reusing a precomputed phase for the small-z branch.
MacdonaldValue macdonald(const GammaPhase& phase, double x);

/// Quadrature path on its own: integral of e^{-x cosh t} cos(beta t) over t >= 0.
MacdonaldValue macdonald_quadrature(double beta, double x);

/// Leading-order small-z value and derivative; error O(x^2).
MacdonaldValue macdonald_small_z(double beta, double x);
MacdonaldValue macdonald_small_z(const GammaPhase& phase, double x);

/// Hankel asymptotic series, truncated at its smallest term.
MacdonaldValue macdonald_large_z(double beta, double x);

}  // namespace efimov
