#pragma once

#include <span>
#include <string>
#include <vector>

#include "efimov/fast.hpp"
#include "efimov/specialfn.hpp"

namespace efimov {

/// beta = sqrt(mu/nu W(1)^2 - 1/4), the scale exponent of the exterior -(beta^2 + 1/4)/r^2 tail.
struct BetaParam {
  double beta = 0.0;
  double mu_over_nu = 0.0;
};

/// Throws NoEfimovRegime when mu/nu W(1)^2 <= 1/4.
BetaParam beta_param(const ModelParams& params);

/// Mass ratio M/m at which mu/nu W(1)^2 = 1/4.
double critical_mass_ratio();

/// Inner solution of w'' = (v + lambda^2) w on [0, r0] with w(0) = 0, w'(0) = slope.
struct InnerSolution {
  double lambda = 0.0;
  double w_r0 = 0.0;
  double dw_r0 = 0.0;
  double tol = 0.0;
  double slope = 1.0;
};

inline constexpr double default_inner_tol = 1e-11;

InnerSolution integrate_inner(const EffectivePotential& pot, double lambda,
                              double tol = default_inner_tol, double slope = 1.0);

/// (w(r), w'(r)) at each of the ascending radii in [0, r0].
std::vector<std::pair<double, double>> sample_inner(const EffectivePotential& pot, double lambda,
                                                    std::span<const double> radii,
                                                    double tol = default_inner_tol,
                                                    double slope = 1.0);

/**
 * Matching determinant
 *   D(lambda) = [w(r0)/2 - r0 w'(r0)] K_{i beta}(lambda r0) + lambda r0 w(r0) K'_{i beta}(lambda r0),
 * whose zeros are the bound-state momenta. UnderflowError propagates from the Macdonald function.
 */
double matching_determinant(const InnerSolution& inner, const BetaParam& beta, double r0);
double matching_determinant(const InnerSolution& inner, const GammaPhase& phase, double r0);

/// a = w0(r0)/2 - r0 w0'(r0), b = beta w0(r0), alpha = atan2(b, a).
struct MatchingCoefficients {
  double a = 0.0;
  double b = 0.0;
  double alpha_phase = 0.0;
};

MatchingCoefficients compute_ab(const EffectivePotential& pot, const BetaParam& beta,
                                double tol = default_inner_tol, double slope = 1.0);

/// Seeds of the homogeneous equation, lambda_n^0 = (2/r0) e^{(theta_beta - alpha)/beta} e^{-n pi/beta},
/// for n = n_from..n_to. Throws UnderflowError once lambda_n^0 r0 < 1e-290.
std::vector<double> seed_levels(const MatchingCoefficients& coeffs, const BetaParam& beta,
                                double r0, int n_from, int n_to);

struct SpectrumLevel {
  int n = 0;
  double lambda_n = 0.0;  // sqrt(-mu E)
  double seed = 0.0;      // lambda_n^0
  double eta_n = 0.0;     // beta ln(lambda_n / lambda_n^0)
  double energy = 0.0;    // -lambda_n^2 / mu
  double A_n = 0.0;
  double B_n = 0.0;
  bool converged = false;
  std::string diagnostic;  // why an unconverged bracket was rejected
};

struct SpectrumOptions {
  double root_tol = 1e-12;  // relative, in lambda
  double inner_tol = default_inner_tol;
  double inner_slope = 1.0;
  int bracket_samples = 8;
};

struct Spectrum {
  BetaParam beta;
  GammaPhase phase;
  MatchingCoefficients coeffs;
  double lambda_max = 0.0;  // sqrt(-min v): no bound state above it
  int n_first = 0;          // first bracket index that can hold a bound state
  std::vector<SpectrumLevel> levels;
  bool capped = false;      // stopped early because the seeds underflowed

  std::vector<SpectrumLevel> converged() const;
};

/**
 * Solves D(lambda) = 0 bracket by bracket, lambda in [lambda_n^0 e^{-pi/2beta}, lambda_n^0 e^{pi/2beta}],
 * starting from the first bracket below lambda_max, until `n_levels` converged levels are found.
 * Brackets without exactly one sign change are kept in the list flagged as unconverged.
 */
Spectrum solve_spectrum(const EffectivePotential& pot, int n_levels, const SpectrumOptions& options = {});
Spectrum solve_spectrum(const ModelParams& params, int n_levels, const SpectrumOptions& options = {});

/// u_n(r): A_n w(r) on [0, r0], B_n sqrt(r) K_{i beta}(lambda_n r) beyond; unit L^2 norm on r >= 0.
double slow_eigenfunction(const SpectrumLevel& level, const EffectivePotential& pot,
                          const BetaParam& beta, double r, const SpectrumOptions& options = {});

/// Vectorised form of slow_eigenfunction for ascending radii.
std::vector<double> slow_eigenfunction(const SpectrumLevel& level, const EffectivePotential& pot,
                                       const BetaParam& beta, std::span<const double> radii,
                                       const SpectrumOptions& options = {});

/// Relative jumps of u and u' across r0.
struct MatchingJump {
  double value = 0.0;
  double derivative = 0.0;
};

MatchingJump matching_jump(const SpectrumLevel& level, const EffectivePotential& pot,
                           const BetaParam& beta, const SpectrumOptions& options = {});

}  // namespace efimov
