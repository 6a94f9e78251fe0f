#include "efimov/slow.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "efimov/errors.hpp"
#include "efimov/ode.hpp"
#include "efimov/quadrature.hpp"

namespace efimov {

namespace {

constexpr double pi = std::numbers::pi;
const double log_seed_floor = std::log(1e-290);

// Inner ODE in rho = r/r0: w~'' = r0^2 (v(r0 rho) + lambda^2) w~, with w(r) = r0 w~(r/r0).
auto make_inner_stepper(const EffectivePotential& pot, double lambda, double tol, double slope) {
  if (!(lambda >= 0.0)) throw DomainError("integrate_inner: lambda must be >= 0");
  if (!(tol > 1e-14 && tol < 1e-3)) throw DomainError("integrate_inner: tol must lie in (1e-14, 1e-3)");
  if (slope == 0.0 || !std::isfinite(slope)) throw DomainError("integrate_inner: slope must be nonzero");
  const double r0 = pot.r0();
  const double k2 = lambda * r0 * lambda * r0;
  auto rhs = [&pot, r0, k2](double rho, const Eigen::Vector2d& y) {
    return Eigen::Vector2d(y[1], (r0 * r0 * pot(r0 * rho) + k2) * y[0]);
  };
  const double s = std::abs(slope);
  return ode::DormandPrince45(rhs, 0.0, Eigen::Vector2d(0.0, slope), tol, Eigen::Vector2d(s, s));
}

template <typename F>
double refine_root(F& f, double lo, double hi, double f_lo, double f_hi, double xtol) {
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  double ta = f_lo, tb = f_hi;  // true values; fa/fb get Illinois-halved
  int side = 0;
  int stall = 0;
  bool bisect = false;
  for (int iter = 0; iter < 300 && b - a > xtol; ++iter) {
    const double width = b - a;
    double c = bisect ? 0.5 * (a + b) : (a * fb - b * fa) / (fb - fa);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc > 0) == (fb > 0)) {
      b = c;
      fb = tb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = ta = fc;
      if (side == +1) fb *= 0.5;
      side = +1;
    }
    bisect = false;
    if (b - a > 0.5 * width) {
      if (++stall >= 2) {
        bisect = true;
        stall = 0;
      }
    } else {
      stall = 0;
    }
  }
  return std::abs(ta) <= std::abs(tb) ? a : b;
}

double seed_for(const GammaPhase& phase, const MatchingCoefficients& coeffs, double r0, int n) {
  const double log_z = std::log(2.0) + (phase.theta_beta - coeffs.alpha_phase - n * pi) / phase.beta;
  if (log_z < log_seed_floor) throw UnderflowError("seed_levels: lambda_n^0 r0 below 1e-290");
  return std::exp(log_z) / r0;
}

struct Amplitudes {
  double A, B;
};

// Prop.-2 ratio A/B from continuity at r0, then B from the unit L^2 norm of u on r >= 0.
Amplitudes normalise(const EffectivePotential& pot, const GammaPhase& phase, double lambda,
                     const SpectrumOptions& opt) {
  const double r0 = pot.r0();
  const double z0 = lambda * r0;
  const auto inner = integrate_inner(pot, lambda, opt.inner_tol, opt.inner_slope);
  const auto k = macdonald(phase, z0);
  const double sr0 = std::sqrt(r0);

  double ratio;
  const double w_scale = r0 * std::abs(inner.dw_r0);
  if (std::abs(inner.w_r0) > 1e-8 * w_scale) {
    ratio = sr0 * k.value / inner.w_r0;
  } else if (inner.dw_r0 != 0.0) {
    ratio = (k.value + 2.0 * z0 * k.derivative) / (2.0 * sr0 * inner.dw_r0);
  } else {
    throw BracketFailure("normalise: w(r0) and w'(r0) both vanish");
  }

  static const quad::GaussLegendre gl(8);
  constexpr int inner_panels = 16;
  std::vector<double> radii;
  std::vector<double> weights;
  for (int p = 0; p < inner_panels; ++p) {
    const double lo = r0 * p / inner_panels;
    const double half = 0.5 * r0 / inner_panels;
    for (Eigen::Index i = 0; i < gl.nodes.size(); ++i) {
      radii.push_back(lo + half * (1.0 + gl.nodes[i]));
      weights.push_back(half * gl.weights[i]);
    }
  }
  const auto w = sample_inner(pot, lambda, radii, opt.inner_tol, opt.inner_slope);
  double inner_norm = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) inner_norm += weights[i] * w[i].first * w[i].first;

  // Exterior: integral of r K(lambda r)^2 over r > r0 equals lambda^-2 times the integral of
  // z^2 K(z)^2 over s = ln z > ln z0.
  const double s_lo = std::log(std::max(z0, 1e-30));
  const double s_hi = std::log(std::max(z0, 1.0) + 45.0);
  const int panels = std::max(8, static_cast<int>(std::ceil((s_hi - s_lo) / 0.25)));
  const double outer = gl.integrate(
      [&phase](double s) {
        const double z = std::exp(s);
        const double kz = macdonald(phase, z).value;
        return z * z * kz * kz;
      },
      s_lo, s_hi, panels);

  const double weighted = ratio * ratio * inner_norm * lambda * lambda + outer;
  const double B = lambda / std::sqrt(weighted);
  return {ratio * B, B};
}

}  // namespace

BetaParam beta_param(const ModelParams& params) {
  if (!(params.mu > 0.0) || !(params.nu > 0.0)) throw DomainError("beta_param: mu and nu must be > 0");
  const double coupling = params.tail_coupling();
  if (coupling <= 0.25) {
    char msg[256];
    std::snprintf(msg, sizeof msg,
                  "no Efimov regime: mu/nu * W(1)^2 = %.6g <= 1/4 (critical mass ratio M/m = %.6g)",
                  coupling, critical_mass_ratio());
    throw NoEfimovRegime(msg, coupling);
  }
  return {std::sqrt(coupling - 0.25), params.mu / params.nu};
}

double critical_mass_ratio() {
  const double w1 = lambert_w0(1.0);
  return 0.5 * (1.0 / (w1 * w1) - 1.0);
}

InnerSolution integrate_inner(const EffectivePotential& pot, double lambda, double tol, double slope) {
  auto stepper = make_inner_stepper(pot, lambda, tol, slope);
  const Eigen::Vector2d y = stepper.advance_to(1.0);
  return {lambda, pot.r0() * y[0], y[1], tol, slope};
}

std::vector<std::pair<double, double>> sample_inner(const EffectivePotential& pot, double lambda,
                                                    std::span<const double> radii, double tol,
                                                    double slope) {
  auto stepper = make_inner_stepper(pot, lambda, tol, slope);
  const double r0 = pot.r0();
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double r : radii) {
    if (r < 0.0 || r > r0 * (1.0 + 1e-15)) throw DomainError("sample_inner: radius outside [0, r0]");
    const double rho = std::min(r / r0, 1.0);
    if (rho < stepper.t()) throw DomainError("sample_inner: radii must be ascending");
    const Eigen::Vector2d y = stepper.advance_to(rho);
    out.emplace_back(r0 * y[0], y[1]);
  }
  return out;
}

double matching_determinant(const InnerSolution& inner, const GammaPhase& phase, double r0) {
  if (!(inner.lambda > 0.0)) throw DomainError("matching_determinant: lambda must be > 0");
  const double z = inner.lambda * r0;
  const auto k = macdonald(phase, z);
  return (0.5 * inner.w_r0 - r0 * inner.dw_r0) * k.value + z * inner.w_r0 * k.derivative;
}

double matching_determinant(const InnerSolution& inner, const BetaParam& beta, double r0) {
  return matching_determinant(inner, gamma_phase(beta.beta), r0);
}

MatchingCoefficients compute_ab(const EffectivePotential& pot, const BetaParam& beta, double tol,
                                double slope) {
  const auto inner = integrate_inner(pot, 0.0, tol, slope);
  const double r0 = pot.r0();
  MatchingCoefficients c;
  c.a = 0.5 * inner.w_r0 - r0 * inner.dw_r0;
  c.b = beta.beta * inner.w_r0;
  const double scale = 1e-12 * r0 * std::abs(slope);
  if (std::abs(c.a) < scale && std::abs(c.b) < scale)
    throw DegenerateInner("compute_ab: a and b both vanish; inner integration is broken");
  c.alpha_phase = std::atan2(c.b, c.a);
  return c;
}

std::vector<double> seed_levels(const MatchingCoefficients& coeffs, const BetaParam& beta, double r0,
                                int n_from, int n_to) {
  if (n_to < n_from) throw DomainError("seed_levels: n_to < n_from");
  const auto phase = gamma_phase(beta.beta);
  std::vector<double> seeds;
  seeds.reserve(static_cast<std::size_t>(n_to - n_from + 1));
  for (int n = n_from; n <= n_to; ++n) seeds.push_back(seed_for(phase, coeffs, r0, n));
  return seeds;
}

std::vector<SpectrumLevel> Spectrum::converged() const {
  std::vector<SpectrumLevel> out;
  for (const auto& l : levels)
    if (l.converged) out.push_back(l);
  return out;
}

Spectrum solve_spectrum(const EffectivePotential& pot, int n_levels, const SpectrumOptions& opt) {
  if (n_levels < 1) throw DomainError("solve_spectrum: n_levels must be >= 1");
  if (!(opt.root_tol > 0.0)) throw DomainError("solve_spectrum: root_tol must be > 0");
  const auto& params = pot.params();
  const double r0 = pot.r0();

  Spectrum sp;
  sp.beta = beta_param(params);
  sp.phase = gamma_phase(sp.beta.beta);
  sp.coeffs = compute_ab(pot, sp.beta, opt.inner_tol, opt.inner_slope);
  const double beta = sp.beta.beta;

  double v_min = pot(r0);
  constexpr int scan = 4000;
  for (int i = 1; i < scan; ++i) v_min = std::min(v_min, pot(r0 * i / scan));
  sp.lambda_max = std::sqrt(std::max(0.0, -v_min));

  const double seed0 = seed_for(sp.phase, sp.coeffs, r0, 0);
  const double lam_cap = 1.01 * sp.lambda_max;
  sp.n_first = static_cast<int>(std::floor(beta * std::log(seed0 / lam_cap) / pi - 0.5)) + 1;

  const double half_width = 0.5 * pi;
  int found = 0;
  for (int n = sp.n_first; found < n_levels && n < sp.n_first + n_levels + 64; ++n) {
    double seed;
    try {
      seed = seed_for(sp.phase, sp.coeffs, r0, n);
    } catch (const UnderflowError&) {
      sp.capped = true;
      break;
    }
    auto det = [&](double eta) {
      const double lambda = seed * std::exp(eta / beta);
      return matching_determinant(integrate_inner(pot, lambda, opt.inner_tol, opt.inner_slope),
                                  sp.phase, r0);
    };

    SpectrumLevel level;
    level.n = n;
    level.seed = seed;

    // No bound state lies above lambda_max; for small beta the full bracket would reach
    // arguments where K_{i beta} underflows.
    const double eta_hi = std::min(half_width, beta * std::log(lam_cap / seed));
    if (!(eta_hi > -half_width)) continue;
    const int samples = std::max(opt.bracket_samples, 1);
    std::vector<double> eta(samples + 1), d(samples + 1);
    for (int j = 0; j <= samples; ++j) {
      eta[j] = -half_width + (eta_hi + half_width) * j / samples;
      d[j] = det(eta[j]);
    }
    int changes = 0;
    int where = -1;
    for (int j = 0; j < samples; ++j) {
      if ((d[j] < 0.0) != (d[j + 1] < 0.0)) {
        ++changes;
        where = j;
      }
    }
    if (changes != 1) {
      level.diagnostic = "BracketFailure: " + std::to_string(changes) +
                         " sign changes of D in eta bracket (-pi/2, pi/2)";
      sp.levels.push_back(level);
      continue;
    }

    const double eta_root =
        refine_root(det, eta[where], eta[where + 1], d[where], d[where + 1], beta * opt.root_tol);
    if (!(eta_root > -half_width && eta_root < half_width)) {
      level.diagnostic = "BracketFailure: root on the bracket boundary";
      sp.levels.push_back(level);
      continue;
    }
    level.eta_n = eta_root;
    level.lambda_n = seed * std::exp(eta_root / beta);
    level.energy = -level.lambda_n * level.lambda_n / params.mu;
    try {
      const auto amp = normalise(pot, sp.phase, level.lambda_n, opt);
      level.A_n = amp.A;
      level.B_n = amp.B;
      level.converged = true;
      ++found;
    } catch (const BracketFailure& e) {
      level.diagnostic = std::string("BracketFailure: ") + e.what();
    }
    sp.levels.push_back(level);
  }
  return sp;
}

Spectrum solve_spectrum(const ModelParams& params, int n_levels, const SpectrumOptions& options) {
  return solve_spectrum(EffectivePotential(params), n_levels, options);
}

std::vector<double> slow_eigenfunction(const SpectrumLevel& level, const EffectivePotential& pot,
                                       const BetaParam& beta, std::span<const double> radii,
                                       const SpectrumOptions& options) {
  const double r0 = pot.r0();
  const auto phase = gamma_phase(beta.beta);
  std::vector<double> out(radii.size());
  std::vector<double> inner_r;
  for (double r : radii)
    if (r <= r0) inner_r.push_back(r);
  const auto w = sample_inner(pot, level.lambda_n, inner_r, options.inner_tol, options.inner_slope);
  std::size_t k = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (r <= r0) {
      out[i] = level.A_n * w[k++].first;
    } else {
      out[i] = level.B_n * std::sqrt(r) * macdonald(phase, level.lambda_n * r).value;
    }
  }
  return out;
}

double slow_eigenfunction(const SpectrumLevel& level, const EffectivePotential& pot,
                          const BetaParam& beta, double r, const SpectrumOptions& options) {
  if (!(r >= 0.0)) throw DomainError("slow_eigenfunction: r must be >= 0");
  const double radii[1] = {r};
  return slow_eigenfunction(level, pot, beta, std::span<const double>(radii), options)[0];
}

MatchingJump matching_jump(const SpectrumLevel& level, const EffectivePotential& pot,
                           const BetaParam& beta, const SpectrumOptions& options) {
  const double r0 = pot.r0();
  const double sr0 = std::sqrt(r0);
  const auto inner = integrate_inner(pot, level.lambda_n, options.inner_tol, options.inner_slope);
  const auto k = macdonald(gamma_phase(beta.beta), level.lambda_n * r0);
  const double u_in = level.A_n * inner.w_r0;
  const double du_in = level.A_n * inner.dw_r0;
  const double u_out = level.B_n * sr0 * k.value;
  const double du_out = level.B_n * (0.5 * k.value / sr0 + level.lambda_n * sr0 * k.derivative);
  const double scale = std::max({std::abs(u_in), std::abs(u_out), r0 * std::abs(du_in),
                                 r0 * std::abs(du_out), 1e-300});
  return {std::abs(u_in - u_out) / scale, r0 * std::abs(du_in - du_out) / scale};
}

}  // namespace efimov
