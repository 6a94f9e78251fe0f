#include "efimov/specialfn.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "efimov/quadrature.hpp"

namespace efimov {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double euler_gamma = std::numbers::egamma;

// -log(DBL_MIN): beyond this e^{-x} is subnormal.
const double underflow_threshold = -std::log(DBL_MIN);

double wrap_phase(double theta) {
  double r = std::remainder(theta, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

}  // namespace

GammaPhase gamma_phase(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("gamma_phase: beta must be finite and >= 0");
  GammaPhase out;
  out.beta = beta;
  if (beta == 0.0) return out;

  // arg Gamma(1 + i b) = -gamma b + sum_{k>=1} (b/k - atan(b/k)); partial sum to N, then the
  // Euler-Maclaurin tail of f(k) = b/k - atan(b/k) from N + 1 to infinity.
  const int n_terms = 1000 + static_cast<int>(std::ceil(10.0 * beta));
  double sum = 0.0;
  double carry = 0.0;
  for (int k = n_terms; k >= 1; --k) {
    const double q = beta / k;
    const double term = q - std::atan(q) - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  const double n = n_terms;
  const double q = beta / n;
  const double f_n = q - std::atan(q);
  const double df_n = -beta * beta * beta / (n * n * (n * n + beta * beta));
  const double integral = n * std::atan(q) + 0.5 * beta * std::log1p(q * q) - beta;
  const double tail = integral - 0.5 * f_n - df_n / 12.0;

  out.theta_beta = wrap_phase(-euler_gamma * beta + sum + tail);
  const double pb = pi * beta;
  out.abs_sq = pb > 700.0 ? 2.0 * pb * std::exp(-pb) : pb / std::sinh(pb);
  return out;
}

double macdonald_amplitude(double beta) {
  const double pb = pi * beta;
  if (pb > 700.0) return std::sqrt(2.0 * pi / beta) * std::exp(-0.5 * pb);
  return std::sqrt(pi / (beta * std::sinh(pb)));
}

const char* to_string(MacdonaldMethod m) {
  switch (m) {
    case MacdonaldMethod::quadrature: return "quadrature";
    case MacdonaldMethod::small_argument_asymptotic: return "small_argument_asymptotic";
    case MacdonaldMethod::large_argument_asymptotic: return "large_argument_asymptotic";
  }
  return "unknown";
}

MacdonaldValue macdonald_quadrature(double beta, double x) {
  if (!(x > 0.0)) throw DomainError("macdonald: x must be > 0");
  if (!(beta >= 0.0)) throw DomainError("macdonald: beta must be >= 0");
  if (x > underflow_threshold) throw UnderflowError("macdonald: e^{-x} underflows");

  // Scaled integrand e^{-x(cosh t - 1)}; the factor e^{-x} is applied at the end.
  const double t_max = std::acosh(1.0 + 745.0 / x);
  auto integrand = [beta, x](double t) {
    const double sh = std::sinh(0.5 * t);
    const double decay = std::exp(-2.0 * x * sh * sh);
    const double c = std::cos(beta * t) * decay;
    return quad::Vec<2>(c, std::cosh(t) * c);
  };
  const int panels = std::max(4, static_cast<int>(std::ceil(t_max * (1.0 + beta) / 2.0)));
  const auto res = quad::gauss_kronrod<2>(integrand, 0.0, t_max, 1e-13, 1e-14, panels);

  const double scale = std::exp(-x);
  return {scale * res.integral[0], -scale * res.integral[1], MacdonaldMethod::quadrature};
}

MacdonaldValue macdonald_small_z(const GammaPhase& phase, double x) {
  if (!(phase.beta > 0.0)) throw DomainError("macdonald_small_z: beta must be > 0");
  if (!(x > 0.0)) throw DomainError("macdonald_small_z: x must be > 0");
  const double amp = macdonald_amplitude(phase.beta);
  const double arg = phase.beta * std::log(0.5 * x) - phase.theta_beta;
  return {-amp * std::sin(arg), -phase.beta * amp * std::cos(arg) / x,
          MacdonaldMethod::small_argument_asymptotic};
}

MacdonaldValue macdonald_small_z(double beta, double x) {
  if (!(beta > 0.0)) throw DomainError("macdonald_small_z: beta must be > 0");
  return macdonald_small_z(gamma_phase(beta), x);
}

MacdonaldValue macdonald_large_z(double beta, double x) {
  if (!(x > 0.0)) throw DomainError("macdonald: x must be > 0");
  if (x > underflow_threshold) throw UnderflowError("macdonald: e^{-x} underflows");

  // a_k = a_{k-1} (4 nu^2 - (2k-1)^2) / (8k) with nu = i beta; the derivative series
  // follows from differentiating x^{-1/2} e^{-x} sum a_k x^{-k} term by term.
  const double four_nu_sq = -4.0 * beta * beta;
  double a_prev = 1.0;
  double power = 1.0;
  double sum_v = 1.0;
  double sum_d = -1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double a_k = a_prev * (four_nu_sq - odd * odd) / (8.0 * k);
    power /= x;
    const double term_v = a_k * power;
    const double term_d = -(a_k + (k - 0.5) * a_prev) * power;
    if (k > beta + 1.0 && std::abs(term_v) >= last) break;
    sum_v += term_v;
    sum_d += term_d;
    if (std::abs(term_v) < 1e-17 * std::abs(sum_v) && std::abs(term_d) < 1e-17 * std::abs(sum_d)) break;
    last = std::abs(term_v);
    a_prev = a_k;
  }
  const double pref = std::sqrt(pi / (2.0 * x)) * std::exp(-x);
  return {pref * sum_v, pref * sum_d, MacdonaldMethod::large_argument_asymptotic};
}

MacdonaldValue macdonald(const GammaPhase& phase, double x) {
  const double beta = phase.beta;
  if (!(x > 0.0)) throw DomainError("macdonald: x must be > 0");
  if (!(beta >= 0.0)) throw DomainError("macdonald: beta must be >= 0");
  if (beta > 0.0 && x < macdonald_small_crossover(beta)) return macdonald_small_z(phase, x);
  if (x > underflow_threshold) throw UnderflowError("macdonald: e^{-x} underflows");
  if (x > std::max(macdonald_large_crossover, beta * beta)) return macdonald_large_z(beta, x);
  return macdonald_quadrature(beta, x);
}

MacdonaldValue macdonald(double beta, double x) {
  if (!(beta >= 0.0)) throw DomainError("macdonald: beta must be >= 0");
  if (beta > 0.0 && x > 0.0 && x < macdonald_small_crossover(beta))
    return macdonald_small_z(gamma_phase(beta), x);
  GammaPhase phase;
  phase.beta = beta;
  return macdonald(phase, x);
}

}  // namespace efimov
