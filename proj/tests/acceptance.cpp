// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "efimov/cli.hpp"
#include "efimov/errors.hpp"
#include "efimov/fast.hpp"
#include "efimov/oracle.hpp"
#include "efimov/slow.hpp"
#include "efimov/specialfn.hpp"

using namespace efimov;
using std::numbers::pi;

namespace {

constexpr double w1 = 0.5671432904097838;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double time_limit, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0 && secs > time_limit) {
    o.pass = false;
    o.detail += fmt("; exceeded %.0f s", time_limit);
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s [%.2f s] %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::complex<double> log_gamma(std::complex<double> z) {
  std::complex<double> shift = 0.0;
  while (z.real() < 30.0) {
    shift += std::log(z);
    z += 1.0;
  }
  const std::complex<double> iz = 1.0 / z;
  const std::complex<double> iz2 = iz * iz;
  const std::complex<double> series =
      iz * (1.0 / 12 + iz2 * (-1.0 / 360 + iz2 * (1.0 / 1260 + iz2 * (-1.0 / 1680 + iz2 * (1.0 / 1188)))));
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + series - shift;
}

Outcome geometric_law() {
  const auto sp = solve_spectrum(ModelParams::from_mass_ratio(50.0), 6);
  const auto lv = sp.converged();
  if (lv.size() != 6) return {false, "only " + std::to_string(lv.size()) + " levels converged"};
  const double target = std::exp(2 * pi / sp.beta.beta);
  std::vector<double> dev;
  for (int i = 0; i < 5; ++i) dev.push_back(std::abs(lv[i].energy / lv[i + 1].energy - target) / target);
  bool ok = dev[3] < 1e-3 && dev[4] < 1e-3;
  for (int i = 2; i < 5; ++i) ok = ok && dev[i] < dev[i - 1];
  std::string d = "deviations";
  for (double x : dev) d += fmt(" %.3e", x);
  return {ok, d + fmt(", e^{2pi/beta} = %.12f", target)};
}

Outcome oracle_agreement() {
  const auto params = ModelParams::from_mass_ratio(50.0);
  const EffectivePotential pot(params);
  const auto sp = solve_spectrum(pot, 2);
  const auto lv = sp.converged();
  if (lv.size() != 2) return {false, "matched solver returned too few levels"};
  const double r_max = 25.0 / lv[1].lambda_n;
  const oracle::RadialGrid grid{r_max, 200000};
  const auto fd = oracle::fd_spectrum(pot, sp.beta, grid, 2);
  bool ok = fd.eigenvalues.size() == 2 && r_max * lv[1].lambda_n >= 20.0 &&
            fd.richardson_pair && fd.richardson_pair->grid.n_points >= 200000;
  std::string d = fmt("r_max = %.3f,", r_max);
  for (int i = 0; i < 2 && ok; ++i) {
    const double matched = -lv[i].lambda_n * lv[i].lambda_n;
    const double rel = std::abs(fd.eigenvalues[i] - matched) / std::abs(matched);
    ok = ok && rel < 5e-3;
    d += fmt(" rel[%.0f]", i) + fmt(" = %.2e", rel);
  }
  return {ok, d};
}

Outcome constant_potential() {
  const auto params = ModelParams::from_mass_ratio(50.0);
  const double beta = beta_param(params).beta;
  const double r0 = params.r0();
  const double l0sq = (beta * beta + 0.25) / (r0 * r0);
  const double l0 = std::sqrt(l0sq);
  const auto pot = EffectivePotential::with_inner(params, [l0sq](double) { return -l0sq; });
  double worst = 0.0;
  for (int j = 1; j <= 50; ++j) {
    const double lambda = l0 * j / 50.0;
    const double k = std::sqrt(std::max(0.0, l0sq - lambda * lambda));
    const double exact = k > 0.0 ? std::sin(k * r0) / k : r0;
    const auto s = integrate_inner(pot, lambda);
    worst = std::max(worst, std::abs(s.w_r0 - exact) / std::abs(exact));
  }
  return {worst < 1e-9, fmt("max relative error %.2e over 50 lambda", worst)};
}

Outcome fast_residual() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_res = 0.0, worst_tail = 0.0;
  for (const auto kind : {ProfileKind::bump, ProfileKind::quintic}) {
    for (int i = 0; i < 1000; ++i) {
      const double nu = std::pow(10.0, -2.0 + 4.0 * u(rng));
      const double mu = std::pow(10.0, -1.0 + 3.0 * u(rng));
      const double r0 = std::pow(10.0, -1.0 + 2.0 * u(rng));
      const auto params = ModelParams::from_reduced(mu, nu, CutoffProfile::make(kind, r0));
      const double y = r0 * std::pow(10.0, -6.0 + 6.5 * u(rng));
      const double e = fast_eigenvalue(params, y);
      const double th = params.profile(y);
      const double s = std::sqrt(nu * -e) * y + th;
      worst_res = std::max(worst_res, std::abs(s * std::exp(s) - std::exp(th)) / std::exp(th));

      const EffectivePotential v(params);
      const double r = r0 * std::pow(10.0, 3.0 * u(rng));
      const double want = -(mu / nu) * w1 * w1;
      worst_tail = std::max(worst_tail, std::abs(v(r) * r * r - want) / std::abs(want));
    }
  }
  return {worst_res <= 1e-12 && worst_tail <= 1e-13,
          fmt("max residual %.2e", worst_res) + fmt(", max tail error %.2e", worst_tail)};
}

Outcome special_functions() {
  bool ok = true;
  std::string d;
  const double w = lambert_w0(1.0);
  ok = ok && std::abs(w - 0.5671432904) < 1e-10;
  d += fmt("W(1) = %.12f", w);

  double worst_gamma = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double beta = 0.05 * i;
    const double closed = beta == 0.0 ? 1.0 : pi * beta / std::sinh(pi * beta);
    const double stirling = std::exp(2.0 * log_gamma({1.0, beta}).real());
    worst_gamma = std::max({worst_gamma, std::abs(gamma_phase(beta).abs_sq - closed) / closed,
                            std::abs(stirling - closed) / closed});
  }
  ok = ok && worst_gamma < 1e-12;
  d += fmt("; |Gamma|^2 max rel %.2e", worst_gamma);

  // Crossover window around the small-argument switch, relative to the oscillation amplitude.
  double worst_small = 0.0;
  for (double beta : {0.5, 1.0, 2.8056, 5.0}) {
    const double xc = macdonald_small_crossover(beta);
    for (double f = 0.1; f <= 10.0; f *= 1.25) {
      const double x = xc * f;
      const double q = macdonald_quadrature(beta, x).value;
      const double s = macdonald_small_z(beta, x).value;
      worst_small = std::max(worst_small, std::abs(q - s) / macdonald_amplitude(beta));
    }
  }
  ok = ok && worst_small < 1e-6;
  d += fmt("; small-z window max rel %.2e", worst_small);

  auto corrected_error = [](double beta, double z) {
    const double k = macdonald_quadrature(beta, z).value;
    const double lead = std::sqrt(pi / (2 * z)) * std::exp(-z);
    return std::abs(k - lead * (1.0 - (4 * beta * beta + 1) / (8 * z))) / std::abs(k);
  };
  const double large0 = corrected_error(0.0, 10.0);
  ok = ok && large0 < 1e-3;
  d += fmt("; large-z corrected rel at beta=0, z=10: %.2e", large0);
  d += fmt(" (beta=1: %.2e, informational)", corrected_error(1.0, 10.0));
  return {ok, d};
}

Outcome regime_boundary() {
  bool rejects = false;
  try {
    beta_param(ModelParams::from_mass_ratio(1.0));
  } catch (const NoEfimovRegime&) {
    rejects = true;
  }
  const bool accepts = beta_param(ModelParams::from_mass_ratio(2.0)).beta > 0.0;

  cli::RunConfig cfg;
  cfg.command = cli::Command::scan;
  cfg.ratios = {0.5, 1.0, 1.06, 2.0, 10.0, 50.0};
  const auto rows = cli::scan(cfg, cfg.ratios);
  const double crit = critical_mass_ratio();
  bool exact = rows.size() == cfg.ratios.size();
  std::string flags;
  for (const auto& r : rows) {
    exact = exact && r.subcritical == (r.mass_ratio < crit);
    if (!r.subcritical) exact = exact && r.deepest_level.has_value();
    flags += r.subcritical ? " S" : " ok";
  }
  return {rejects && accepts && exact, fmt("critical M/m = %.10f; rows", crit) + flags};
}

Outcome invariance() {
  const auto base_sp = solve_spectrum(ModelParams::from_mass_ratio(50.0), 6);
  const auto base = base_sp.converged();
  if (base.size() != 6) return {false, "base spectrum incomplete"};
  double worst_scale = 0.0;
  for (double sigma : {0.1, 3.0}) {
    const auto lv = solve_spectrum(ModelParams::from_mass_ratio(50.0, CutoffProfile::bump(sigma)), 6).converged();
    if (lv.size() != base.size()) return {false, fmt("scaled spectrum incomplete at sigma = %g", sigma)};
    for (std::size_t i = 0; i < lv.size(); ++i)
      worst_scale = std::max(worst_scale, std::abs(lv[i].lambda_n * sigma - base[i].lambda_n) / base[i].lambda_n);
  }
  double worst_gauge = 0.0;
  for (double slope : {1e-3, -5.0, 1e4}) {
    SpectrumOptions opt;
    opt.inner_slope = slope;
    const auto lv = solve_spectrum(ModelParams::from_mass_ratio(50.0), 6, opt).converged();
    if (lv.size() != base.size()) return {false, "gauge spectrum incomplete"};
    for (std::size_t i = 0; i < lv.size(); ++i)
      worst_gauge = std::max(worst_gauge, std::abs(lv[i].lambda_n - base[i].lambda_n) / base[i].lambda_n);
  }
  const EffectivePotential pot(ModelParams::from_mass_ratio(50.0));
  double worst_jump = 0.0;
  for (const auto& l : base) {
    const auto j = matching_jump(l, pot, base_sp.beta);
    worst_jump = std::max({worst_jump, j.value, j.derivative});
  }
  return {worst_scale < 1e-10 && worst_gauge < 1e-10 && worst_jump < 1e-9,
          fmt("scaling %.2e", worst_scale) + fmt(", slope gauge %.2e", worst_gauge) +
              fmt(", C1 jump %.2e", worst_jump)};
}

}  // namespace

int main() {
  criterion(1, "geometric law at M/m = 50", 10.0, geometric_law);
  criterion(2, "oracle agreement of the two shallowest levels", 60.0, oracle_agreement);
  criterion(3, "constant inner potential closed form", 0.0, constant_potential);
  criterion(4, "fast-dynamics residual and exterior tail", 0.0, fast_residual);
  criterion(5, "special-function gates", 0.0, special_functions);
  criterion(6, "regime boundary", 0.0, regime_boundary);
  criterion(7, "invariance suite", 0.0, invariance);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
