#include "efimov/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "efimov/errors.hpp"

namespace efimov::oracle {

namespace {

// Trapezoid rule on [0, t_max] for an integrand that is even in t and negligible at t_max;
// such sums converge geometrically under panel doubling.
template <typename F>
double doubling_trapezoid(F&& f, double t_max, double abs_tol) {
  long n = 16;
  double h = t_max / n;
  double sum = 0.5 * (f(0.0) + f(t_max));
  for (long i = 1; i < n; ++i) sum += f(i * h);
  double estimate = h * sum;
  for (int level = 0; level < 20; ++level) {
    double mid = 0.0;
    for (long i = 0; i < n; ++i) mid += f((i + 0.5) * h);
    sum += mid;
    n *= 2;
    h *= 0.5;
    const double next = h * sum;
    const double change = std::abs(next - estimate);
    estimate = next;
    if (level >= 2 && change <= abs_tol) return estimate;
  }
  throw NonConvergence("quadrature_reference: panel limit reached");
}

double cosh_cutoff(double x) { return std::acosh(std::max(2.0, 40.0 / x)); }

// Inverse iteration with the LDL^T sweep of T - shift I, then the mass fraction of the
// eigenvector in the outer tenth of the box.
double outer_mass_fraction(const Eigen::VectorXd& diag, double off, double shift) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd pivot(n), rhs(n);
  for (int iter = 0; iter < 3; ++iter) {
    pivot[0] = diag[0] - shift;
    rhs[0] = x[0];
    for (Eigen::Index i = 1; i < n; ++i) {
      if (pivot[i - 1] == 0.0) pivot[i - 1] = std::numeric_limits<double>::epsilon() * std::abs(off);
      const double l = off / pivot[i - 1];
      pivot[i] = diag[i] - shift - l * off;
      rhs[i] = x[i] - l * rhs[i - 1];
    }
    if (pivot[n - 1] == 0.0) pivot[n - 1] = std::numeric_limits<double>::epsilon() * std::abs(off);
    x[n - 1] = rhs[n - 1] / pivot[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = (rhs[i] - off * x[i + 1]) / pivot[i];
    x /= x.norm();
  }
  const Eigen::Index start = n - n / 10;
  return x.tail(n - start).squaredNorm();
}

}  // namespace

long sturm_count(const Eigen::VectorXd& diag, double off, double x) {
  const double off_sq = off * off;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  long count = 0;
  double q = 1.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    q = diag[i] - x - (i > 0 ? off_sq / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

FdEigenvalues fd_eigenvalues(const EffectivePotential& pot, const BetaParam& beta,
                             const RadialGrid& grid, int k, bool check_containment) {
  if (!(grid.r_max > 0.0) || grid.n_points < 100)
    throw DomainError("fd_eigenvalues: grid needs r_max > 0 and >= 100 points");
  if (k < 1) throw DomainError("fd_eigenvalues: k must be >= 1");

  const double h = grid.spacing();
  const double r0 = pot.r0();
  const double tail = beta.beta * beta.beta + 0.25;
  Eigen::VectorXd diag(grid.n_points);
  for (long i = 0; i < grid.n_points; ++i) {
    const double r = (i + 1) * h;
    diag[i] = 2.0 / (h * h) + (r <= r0 ? pot(r) : -tail / (r * r));
  }
  const double off = -1.0 / (h * h);

  const long negatives = sturm_count(diag, off, 0.0);
  const long wanted = std::min<long>(k, negatives);
  const double floor = diag.minCoeff() - 2.0 * std::abs(off);

  FdEigenvalues out{grid, {}};
  for (long j = 0; j < wanted; ++j) {
    double lo = floor;
    double hi = 0.0;
    while (hi - lo > 1e-11 * std::max(std::abs(lo), std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (sturm_count(diag, off, mid) >= j + 1)
        hi = mid;
      else
        lo = mid;
    }
    const double e = 0.5 * (lo + hi);
    const double shift = e + 1e-9 * std::abs(e);
    if (check_containment && outer_mass_fraction(diag, off, shift) > 1e-8)
      throw InsufficientDomain("fd_eigenvalues: eigenfunction " + std::to_string(j) +
                               " is not contained in the box; increase r_max");
    out.eigenvalues.push_back(e);
  }
  return out;
}

OracleResult fd_spectrum(const EffectivePotential& pot, const BetaParam& beta, const RadialGrid& grid,
                         int k) {
  auto coarse = fd_eigenvalues(pot, beta, grid, k);
  auto fine = fd_eigenvalues(pot, beta, grid.refined(), k);
  OracleResult out;
  out.grid = grid;
  out.coarse = coarse.eigenvalues;
  const std::size_t n = std::min(coarse.eigenvalues.size(), fine.eigenvalues.size());
  for (std::size_t i = 0; i < n; ++i)
    out.eigenvalues.push_back((4.0 * fine.eigenvalues[i] - coarse.eigenvalues[i]) / 3.0);
  out.richardson_pair = std::move(fine);
  return out;
}

double quadrature_reference_K(double beta, double x, double abs_tol) {
  if (!(x > 1e-8)) throw DomainError("quadrature_reference_K: x must exceed 1e-8");
  if (!(beta >= 0.0)) throw DomainError("quadrature_reference_K: beta must be >= 0");
  return doubling_trapezoid([beta, x](double t) { return std::exp(-x * std::cosh(t)) * std::cos(beta * t); },
                            cosh_cutoff(x), abs_tol);
}

double lambert_reference(double x) {
  const double branch = -1.0 / std::numbers::e;
  if (x < branch - 1e-15) throw DomainError("lambert_reference: x below -1/e");
  if (x <= branch) return -1.0;
  double lo = -1.0;
  double hi = std::max(1.0, std::log1p(x)) + 1.0;
  for (int i = 0; i < 400 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mid * std::exp(mid) - x > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace efimov::oracle
