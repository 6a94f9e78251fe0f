#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "efimov/errors.hpp"

namespace efimov::quad {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N>
struct Result {
  Vec<N> integral;
  Vec<N> abs_integral;  // integral of |f|, the cancellation scale
  Vec<N> error;
  int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <int N>
struct Panel {
  double a, b;
  Vec<N> kronrod, gauss, absval;
};

template <int N, typename F>
Panel<N> kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Panel<N> p{a, b, Vec<N>::Zero(), Vec<N>::Zero(), Vec<N>::Zero()};
  const Vec<N> fc = f(center);
  p.kronrod = kronrod_weights[7] * fc;
  p.gauss = gauss_weights[3] * fc;
  p.absval = kronrod_weights[7] * fc.cwiseAbs();
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    const Vec<N> f1 = f(center - dx);
    const Vec<N> f2 = f(center + dx);
    p.kronrod += kronrod_weights[j] * (f1 + f2);
    p.absval += kronrod_weights[j] * (f1.cwiseAbs() + f2.cwiseAbs());
    if (j % 2 == 1) p.gauss += gauss_weights[j / 2] * (f1 + f2);
  }
  p.kronrod *= half;
  p.gauss *= half;
  p.absval *= std::abs(half);
  return p;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of a vector-valued integrand.
///
/// Component c is converged when its error estimate |K15 - G7| drops below
/// max(rel_tol * |I_c|, cancel_tol * integral of |f_c|). The second term bounds the
/// achievable accuracy when the integrand oscillates and the result is small.
template <int N, typename F>
Result<N> gauss_kronrod(F&& f, double a, double b, double rel_tol, double cancel_tol,
                        int initial_panels = 1, int max_intervals = 4000) {
  std::vector<detail::Panel<N>> panels;
  panels.reserve(static_cast<std::size_t>(std::max(initial_panels, 1)) * 4);
  const int n0 = std::max(initial_panels, 1);
  for (int i = 0; i < n0; ++i) {
    const double lo = a + (b - a) * i / n0;
    const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
    panels.push_back(detail::kronrod15<N>(f, lo, hi));
  }

  Result<N> out;
  while (true) {
    out.integral.setZero();
    out.abs_integral.setZero();
    out.error.setZero();
    for (const auto& p : panels) {
      out.integral += p.kronrod;
      out.abs_integral += p.absval;
      out.error += (p.kronrod - p.gauss).cwiseAbs();
    }
    out.intervals = static_cast<int>(panels.size());

    Vec<N> tol;
    for (int c = 0; c < N; ++c)
      tol[c] = std::max(rel_tol * std::abs(out.integral[c]), cancel_tol * out.abs_integral[c]);
    if ((out.error.array() <= tol.array()).all()) return out;
    if (out.intervals >= max_intervals)
      throw NonConvergence("gauss_kronrod: interval budget exhausted");

    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      const Vec<N> e = (panels[i].kronrod - panels[i].gauss).cwiseAbs();
      double score = 0.0;
      for (int c = 0; c < N; ++c) score = std::max(score, e[c] / std::max(tol[c], 1e-300));
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    const double lo = panels[worst].a;
    const double hi = panels[worst].b;
    const double mid = 0.5 * (lo + hi);
    panels[worst] = detail::kronrod15<N>(f, lo, mid);
    panels.push_back(detail::kronrod15<N>(f, mid, hi));
  }
}

/// n-point Gauss-Legendre rule on [-1, 1] via the Golub-Welsch eigenproblem.
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  explicit GaussLegendre(int n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double off = k / std::sqrt(4.0 * k * k - 1.0);
      jacobi(k, k - 1) = off;
      jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    nodes = eig.eigenvalues();
    weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
  }

  /// Composite rule: `panels` equal sub-intervals of [a, b].
  template <typename F>
  double integrate(F&& f, double a, double b, int panels = 1) const {
    double sum = 0.0;
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double center = a + (p + 0.5) * width;
      for (Eigen::Index i = 0; i < nodes.size(); ++i)
        sum += weights[i] * f(center + 0.5 * width * nodes[i]);
    }
    return 0.5 * width * sum;
  }
};

}  // namespace efimov::quad
