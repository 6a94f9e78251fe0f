#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "efimov/errors.hpp"
#include "efimov/fast.hpp"
#include "efimov/specialfn.hpp"

using namespace efimov;

namespace {

constexpr double w1 = 0.5671432904097838;

// Back-substituted s = sqrt(-nu E) y + theta must solve s e^s = e^theta.
double residual(const ModelParams& p, double y) {
  const double e = fast_eigenvalue(p, y);
  const double th = p.profile(y);
  const double s = std::sqrt(-p.nu * e) * y + th;
  return std::abs(s * std::exp(s) - std::exp(th)) / std::exp(th);
}

}  // namespace

TEST_CASE("cutoff profiles") {
  const auto b = CutoffProfile::bump(1.0);
  CHECK(b(0.0) == 1.0);
  CHECK(b(1.0) == 0.0);
  CHECK(b(2.0) == 0.0);
  CHECK(b(1.0 / std::sqrt(2.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(theta_eval(b, 0.5) == b(0.5));
  CHECK(b.derivative(0.0) == 0.0);

  const auto q = CutoffProfile::quintic(2.0);
  CHECK(q(0.0) == 1.0);
  CHECK(q(2.0) == 0.0);
  CHECK(q(1.0) == doctest::Approx(0.5));
  CHECK(q.derivative(2.0) == doctest::Approx(0.0));

  for (const auto& p : {b, q})
    for (double r : {1e-9, 1e-5, 1e-2, 0.3, 0.9}) {
      CHECK(p.deficit(r) == doctest::Approx(1.0 - p(r)).epsilon(1e-9));
      const double h = 1e-6;
      CHECK(p.derivative(r) == doctest::Approx((p(r + h) - p(r - h)) / (2 * h)).epsilon(1e-6));
    }
  CHECK(b.rescaled(3.0)(1.5 / std::sqrt(2.0) * 2.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(parse_profile_kind("quintic") == ProfileKind::quintic);
  CHECK_THROWS(parse_profile_kind("gauss"));
}

TEST_CASE("tabulated profile") {
  Eigen::VectorXd u(3), th(3), d(3);
  u << 0.0, 0.5, 1.0;
  th << 1.0, 0.5, 0.0;
  d << 0.0, -1.5, 0.0;
  const auto t = CutoffProfile::table(2.0, u, th, d);
  CHECK(t(0.0) == 1.0);
  CHECK(t(1.0) == doctest::Approx(0.5));
  CHECK(t(2.0) == 0.0);
  CHECK(t.derivative(1.0) == doctest::Approx(-0.75));
  th[0] = 0.9;
  CHECK_THROWS(CutoffProfile::table(2.0, u, th, d));
}

TEST_CASE("fast eigenvalue") {
  const auto p = ModelParams::from_reduced(1.0, 1.0);
  for (double y : {1.0, 1.5, 7.0})
    CHECK(fast_eigenvalue(p, y) == doctest::Approx(-w1 * w1 / (y * y)).epsilon(1e-14));
  CHECK(w1 * w1 == doctest::Approx(0.321651).epsilon(1e-6));

  for (const auto& prof : {CutoffProfile::bump(), CutoffProfile::quintic()})
    for (double y = 1e-7; y < 3.0; y *= 1.3) {
      const auto pp = ModelParams::from_reduced(2.0, 0.7, prof);
      CHECK(residual(pp, y) <= 1e-12);
      CHECK(fast_eigenvalue(pp, y) < 0.0);
    }

  // theta'(0) = 0 for the bump, so E(y) -> 0 as y -> 0.
  CHECK(std::abs(fast_eigenvalue(p, 1e-8)) < 1e-15);
  CHECK(std::abs(fast_eigenvalue(p, 1e-4)) < 1e-7);
  CHECK_THROWS_AS(fast_eigenvalue(p, 0.0), DomainError);
}

TEST_CASE("lambert gap matches the direct formula away from the origin") {
  const auto b = CutoffProfile::bump();
  for (double r : {0.1, 0.4, 0.8}) {
    const double th = b(r);
    CHECK(lambert_gap(b, r) == doctest::Approx(lambert_w0(std::exp(th)) - th).epsilon(1e-12));
  }
}

TEST_CASE("effective potential") {
  const auto params = ModelParams::from_mass_ratio(50.0);
  const EffectivePotential v(params);
  const double tail = params.mu / params.nu * w1 * w1;
  CHECK(params.tail_coupling() == doctest::Approx(tail).epsilon(1e-15));
  for (double r : {1.0, 1.3, 10.0, 1e4})
    CHECK(v(r) * r * r == doctest::Approx(-tail).epsilon(1e-13));
  CHECK(v(1.0 - 1e-12) == doctest::Approx(v(1.0)).epsilon(1e-9));
  for (double r : {1e-3, 0.1, 0.5, 0.99})
    CHECK(v(r) == doctest::Approx(params.mu * fast_eigenvalue(params, r)).epsilon(1e-15));

  for (const auto& prof : {CutoffProfile::bump(), CutoffProfile::quintic()}) {
    const EffectivePotential vp(ModelParams::from_mass_ratio(10.0, prof));
    const double eg = vp.epsilon_guard();
    CHECK(eg == doctest::Approx(1e-6));
    // v ~ c r^2 (bump) or c r^4 (quintic) near 0; the guard must continue the smooth shape.
    const int power = prof.kind() == ProfileKind::bump ? 2 : 4;
    const double lo = vp(eg * (1 - 1e-3)) / std::pow(eg * (1 - 1e-3), power);
    const double hi = vp(eg * (1 + 1e-3)) / std::pow(eg * (1 + 1e-3), power);
    CHECK(lo == doctest::Approx(hi).epsilon(1e-8));
    const double below = vp(std::nextafter(eg, 0.0));
    CHECK(below == doctest::Approx(vp(eg)).epsilon(1e-10));
  }
}

TEST_CASE("potential boundedness, sign and profile swap") {
  const auto bump = ModelParams::from_mass_ratio(50.0, CutoffProfile::bump());
  const auto quint = ModelParams::from_mass_ratio(50.0, CutoffProfile::quintic());
  const EffectivePotential vb(bump), vq(quint);
  double sup = 0.0;
  for (double r = 1e-12; r <= 1.0; r *= 1.05) {
    CHECK(vb(r) < 0.0);
    CHECK(vq(r) < 0.0);
    CHECK(std::isfinite(vb(r)));
    sup = std::max(sup, std::abs(vb(r)));
  }
  CHECK(sup < 20.0);
  CHECK(vb(0.0) == 0.0);
  for (double r : {1.0, 2.0, 50.0}) CHECK(vb(r) == vq(r));
}

TEST_CASE("custom inner potential") {
  const auto params = ModelParams::from_mass_ratio(50.0);
  const auto v = EffectivePotential::with_inner(params, [](double) { return -3.0; });
  CHECK(v.is_custom());
  CHECK(v(0.5) == -3.0);
  CHECK(v(2.0) == doctest::Approx(-params.tail_coupling() / 4.0));
}

TEST_CASE("fast eigenfunction") {
  const auto p = ModelParams::from_reduced(1.0, 1.0);
  const double y = 1.5;
  const double k = std::sqrt(-fast_eigenvalue(p, y) * p.nu);
  const Eigen::Vector3d mid(0.7, -0.2, 0.0);
  const Eigen::Vector3d c(0.0, 0.0, y / 2);
  const double g_one = std::exp(-k * (mid - c).norm()) / (mid - c).norm();
  CHECK(fast_eigenfunction(p, y, mid) == doctest::Approx(2.0 * g_one));
  const Eigen::Vector3d a(0.3, 0.1, 0.4);
  CHECK(fast_eigenfunction(p, y, a) == doctest::Approx(fast_eigenfunction(p, y, Eigen::Vector3d(a.x(), a.y(), -a.z()))));

  // Far field: phi |x| e^{k|x|} -> 2 along a mid-plane ray.
  for (double R : {50.0, 200.0}) {
    const Eigen::Vector3d x(R, 0.0, 0.0);
    const double dist = std::hypot(R, y / 2);
    CHECK(fast_eigenfunction(p, y, x) * dist * std::exp(k * dist) == doctest::Approx(2.0).epsilon(1e-12));
  }
  for (double d : {1e-4, 1e-7}) {
    const Eigen::Vector3d x(0.0, 0.0, y / 2 + d);
    CHECK(fast_eigenfunction(p, y, x) * d == doctest::Approx(1.0).epsilon(2 * k * d + 2 * d / y));
  }
  CHECK_THROWS_AS(fast_eigenfunction(p, y, c), SingularityError);
}

TEST_CASE("model parameters") {
  const auto p = ModelParams::from_masses(50.0, 1.0);
  CHECK(p.mu == 50.0);
  CHECK(p.nu == doctest::Approx(4.0 * 50.0 / 101.0));
  CHECK(p.mu / p.nu == doctest::Approx(25.25));
  CHECK(ModelParams::from_mass_ratio(50.0).mu / ModelParams::from_mass_ratio(50.0).nu == doctest::Approx(25.25));
}
