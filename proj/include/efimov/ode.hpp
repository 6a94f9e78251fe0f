#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>

#include "efimov/errors.hpp"

namespace efimov::ode {

/// Dormand-Prince 5(4) embedded pair with step-size control, advanced in segments.
///
/// The error of each accepted step satisfies |err_i| <= tol * (abs_scale_i + max(|y_i|, |y_new_i|)).
/// Scaling the initial state and abs_scale together reproduces the same step sequence.
template <typename State, typename Rhs>
class DormandPrince45 {
 public:
  DormandPrince45(Rhs rhs, double t0, State y0, double tol, State abs_scale,
                  double initial_step = 1e-2, long max_steps = 1'000'000)
      : rhs_(std::move(rhs)),
        t_(t0),
        y_(std::move(y0)),
        tol_(tol),
        abs_scale_(std::move(abs_scale)),
        h_(initial_step),
        max_steps_(max_steps),
        k1_(rhs_(t_, y_)) {}

  double t() const { return t_; }
  const State& y() const { return y_; }
  long steps() const { return steps_; }

  /// Integrate forward until t == target exactly; returns the state there.
  const State& advance_to(double target) {
    while (t_ < target) {
      const bool last = t_ + h_ >= target;
      const double h = last ? target - t_ : h_;
      State y_new, k7, err;
      step(h, y_new, k7, err);

      double norm = 0.0;
      for (Eigen::Index i = 0; i < y_.size(); ++i) {
        const double sc =
            tol_ * (abs_scale_[i] + std::max(std::abs(y_[i]), std::abs(y_new[i])));
        norm = std::max(norm, std::abs(err[i]) / sc);
      }
      if (!std::isfinite(norm)) norm = 1e10;

      const double factor =
          norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        t_ = last ? target : t_ + h;
        y_ = std::move(y_new);
        k1_ = std::move(k7);
        if (!last || factor < 1.0) h_ = h * factor;
        ++steps_;
      } else {
        h_ = h * factor;
      }
      if (h_ <= 1e-14 * std::max(1.0, std::abs(t_)))
        throw StepSizeUnderflow("DormandPrince45: step size underflow");
      if (steps_ > max_steps_) throw StepSizeUnderflow("DormandPrince45: step budget exhausted");
    }
    return y_;
  }

 private:
  void step(double h, State& y_new, State& k7, State& err) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const State& k1 = k1_;
    const State k2 = rhs_(t_ + c2 * h, State(y_ + h * a21 * k1));
    const State k3 = rhs_(t_ + c3 * h, State(y_ + h * (a31 * k1 + a32 * k2)));
    const State k4 = rhs_(t_ + c4 * h, State(y_ + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 =
        rhs_(t_ + c5 * h, State(y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 =
        rhs_(t_ + h, State(y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    y_new = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = rhs_(t_ + h, y_new);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  }

  Rhs rhs_;
  double t_;
  State y_;
  double tol_;
  State abs_scale_;
  double h_;
  long max_steps_;
  long steps_ = 0;
  State k1_;
};

template <typename State, typename Rhs>
DormandPrince45(Rhs, double, State, double, State, double = 1e-2, long = 1'000'000)
    -> DormandPrince45<State, Rhs>;

}  // namespace efimov::ode
