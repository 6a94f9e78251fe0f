#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>

namespace efimov {

enum class ProfileKind { bump, quintic, custom_table };

const char* to_string(ProfileKind kind);
ProfileKind parse_profile_kind(const std::string& name);

/**
 * Short-distance cutoff theta(r): theta(0) = 1, theta(r) = 0 for r >= r0, at least C^1.
 *
 * bump:    exp(1 - 1/(1 - u^2)), u = r/r0 (C-infinity)
 * quintic: 1 - 10u^3 + 15u^4 - 6u^5           (C^2)
 * table:   cubic Hermite through (u_i, theta_i, dtheta/du_i) on [0, 1] (C^1)
 */
class CutoffProfile {
 public:
  static CutoffProfile bump(double r0 = 1.0);
  static CutoffProfile quintic(double r0 = 1.0);
  /// Nodes in units of r0; must start at 0 with value 1 and end at 1 with value 0.
  static CutoffProfile table(double r0, Eigen::VectorXd nodes, Eigen::VectorXd values,
                             Eigen::VectorXd slopes);
  static CutoffProfile make(ProfileKind kind, double r0);

  ProfileKind kind() const { return kind_; }
  double r0() const { return r0_; }

  double operator()(double r) const;
  double derivative(double r) const;
  /// 1 - theta(r), without cancellation as r -> 0.
  double deficit(double r) const;

  /// Same shape with cutoff radius sigma * r0.
  CutoffProfile rescaled(double sigma) const;

 private:
  CutoffProfile(ProfileKind kind, double r0) : kind_(kind), r0_(r0) {}

  ProfileKind kind_;
  double r0_;
  Eigen::VectorXd nodes_, values_, slopes_;
};

inline double theta_eval(const CutoffProfile& profile, double r) { return profile(r); }

/// Physical configuration; hbar = 1, mu = M and nu = 4Mm/(2M + m).
struct ModelParams {
  std::optional<double> M;
  std::optional<double> m;
  double mu = 1.0;
  double nu = 1.0;
  CutoffProfile profile = CutoffProfile::bump();

  static ModelParams from_masses(double M, double m, CutoffProfile profile = CutoffProfile::bump());
  /// M/m with m = 1.
  static ModelParams from_mass_ratio(double ratio, CutoffProfile profile = CutoffProfile::bump());
  static ModelParams from_reduced(double mu, double nu, CutoffProfile profile = CutoffProfile::bump());

  double r0() const { return profile.r0(); }
  /// mu/nu * W(1)^2: the coefficient of the exterior -1/r^2 tail.
  double tail_coupling() const;
};

/// g(r) = W(e^{theta(r)}) - theta(r) = -ln W(e^{theta(r)}), accurate as theta -> 1.
double lambert_gap(const CutoffProfile& profile, double r);

/// Fast eigenvalue E(y) = -g(y)^2 / (nu y^2) of the two-centre point interaction at distance y.
double fast_eigenvalue(const ModelParams& params, double y);

/**
 * Unnormalised fast eigenfunction: G(x + y/2) + G(x - y/2) with G(x) = e^{-k|x|}/|x|,
 * k = sqrt(-E(y) nu). The centres sit at +-(0, 0, y/2).
 */
double fast_eigenfunction(const ModelParams& params, double y, const Eigen::Vector3d& x);

/// Slow-dynamics potential v(r) = mu E(r), immutable and shareable.
class EffectivePotential {
 public:
  explicit EffectivePotential(ModelParams params);

  /// Replaces v on [0, r0] by `inner`; the exterior keeps the universal -c/r^2 tail.
  static EffectivePotential with_inner(ModelParams params, std::function<double(double)> inner);

  double operator()(double r) const;

  const ModelParams& params() const { return params_; }
  double r0() const { return params_.r0(); }
  double epsilon_guard() const { return epsilon_guard_; }
  bool is_custom() const { return static_cast<bool>(inner_); }

 private:
  double standard(double r) const;

  ModelParams params_;
  double epsilon_guard_;
  double tail_;
  std::function<double(double)> inner_;
};

inline EffectivePotential effective_potential(const ModelParams& params) {
  return EffectivePotential(params);
}

}  // namespace efimov
