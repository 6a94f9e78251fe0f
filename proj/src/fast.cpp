#include "efimov/fast.hpp"

#include <cmath>
#include <utility>

#include "efimov/errors.hpp"
#include "efimov/specialfn.hpp"

namespace efimov {

namespace {

const double w1 = lambert_w0(1.0);

}  // namespace

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::bump: return "bump";
    case ProfileKind::quintic: return "quintic";
    case ProfileKind::custom_table: return "custom-table";
  }
  return "unknown";
}

ProfileKind parse_profile_kind(const std::string& name) {
  if (name == "bump") return ProfileKind::bump;
  if (name == "quintic") return ProfileKind::quintic;
  if (name == "custom-table") return ProfileKind::custom_table;
  throw DomainError("unknown cutoff profile '" + name + "'");
}

CutoffProfile CutoffProfile::bump(double r0) { return make(ProfileKind::bump, r0); }
CutoffProfile CutoffProfile::quintic(double r0) { return make(ProfileKind::quintic, r0); }

CutoffProfile CutoffProfile::make(ProfileKind kind, double r0) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError("cutoff radius r0 must be > 0");
  if (kind == ProfileKind::custom_table)
    throw DomainError("custom-table profiles are built with CutoffProfile::table");
  return CutoffProfile(kind, r0);
}

CutoffProfile CutoffProfile::table(double r0, Eigen::VectorXd nodes, Eigen::VectorXd values,
                                   Eigen::VectorXd slopes) {
  if (!(r0 > 0.0)) throw DomainError("cutoff radius r0 must be > 0");
  const Eigen::Index n = nodes.size();
  if (n < 2 || values.size() != n || slopes.size() != n)
    throw DomainError("profile table needs >= 2 nodes with matching values and slopes");
  if (nodes[0] != 0.0 || nodes[n - 1] != 1.0)
    throw DomainError("profile table nodes must span [0, 1] in units of r0");
  for (Eigen::Index i = 1; i < n; ++i)
    if (!(nodes[i] > nodes[i - 1])) throw DomainError("profile table nodes must increase");
  if (values[0] != 1.0 || values[n - 1] != 0.0)
    throw DomainError("profile table must satisfy theta(0) = 1 and theta(r0) = 0");
  if (slopes[n - 1] != 0.0) throw DomainError("profile table must be flat at r0 (C^1 cutoff)");
  CutoffProfile p(ProfileKind::custom_table, r0);
  p.nodes_ = std::move(nodes);
  p.values_ = std::move(values);
  p.slopes_ = std::move(slopes);
  return p;
}

double CutoffProfile::operator()(double r) const {
  const double u = r / r0_;
  if (u >= 1.0) return 0.0;
  switch (kind_) {
    case ProfileKind::bump: return std::exp(-u * u / ((1.0 - u) * (1.0 + u)));
    case ProfileKind::quintic: return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    case ProfileKind::custom_table: break;
  }
  const Eigen::Index n = nodes_.size();
  Eigen::Index i = 0;
  while (i + 2 < n && u >= nodes_[i + 1]) ++i;
  const double h = nodes_[i + 1] - nodes_[i];
  const double t = (u - nodes_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
         (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
}

double CutoffProfile::derivative(double r) const {
  const double u = r / r0_;
  if (u >= 1.0) return 0.0;
  switch (kind_) {
    case ProfileKind::bump: {
      const double one_minus = (1.0 - u) * (1.0 + u);
      return (*this)(r) * (-2.0 * u / (one_minus * one_minus)) / r0_;
    }
    case ProfileKind::quintic: return -30.0 * u * u * (1.0 - u) * (1.0 - u) / r0_;
    case ProfileKind::custom_table: break;
  }
  const Eigen::Index n = nodes_.size();
  Eigen::Index i = 0;
  while (i + 2 < n && u >= nodes_[i + 1]) ++i;
  const double h = nodes_[i + 1] - nodes_[i];
  const double t = (u - nodes_[i]) / h;
  const double t2 = t * t;
  const double d = ((6 * t2 - 6 * t) * values_[i] + (-6 * t2 + 6 * t) * values_[i + 1]) / h +
                   (3 * t2 - 4 * t + 1) * slopes_[i] + (3 * t2 - 2 * t) * slopes_[i + 1];
  return d / r0_;
}

double CutoffProfile::deficit(double r) const {
  const double u = r / r0_;
  if (u >= 1.0) return 1.0;
  switch (kind_) {
    case ProfileKind::bump: return -std::expm1(-u * u / ((1.0 - u) * (1.0 + u)));
    case ProfileKind::quintic: return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    case ProfileKind::custom_table: break;
  }
  return 1.0 - (*this)(r);
}

CutoffProfile CutoffProfile::rescaled(double sigma) const {
  if (!(sigma > 0.0)) throw DomainError("rescale factor must be > 0");
  CutoffProfile p = *this;
  p.r0_ = r0_ * sigma;
  return p;
}

ModelParams ModelParams::from_masses(double M, double m, CutoffProfile profile) {
  if (!(M > 0.0) || !(m > 0.0)) throw DomainError("masses must be > 0");
  ModelParams p;
  p.M = M;
  p.m = m;
  p.mu = M;
  p.nu = 4.0 * M * m / (2.0 * M + m);
  p.profile = std::move(profile);
  return p;
}

ModelParams ModelParams::from_mass_ratio(double ratio, CutoffProfile profile) {
  return from_masses(ratio, 1.0, std::move(profile));
}

ModelParams ModelParams::from_reduced(double mu, double nu, CutoffProfile profile) {
  if (!(mu > 0.0) || !(nu > 0.0)) throw DomainError("mu and nu must be > 0");
  ModelParams p;
  p.mu = mu;
  p.nu = nu;
  p.M = mu;
  if (4.0 * mu > nu) p.m = 2.0 * mu * nu / (4.0 * mu - nu);
  p.profile = std::move(profile);
  return p;
}

double ModelParams::tail_coupling() const { return mu / nu * w1 * w1; }

double lambert_gap(const CutoffProfile& profile, double r) {
  const double theta = profile(r);
  const double delta = profile.deficit(r);
  if (delta == 0.0) return 0.0;
  // s = W(e^theta) solves s + ln s = theta; with t = s - 1 this is t + log1p(t) = -delta,
  // refined by Newton so that g = -log1p(t) keeps full relative accuracy as delta -> 0.
  double t = lambert_w0(std::exp(theta)) - 1.0;
  for (int i = 0; i < 3; ++i) {
    const double phi = t + std::log1p(t) + delta;
    t -= phi / (1.0 + 1.0 / (1.0 + t));
  }
  return -std::log1p(t);
}

double fast_eigenvalue(const ModelParams& params, double y) {
  if (!(y > 0.0)) throw DomainError("fast_eigenvalue: y must be > 0");
  const double g = lambert_gap(params.profile, y);
  return -g * g / (params.nu * y * y);
}

double fast_eigenfunction(const ModelParams& params, double y, const Eigen::Vector3d& x) {
  if (!(y > 0.0)) throw DomainError("fast_eigenfunction: y must be > 0");
  const double k = std::sqrt(-fast_eigenvalue(params, y) * params.nu);
  const Eigen::Vector3d half(0.0, 0.0, 0.5 * y);
  const double d_plus = (x + half).norm();
  const double d_minus = (x - half).norm();
  if (d_plus == 0.0 || d_minus == 0.0)
    throw SingularityError("fast_eigenfunction: evaluated at a point-interaction centre");
  return std::exp(-k * d_plus) / d_plus + std::exp(-k * d_minus) / d_minus;
}

EffectivePotential::EffectivePotential(ModelParams params)
    : params_(std::move(params)),
      epsilon_guard_(1e-6 * params_.r0()),
      tail_(params_.tail_coupling()) {}

EffectivePotential EffectivePotential::with_inner(ModelParams params,
                                                  std::function<double(double)> inner) {
  EffectivePotential pot(std::move(params));
  pot.inner_ = std::move(inner);
  return pot;
}

double EffectivePotential::operator()(double r) const {
  if (!(r >= 0.0)) throw DomainError("effective potential: r must be >= 0");
  if (inner_ && r <= r0()) return inner_(r);
  return standard(r);
}

double EffectivePotential::standard(double r) const {
  const double ratio = params_.mu / params_.nu;
  if (r >= r0()) return -tail_ / (r * r);
  if (r >= epsilon_guard_) {
    const double g = lambert_gap(params_.profile, r);
    return -ratio * g * g / (r * r);
  }
  // g(r)/r as the mean of g' over [0, r] (2-point Gauss), with g' = -theta'/(1 + W(e^theta)).
  const auto& profile = params_.profile;
  auto slope = [&profile](double s) {
    return -profile.derivative(s) / (1.0 + lambert_w0(std::exp(profile(s))));
  };
  const double offset = 0.5 / std::sqrt(3.0);
  const double mean = 0.5 * (slope(r * (0.5 - offset)) + slope(r * (0.5 + offset)));
  return -ratio * mean * mean;
}

}  // namespace efimov
