#include "ghost/polarization.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ghost/error.hpp"

namespace ghost {

using std::numbers::pi;

PolarizerAngle PolarizerAngle::from_radians(double delta) {
  if (!std::isfinite(delta)) throw ParameterError("polarizer angle must be finite");
  double c = std::fmod(delta, pi);  // (-pi, pi)
  if (c <= -pi / 2) c += pi;
  if (c > pi / 2) c -= pi;
  return PolarizerAngle(c);
}

PolarizerAngle PolarizerAngle::from_degrees(double delta_deg) {
  if (!std::isfinite(delta_deg)) throw ParameterError("polarizer angle must be finite");
  return from_radians(delta_deg * pi / 180.0);
}

double PolarizerAngle::degrees() const noexcept { return delta_ * 180.0 / pi; }

PolarizerAngle PolarizerAngle::orthogonal() const { return from_radians(delta_ + pi / 2); }

Visibility::Visibility(double v) : v_(v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("visibility must lie in [0, 1]");
}

TwoQubitPolState::TwoQubitPolState(const Amplitudes& amps) : amps_(amps) {
  const double n = norm_squared();
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-12)
    throw ParameterError("polarization state is not normalized (|psi|^2 = " + std::to_string(n) +
                         ")");
}

TwoQubitPolState TwoQubitPolState::normalized(Amplitudes amps) {
  double n = 0.0;
  for (const auto& a : amps) n += std::norm(a);
  if (!(n > 0.0) || !std::isfinite(n)) throw ParameterError("cannot normalize a null state");
  const double s = 1.0 / std::sqrt(n);
  for (auto& a : amps) a *= s;
  return TwoQubitPolState(amps, Unchecked{});
}

TwoQubitPolState TwoQubitPolState::product(double theta1, double theta2) {
  const double c1 = std::cos(theta1), s1 = std::sin(theta1);
  const double c2 = std::cos(theta2), s2 = std::sin(theta2);
  return normalized({cplx(c1 * c2), cplx(c1 * s2), cplx(s1 * c2), cplx(s1 * s2)});
}

double TwoQubitPolState::norm_squared() const noexcept {
  double n = 0.0;
  for (const auto& a : amps_) n += std::norm(a);
  return n;
}

TwoQubitPolState TwoQubitPolState::with_global_phase(double phase) const {
  const cplx g = std::polar(1.0, phase);
  Amplitudes out = amps_;
  for (auto& a : out) a *= g;
  return TwoQubitPolState(out, Unchecked{});
}

TwoQubitPolState make_bell(BellKind kind) {
  const double r = std::numbers::sqrt2 / 2.0;
  switch (kind) {
    case BellKind::psi_minus:
      return TwoQubitPolState({0.0, r, -r, 0.0});
    case BellKind::psi_plus:
      return TwoQubitPolState({0.0, r, r, 0.0});
    case BellKind::phi_minus:
      return TwoQubitPolState({r, 0.0, 0.0, -r});
    case BellKind::phi_plus:
      return TwoQubitPolState({r, 0.0, 0.0, r});
  }
  throw ParameterError("unknown Bell state");
}

TwoQubitPolState apply_pattern_phase(const TwoQubitPolState& state, double phi) {
  const cplx e = std::polar(1.0, phi);
  auto a = state.amps_;
  a[0] *= e;
  a[1] *= e;
  return TwoQubitPolState(a, TwoQubitPolState::Unchecked{});
}

namespace {

cplx project_at(const TwoQubitPolState& state, double t1, double t2) {
  const double c1 = std::cos(t1), s1 = std::sin(t1);
  const double c2 = std::cos(t2), s2 = std::sin(t2);
  const auto& a = state.amplitudes();
  return c1 * c2 * a[0] + c1 * s2 * a[1] + s1 * c2 * a[2] + s1 * s2 * a[3];
}

}  // namespace

cplx project_linear(const TwoQubitPolState& state, PolarizerAngle d1, PolarizerAngle d2) {
  return project_at(state, d1.radians(), d2.radians());
}

std::array<double, 4> outcome_probabilities(const TwoQubitPolState& state, double theta1,
                                            double theta2) {
  const double o1 = theta1 + pi / 2, o2 = theta2 + pi / 2;
  return {std::norm(project_at(state, theta1, theta2)), std::norm(project_at(state, theta1, o2)),
          std::norm(project_at(state, o1, theta2)), std::norm(project_at(state, o1, o2))};
}

double correlation_E(const TwoQubitPolState& state, double theta1, double theta2,
                     Visibility vis) {
  const auto p = outcome_probabilities(state, theta1, theta2);
  return vis.value() * (p[0] - p[1] - p[2] + p[3]);
}

ChshAngles ChshAngles::standard() {
  return {PolarizerAngle::from_degrees(0.0), PolarizerAngle::from_degrees(45.0),
          PolarizerAngle::from_degrees(22.5), PolarizerAngle::from_degrees(67.5)};
}

double chsh_S(const TwoQubitPolState& state, const ChshAngles& angles, Visibility vis) {
  auto E = [&](PolarizerAngle x, PolarizerAngle y) {
    return correlation_E(state, x.radians(), y.radians(), vis);
  };
  return E(angles.a, angles.b) - E(angles.a, angles.b_prime) + E(angles.a_prime, angles.b) +
         E(angles.a_prime, angles.b_prime);
}

}  // namespace ghost
