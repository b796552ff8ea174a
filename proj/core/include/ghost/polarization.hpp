#pragma once

#include <array>
#include <complex>

namespace ghost {

using cplx = std::complex<double>;

/// Linear polarizer pass-axis angle, measured from the x-axis. Stored in
/// radians and canonicalized to (-pi/2, pi/2]; a polarizer at delta and at
/// delta + pi is the same physical device.
class PolarizerAngle {
 public:
  PolarizerAngle() = default;

  static PolarizerAngle from_radians(double delta);
  static PolarizerAngle from_degrees(double delta_deg);

  double radians() const noexcept { return delta_; }
  double degrees() const noexcept;

  /// Angle of the orthogonal pass axis.
  PolarizerAngle orthogonal() const;

 private:
  explicit PolarizerAngle(double canonical) : delta_(canonical) {}
  double delta_ = 0.0;
};

/// Scalar contrast of the two-photon polarization correlation, 0 <= V <= 1.
class Visibility {
 public:
  constexpr Visibility() = default;
  explicit Visibility(double v);

  double value() const noexcept { return v_; }

 private:
  double v_ = 1.0;
};

enum class PolBasis : std::size_t { HH = 0, HV = 1, VH = 2, VV = 3 };

/// Pure two-photon polarization state over {HH, HV, VH, VV}; the first letter
/// belongs to photon 1.
class TwoQubitPolState {
 public:
  using Amplitudes = std::array<cplx, 4>;

  /// Throws ParameterError unless the squared magnitudes sum to 1 within 1e-12.
  explicit TwoQubitPolState(const Amplitudes& amps);

  /// Rescales arbitrary non-zero amplitudes to unit norm.
  static TwoQubitPolState normalized(Amplitudes amps);

  static TwoQubitPolState product(double theta1, double theta2);

  const Amplitudes& amplitudes() const noexcept { return amps_; }
  cplx operator[](PolBasis b) const noexcept { return amps_[static_cast<std::size_t>(b)]; }
  double norm_squared() const noexcept;

  TwoQubitPolState with_global_phase(double phase) const;

 private:
  struct Unchecked {};
  TwoQubitPolState(const Amplitudes& amps, Unchecked) : amps_(amps) {}
  friend TwoQubitPolState apply_pattern_phase(const TwoQubitPolState&, double);

  Amplitudes amps_;
};

enum class BellKind { psi_minus, psi_plus, phi_minus, phi_plus };

/// Maximally entangled state with conventional signs, e.g.
/// psi_minus = (|HV> - |VH>)/sqrt(2).
TwoQubitPolState make_bell(BellKind kind);

/// Polarization-selective phase acting on photon 1: |H>_1 -> e^{i phi}|H>_1,
/// |V>_1 unchanged.
TwoQubitPolState apply_pattern_phase(const TwoQubitPolState& state, double phi);

/// <d(delta1)| <d(delta2)| state with |d(delta)> = cos(delta)|H> + sin(delta)|V>.
cplx project_linear(const TwoQubitPolState& state, PolarizerAngle d1, PolarizerAngle d2);

/// Joint probabilities of the four pass/block outcomes, ordered
/// (++, +-, -+, --) where "-" means the orthogonal axis.
std::array<double, 4> outcome_probabilities(const TwoQubitPolState& state, double theta1,
                                            double theta2);

/// Two-polarizer correlation E = V * sum over outcomes of sign * probability.
double correlation_E(const TwoQubitPolState& state, double theta1, double theta2,
                     Visibility vis = Visibility{});

struct ChshAngles {
  PolarizerAngle a, a_prime, b, b_prime;

  /// a = 0, a' = 45 deg, b = 22.5 deg, b' = 67.5 deg.
  static ChshAngles standard();
};

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
double chsh_S(const TwoQubitPolState& state, const ChshAngles& angles,
              Visibility vis = Visibility{});

}  // namespace ghost
