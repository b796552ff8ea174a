#pragma once

#include <complex>

#include "ghost/quadrature.hpp"

namespace ghost {

using cplx = std::complex<double>;

/// Gaussian pair-creation source observed on two planes, z = -s1 (photon 1)
/// and z = +s2 (photon 2). Lengths in metres.
struct SourceParams {
  double wavelength = 810e-9;
  double sigma = 3e-3;  // transverse Gaussian width
  double w = 1e-3;      // longitudinal width; only enters the unnormalized constants
  double s1 = 1.33;
  double s2 = 1.0;

  double wavenumber() const;

  /// 810 nm, sigma = 3 mm, s1 = 1.33 m, s2 = 1 m.
  static SourceParams paper_defaults() { return {}; }
};

/// Throws ParameterError for non-positive lengths or when
/// sigma^2 / (lambda * s) < 1 on either plane; warns when s < 50 sigma.
void validate(const SourceParams& params);

/// Normalized two-photon position amplitude: every coordinate-independent
/// factor is folded into one constant such that Phi(0,0;0,0) == 1.
struct BiphotonAmplitude {
  cplx value;

  double magnitude() const { return std::abs(value); }
};

/// Coordinate-independent constants of the closed form, kept for inspection.
struct SourceConstants {
  double envelope_denominator;  // 4 s1^2 s2^2 + k^2 sigma^4 (s1+s2)^2, in m^4
  double phase_constant;        // phi with tan(phi) = -k (s1+s2) sigma^2 / (2 s1 s2)
  double log_longitudinal;      // ln of exp(-k^2 w^2); the factor itself underflows
};

SourceConstants source_constants(const SourceParams& params);

/// One transverse axis of the closed form; the full amplitude is the product
/// of the x and y factors. u1 is on plane 1, u2 on plane 2.
cplx axis_amplitude(const SourceParams& params, double u1, double u2);

/// Closed-form amplitude Phi(x1,y1; x2,y2). Warns when a coordinate exceeds
/// 0.05 min(s1, s2).
BiphotonAmplitude closed_form_amplitude(const SourceParams& params, double x1, double y1,
                                        double x2, double y2);

/// |Phi| from the Gaussian envelope alone, i.e.
/// exp(-k^2 (s1 s2 sigma)^2 [(x1/s1 + x2/s2)^2 + (y1/s1 + y2/s2)^2] / D).
double envelope_magnitude(const SourceParams& params, double x1, double y1, double x2,
                          double y2);

/// Independent check of the closed form: Gauss-Legendre integration of the
/// Gaussian source integral over x' and y', normalized by its own value at
/// the origin. Throws ConvergenceError when doubling the node count changes
/// the result by more than quad.tolerance (relative).
BiphotonAmplitude quadrature_oracle_amplitude(const SourceParams& params, double x1, double y1,
                                              double x2, double y2,
                                              const QuadSettings& quad = {});

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Peak of |Phi| over plane 2 for a fixed plane-1 point: (-x1 s2/s1, -y1 s2/s1).
PlanePoint anticorrelation_locus(const SourceParams& params, double x1, double y1);

/// 1/e half-width of |Phi|^2 in the variable x1/s1 + x2/s2 (dimensionless).
double correlation_width(const SourceParams& params);

}  // namespace ghost
