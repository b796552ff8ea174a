#pragma once

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include "ghost/biphoton.hpp"
#include "ghost/grid.hpp"
#include "ghost/quadrature.hpp"

namespace ghost {

/// Clear circular lens of radius rho (transmission 1 inside, 0 outside).
struct CircularAperture {
  double radius = 25e-3;
};

/// Transmission a_p2(xi, eta) in [0, 1], nearest-pixel lookup, 0 outside the grid.
struct SampledAperture {
  MapGeometry geometry;
  Grid2D<double> transmission;
};

using Aperture = std::variant<CircularAperture, SampledAperture>;

double aperture_transmission(const Aperture& aperture, double xi, double eta);

struct ApertureBounds {
  double xi_min, xi_max, eta_min, eta_max;

  /// Half of the larger side; plays the role of rho in the Fresnel number.
  double radius() const;
};

ApertureBounds aperture_bounds(const Aperture& aperture);

/// Thin imaging lens at distance u from the object plane, image plane at v.
struct LensSystem {
  double f = 1.5;
  double u = 2.83;
  double v = 0.0;
  Aperture aperture = CircularAperture{};

  /// Lens with v chosen so that 1/u + 1/v = 1/f. Requires u > f > 0.
  static LensSystem thin_lens(double f, double u, Aperture aperture = CircularAperture{});

  double imaging_residual() const;  // |1/u + 1/v - 1/f| in 1/m
};

/// Throws ParameterError for non-positive distances, u <= f, transmission
/// outside [0, 1] or, when `imaging` is set, an imaging residual >= 1e-9 1/m.
void validate(const LensSystem& lens, bool imaging);

/// Throws ParameterError unless params.s1 + params.s2 == lens.u (to 1e-9 relative).
void check_lens_plane(const SourceParams& params, const LensSystem& lens);

/// Source parameters with the second plane moved to the lens: s2 = u - s1.
SourceParams lens_plane_params(SourceParams params, const LensSystem& lens);

/// Thin-lens phase exp(-i k (xi^2 + eta^2) / (2 f)).
cplx lens_phase(double f, double k, double xi, double eta);

/// Paraxial propagation phase exp(+i k (dx^2 + dy^2) / (2 dist)).
cplx fresnel_kernel(double dist, double k, double dx, double dy);

double fresnel_number(double k, double radius, double dist);

/// Fresnel-zone sampling bound rho / (8 N_F) with N_F taken at min(u, v).
double max_aperture_node_spacing(double k, const LensSystem& lens);

/// Tensor-product rule over the aperture bounding box.
struct AperturePlaneRule {
  QuadratureRule xi;
  QuadratureRule eta;
  double spacing = 0.0;
};

/// Builds the lens-plane rule from quad.aperture_node_spacing (or the
/// Fresnel-zone bound when 0), divided by `refine`. Warns when the requested
/// spacing exceeds the Fresnel-zone bound.
AperturePlaneRule aperture_plane_rule(const SourceParams& params, const LensSystem& lens,
                                      const QuadSettings& quad, double refine = 1.0);

/// Normalized imaging amplitude Phi_I(x1,y1; x2,y2).
struct ImagingAmplitude {
  cplx value;

  double magnitude() const { return std::abs(value); }
};

/// Value of the unnormalized lens-plane integral at x1 = x2 = 0 for an
/// unbounded aperture (closed-form Gaussian integral). Dividing by it makes
/// |Phi_I(0,0;0,0)| close to 1 for apertures much wider than the source
/// correlation footprint.
cplx imaging_normalization(const SourceParams& params, const LensSystem& lens);

enum class IntegrationOrder { xi_outer, eta_outer };

/// Propagates photon 2 from the lens plane to the image plane: the (xi, eta)
/// integral of Phi(x1,y1; xi,eta) a_p2 lens_phase fresnel_kernel. params.s2
/// must equal lens.u - params.s1. With quad.check_convergence the node
/// spacing is halved once and ConvergenceError is raised when the result
/// moves by more than quad.tolerance (relative to max(|Phi_I|, 1)).
ImagingAmplitude imaging_amplitude(const SourceParams& params, const LensSystem& lens,
                                   double x1, double y1, double x2, double y2,
                                   const QuadSettings& quad = {},
                                   IntegrationOrder order = IntegrationOrder::xi_outer);

/// |Phi_I| evaluated along a line y2 = const for many x2 at the cost of
/// roughly one point evaluation.
std::vector<cplx> imaging_amplitude_profile(const SourceParams& params, const LensSystem& lens,
                                            double x1, double y1, std::span<const double> x2,
                                            double y2, const QuadSettings& quad = {});

/// Ghost-image magnification m = v / (s1 + s2).
double ghost_magnification(const SourceParams& params, const LensSystem& lens);

/// Relay optics after the image plane, reduced to one coordinate scale.
struct RelayTelescope {
  double scale = 1.0;

  /// Scale such that object size / camera image size equals `demagnification`
  /// given the single-lens magnification m.
  static RelayTelescope for_total_demagnification(double demagnification, double m);
};

}  // namespace ghost
