#include "ghost/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ghost/diagnostics.hpp"
#include "ghost/error.hpp"

namespace ghost {
namespace {

// Per-axis lens-plane factor w_i Phi_axis(u1, xi_i) exp(-i k xi_i^2 / 2f).
std::vector<cplx> lens_plane_factors(const SourceParams& params, const LensSystem& lens,
                                     const QuadratureRule& rule, double u1) {
  const double k = params.wavenumber();
  std::vector<cplx> out(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double xi = rule.nodes[i];
    out[i] = rule.weights[i] * axis_amplitude(params, u1, xi) * lens_phase(lens.f, k, xi, 0.0);
  }
  return out;
}

cplx imaging_sum(const SourceParams& params, const LensSystem& lens, const AperturePlaneRule& r,
                 double x1, double y1, double x2, double y2, IntegrationOrder order) {
  const double k = params.wavenumber();
  auto gx = lens_plane_factors(params, lens, r.xi, x1);
  auto gy = lens_plane_factors(params, lens, r.eta, y1);
  for (std::size_t i = 0; i < gx.size(); ++i)
    gx[i] *= fresnel_kernel(lens.v, k, x2 - r.xi.nodes[i], 0.0);
  for (std::size_t j = 0; j < gy.size(); ++j)
    gy[j] *= fresnel_kernel(lens.v, k, 0.0, y2 - r.eta.nodes[j]);

  cplx total = 0.0;
  if (order == IntegrationOrder::xi_outer) {
    for (std::size_t i = 0; i < gx.size(); ++i) {
      cplx inner = 0.0;
      for (std::size_t j = 0; j < gy.size(); ++j)
        inner += aperture_transmission(lens.aperture, r.xi.nodes[i], r.eta.nodes[j]) * gy[j];
      total += gx[i] * inner;
    }
  } else {
    for (std::size_t j = 0; j < gy.size(); ++j) {
      cplx inner = 0.0;
      for (std::size_t i = 0; i < gx.size(); ++i)
        inner += aperture_transmission(lens.aperture, r.xi.nodes[i], r.eta.nodes[j]) * gx[i];
      total += gy[j] * inner;
    }
  }
  return total / imaging_normalization(params, lens);
}

std::vector<cplx> profile_sum(const SourceParams& params, const LensSystem& lens,
                              const AperturePlaneRule& r, double x1, double y1,
                              std::span<const double> x2, double y2) {
  const double k = params.wavenumber();
  const auto gx = lens_plane_factors(params, lens, r.xi, x1);
  auto gy = lens_plane_factors(params, lens, r.eta, y1);
  for (std::size_t j = 0; j < gy.size(); ++j)
    gy[j] *= fresnel_kernel(lens.v, k, 0.0, y2 - r.eta.nodes[j]);

  std::vector<cplx> reduced(gx.size());
  for (std::size_t i = 0; i < gx.size(); ++i) {
    cplx inner = 0.0;
    for (std::size_t j = 0; j < gy.size(); ++j)
      inner += aperture_transmission(lens.aperture, r.xi.nodes[i], r.eta.nodes[j]) * gy[j];
    reduced[i] = gx[i] * inner;
  }
  const cplx norm = imaging_normalization(params, lens);
  std::vector<cplx> out(x2.size());
  for (std::size_t m = 0; m < x2.size(); ++m) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < reduced.size(); ++i)
      s += reduced[i] * fresnel_kernel(lens.v, k, x2[m] - r.xi.nodes[i], 0.0);
    out[m] = s / norm;
  }
  return out;
}

}  // namespace

double aperture_transmission(const Aperture& aperture, double xi, double eta) {
  if (const auto* c = std::get_if<CircularAperture>(&aperture))
    return (xi * xi + eta * eta <= c->radius * c->radius) ? 1.0 : 0.0;
  const auto& s = std::get<SampledAperture>(aperture);
  const auto& g = s.geometry;
  const double fx = std::round((xi - g.origin_x) / g.pitch_x);
  const double fy = std::round((eta - g.origin_y) / g.pitch_y);
  if (fx < 0 || fy < 0 || fx >= static_cast<double>(g.nx) || fy >= static_cast<double>(g.ny))
    return 0.0;
  return s.transmission(static_cast<std::size_t>(fx), static_cast<std::size_t>(fy));
}

double ApertureBounds::radius() const {
  return 0.5 * std::max(xi_max - xi_min, eta_max - eta_min);
}

ApertureBounds aperture_bounds(const Aperture& aperture) {
  if (const auto* c = std::get_if<CircularAperture>(&aperture))
    return {-c->radius, c->radius, -c->radius, c->radius};
  const auto& g = std::get<SampledAperture>(aperture).geometry;
  return {g.origin_x - 0.5 * g.pitch_x, g.x(g.nx - 1) + 0.5 * g.pitch_x,
          g.origin_y - 0.5 * g.pitch_y, g.y(g.ny - 1) + 0.5 * g.pitch_y};
}

LensSystem LensSystem::thin_lens(double f, double u, Aperture aperture) {
  if (!(f > 0.0) || !(u > f)) throw ParameterError("thin lens needs u > f > 0 for a real image");
  LensSystem lens;
  lens.f = f;
  lens.u = u;
  lens.v = u * f / (u - f);
  lens.aperture = std::move(aperture);
  return lens;
}

double LensSystem::imaging_residual() const { return std::abs(1.0 / u + 1.0 / v - 1.0 / f); }

void validate(const LensSystem& lens, bool imaging) {
  for (double d : {lens.f, lens.u, lens.v})
    if (!(d > 0.0) || !std::isfinite(d))
      throw ParameterError("lens distances f, u, v must be positive and finite");
  if (!(lens.u > lens.f)) throw ParameterError("object distance must exceed the focal length");
  if (imaging && !(lens.imaging_residual() < 1e-9)) {
    std::ostringstream os;
    os << "imaging condition violated: |1/u + 1/v - 1/f| = " << lens.imaging_residual()
       << " 1/m";
    throw ParameterError(os.str());
  }
  if (const auto* c = std::get_if<CircularAperture>(&lens.aperture)) {
    if (!(c->radius > 0.0)) throw ParameterError("aperture radius must be positive");
  } else {
    const auto& s = std::get<SampledAperture>(lens.aperture);
    if (s.transmission.empty() || s.transmission.nx() != s.geometry.nx ||
        s.transmission.ny() != s.geometry.ny)
      throw GridMismatchError("sampled aperture grid does not match its geometry");
    if (!(s.geometry.pitch_x > 0.0) || !(s.geometry.pitch_y > 0.0))
      throw ParameterError("sampled aperture pitch must be positive");
    for (double t : s.transmission.flat())
      if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("aperture transmission outside [0, 1]");
  }
}

void check_lens_plane(const SourceParams& params, const LensSystem& lens) {
  const double u = params.s1 + params.s2;
  if (std::abs(u - lens.u) > 1e-9 * lens.u) {
    std::ostringstream os;
    os << "lens must sit on plane 2: s1 + s2 = " << u << " m but u = " << lens.u << " m";
    throw ParameterError(os.str());
  }
}

SourceParams lens_plane_params(SourceParams params, const LensSystem& lens) {
  params.s2 = lens.u - params.s1;
  if (!(params.s2 > 0.0)) throw ParameterError("lens must lie beyond the source: u > s1");
  return params;
}

cplx lens_phase(double f, double k, double xi, double eta) {
  if (!(f > 0.0)) throw ParameterError("focal length must be positive");
  return std::polar(1.0, -k * (xi * xi + eta * eta) / (2.0 * f));
}

cplx fresnel_kernel(double dist, double k, double dx, double dy) {
  if (!(dist > 0.0)) throw ParameterError("propagation distance must be positive");
  return std::polar(1.0, k * (dx * dx + dy * dy) / (2.0 * dist));
}

double fresnel_number(double k, double radius, double dist) {
  return k * radius * radius / (2.0 * std::numbers::pi * dist);
}

double max_aperture_node_spacing(double k, const LensSystem& lens) {
  const double rho = aperture_bounds(lens.aperture).radius();
  return rho / (8.0 * fresnel_number(k, rho, std::min(lens.u, lens.v)));
}

AperturePlaneRule aperture_plane_rule(const SourceParams& params, const LensSystem& lens,
                                      const QuadSettings& quad, double refine) {
  if (quad.panel_order == 0) throw ParameterError("panel order must be positive");
  const double bound = max_aperture_node_spacing(params.wavenumber(), lens);
  double spacing = quad.aperture_node_spacing > 0.0 ? quad.aperture_node_spacing : bound;
  if (spacing > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "aperture undersampled: node spacing " << spacing << " m exceeds the Fresnel-zone bound "
       << bound << " m";
    warn(os.str());
  }
  spacing /= refine;
  const auto b = aperture_bounds(lens.aperture);
  auto make = [&](double lo, double hi) {
    const double span = (hi - lo) / (spacing * static_cast<double>(quad.panel_order));
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(span - 1e-9)));
    return composite_gauss_legendre(panels, quad.panel_order, lo, hi);
  };
  return {make(b.xi_min, b.xi_max), make(b.eta_min, b.eta_max), spacing};
}

cplx imaging_normalization(const SourceParams& params, const LensSystem& lens) {
  const double k = params.wavenumber();
  const double S = params.s1 + params.s2;
  const double P = params.s1 * params.s2;
  const cplx a(1.0 / (params.sigma * params.sigma), -k * S / (2.0 * P));
  const cplx i(0.0, 1.0);
  const cplx beta = -i * k / (2.0 * params.s2) + k * k / (4.0 * a * params.s2 * params.s2) +
                    i * k / (2.0 * lens.f) - i * k / (2.0 * lens.v);
  const cplx one_axis = std::sqrt(std::numbers::pi / beta);
  return one_axis * one_axis;
}

ImagingAmplitude imaging_amplitude(const SourceParams& params, const LensSystem& lens, double x1,
                                   double y1, double x2, double y2, const QuadSettings& quad,
                                   IntegrationOrder order) {
  validate(params);
  validate(lens, true);
  check_lens_plane(params, lens);
  const auto rule = aperture_plane_rule(params, lens, quad);
  const cplx coarse = imaging_sum(params, lens, rule, x1, y1, x2, y2, order);
  if (!std::isfinite(coarse.real()) || !std::isfinite(coarse.imag()))
    throw NumericError("non-finite imaging amplitude");
  if (!quad.check_convergence) return {coarse};
  QuadSettings silent = quad;
  silent.aperture_node_spacing = rule.spacing;
  const auto fine_rule = aperture_plane_rule(params, lens, silent, 2.0);
  const cplx fine = imaging_sum(params, lens, fine_rule, x1, y1, x2, y2, order);
  const double change = std::abs(fine - coarse);
  if (change > quad.tolerance * std::max(1.0, std::abs(fine))) {
    std::ostringstream os;
    os << "lens-plane quadrature not converged: halving the node spacing changed Phi_I by "
       << change;
    throw ConvergenceError(os.str());
  }
  return {fine};
}

std::vector<cplx> imaging_amplitude_profile(const SourceParams& params, const LensSystem& lens,
                                            double x1, double y1, std::span<const double> x2,
                                            double y2, const QuadSettings& quad) {
  validate(params);
  validate(lens, true);
  check_lens_plane(params, lens);
  const auto rule = aperture_plane_rule(params, lens, quad);
  auto coarse = profile_sum(params, lens, rule, x1, y1, x2, y2);
  if (!quad.check_convergence) return coarse;
  QuadSettings silent = quad;
  silent.aperture_node_spacing = rule.spacing;
  const auto fine_rule = aperture_plane_rule(params, lens, silent, 2.0);
  auto fine = profile_sum(params, lens, fine_rule, x1, y1, x2, y2);
  double change = 0.0, scale = 1.0;
  for (std::size_t m = 0; m < fine.size(); ++m) {
    change = std::max(change, std::abs(fine[m] - coarse[m]));
    scale = std::max(scale, std::abs(fine[m]));
  }
  if (change > quad.tolerance * scale) {
    std::ostringstream os;
    os << "lens-plane quadrature not converged along the profile: max change " << change;
    throw ConvergenceError(os.str());
  }
  return fine;
}

double ghost_magnification(const SourceParams& params, const LensSystem& lens) {
  validate(lens, true);
  if (!(params.s1 > 0.0) || !(params.s2 > 0.0))
    throw ParameterError("plane distances must be positive");
  return lens.v / (params.s1 + params.s2);
}

RelayTelescope RelayTelescope::for_total_demagnification(double demagnification, double m) {
  if (!(demagnification > 0.0) || !(m > 0.0))
    throw ParameterError("demagnification and magnification must be positive");
  return {1.0 / (demagnification * m)};
}

}  // namespace ghost
