#include "ghost/biphoton.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ghost/diagnostics.hpp"
#include "ghost/error.hpp"

namespace ghost {
namespace {

struct Derived {
  double k, S, P, D;
};

Derived derived(const SourceParams& p) {
  const double k = p.wavenumber();
  const double S = p.s1 + p.s2;
  const double P = p.s1 * p.s2;
  const double s2 = p.sigma * p.sigma;
  return {k, S, P, 4.0 * P * P + k * k * s2 * s2 * S * S};
}

void check_params(const SourceParams& p) {
  for (double v : {p.wavelength, p.sigma, p.w, p.s1, p.s2})
    if (!(v > 0.0) || !std::isfinite(v))
      throw ParameterError("source lengths must be positive and finite");
  const double fresnel1 = p.sigma * p.sigma / (p.wavelength * p.s1);
  const double fresnel2 = p.sigma * p.sigma / (p.wavelength * p.s2);
  if (fresnel1 < 1.0 || fresnel2 < 1.0) {
    std::ostringstream os;
    os << "source outside the near-field regime: sigma^2/(lambda s) = " << fresnel1 << ", "
       << fresnel2 << " (need >= 1)";
    throw ParameterError(os.str());
  }
}

void check_finite(cplx v, const char* where) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw NumericError(std::string("non-finite amplitude in ") + where);
}

// Unnormalized one-axis source integral by Gauss-Legendre.
cplx axis_source_integral(const SourceParams& p, double k, double u1, double u2,
                          const QuadratureRule& rule, double half_width) {
  const double inv_sig2 = 1.0 / (p.sigma * p.sigma);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = half_width * rule.nodes[i];
    const double d1 = u1 - x;
    const double d2 = u2 - x;
    const double phase = k * (d1 * d1 / (2.0 * p.s1) + d2 * d2 / (2.0 * p.s2));
    sum += rule.weights[i] * std::exp(-x * x * inv_sig2) * std::polar(1.0, phase);
  }
  return sum * half_width;
}

cplx oracle_at(const SourceParams& p, double x1, double y1, double x2, double y2,
               std::size_t nodes, double half_width) {
  const auto& rule = gauss_legendre(nodes);
  const double k = p.wavenumber();
  const cplx origin = axis_source_integral(p, k, 0.0, 0.0, rule, half_width);
  const cplx ax = axis_source_integral(p, k, x1, x2, rule, half_width) / origin;
  const cplx ay = axis_source_integral(p, k, y1, y2, rule, half_width) / origin;
  return ax * ay;
}

}  // namespace

double SourceParams::wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

void validate(const SourceParams& params) {
  check_params(params);
  const double limit = 50.0 * params.sigma;
  if (params.s1 < limit || params.s2 < limit) {
    std::ostringstream os;
    os << "plane distances should be >= 50 sigma (" << limit << " m); got s1=" << params.s1
       << " s2=" << params.s2;
    warn(os.str());
  }
}

SourceConstants source_constants(const SourceParams& params) {
  check_params(params);
  const auto d = derived(params);
  const double sig2 = params.sigma * params.sigma;
  return {d.D, std::atan(-d.k * d.S * sig2 / (2.0 * d.P)),
          -d.k * d.k * params.w * params.w};
}

cplx axis_amplitude(const SourceParams& p, double u1, double u2) {
  const auto d = derived(p);
  const double q = u1 / p.s1 + u2 / p.s2;
  const double sig2 = p.sigma * p.sigma;
  const double re = -d.k * d.k * d.P * d.P * sig2 * q * q / d.D;
  const double im = d.k * (u1 * u1 / (2.0 * p.s1) + u2 * u2 / (2.0 * p.s2)) -
                    d.k * d.k * d.k * sig2 * sig2 * d.P * d.S * q * q / (2.0 * d.D);
  return std::exp(re) * std::polar(1.0, im);
}

BiphotonAmplitude closed_form_amplitude(const SourceParams& params, double x1, double y1,
                                        double x2, double y2) {
  check_params(params);
  const double limit = 0.05 * std::min(params.s1, params.s2);
  if (std::max({std::abs(x1), std::abs(y1), std::abs(x2), std::abs(y2)}) > limit)
    warn("transverse coordinate beyond the paraxial limit 0.05 min(s1, s2)");
  const cplx v = axis_amplitude(params, x1, x2) * axis_amplitude(params, y1, y2);
  check_finite(v, "closed_form_amplitude");
  return {v};
}

double envelope_magnitude(const SourceParams& params, double x1, double y1, double x2,
                          double y2) {
  check_params(params);
  const auto d = derived(params);
  const double qx = x1 / params.s1 + x2 / params.s2;
  const double qy = y1 / params.s1 + y2 / params.s2;
  const double a = d.k * d.P * params.sigma;
  return std::exp(-a * a * (qx * qx + qy * qy) / d.D);
}

BiphotonAmplitude quadrature_oracle_amplitude(const SourceParams& params, double x1, double y1,
                                              double x2, double y2, const QuadSettings& quad) {
  check_params(params);
  if (quad.nodes < 64) throw ParameterError("oracle quadrature needs >= 64 nodes per axis");
  if (quad.half_width_sigmas < 4.0)
    throw ParameterError("oracle integration half-width must be >= 4 sigma");
  const double half_width = quad.half_width_sigmas * params.sigma;
  const cplx coarse = oracle_at(params, x1, y1, x2, y2, quad.nodes, half_width);
  check_finite(coarse, "quadrature_oracle_amplitude");
  if (!quad.check_convergence) return {coarse};
  const cplx fine = oracle_at(params, x1, y1, x2, y2, 2 * quad.nodes, half_width);
  check_finite(fine, "quadrature_oracle_amplitude");
  const double change = std::abs(fine - coarse);
  if (change > quad.tolerance * std::abs(fine)) {
    std::ostringstream os;
    os << "source-integral quadrature not converged: " << quad.nodes << " -> "
       << 2 * quad.nodes << " nodes changed the result by " << change / std::abs(fine)
       << " (relative), tolerance " << quad.tolerance;
    throw ConvergenceError(os.str());
  }
  return {fine};
}

PlanePoint anticorrelation_locus(const SourceParams& params, double x1, double y1) {
  check_params(params);
  const double r = params.s2 / params.s1;
  return {-x1 * r, -y1 * r};
}

double correlation_width(const SourceParams& params) {
  check_params(params);
  const auto d = derived(params);
  const double a = d.k * d.P * params.sigma;
  return std::sqrt(d.D / (2.0 * a * a));
}

}  // namespace ghost
