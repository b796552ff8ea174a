#include "ghost/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ghost/diagnostics.hpp"
#include "ghost/error.hpp"

namespace ghost {
namespace {

using CMatrix = Eigen::MatrixXcd;

// Fixed work-split sizes. They depend only on the problem, never on the
// worker count, so every output element sees the same arithmetic.
constexpr Eigen::Index kEtaBlock = 128;
constexpr Eigen::Index kRowTile = 32;

std::size_t tile_count(Eigen::Index n, Eigen::Index tile) {
  return static_cast<std::size_t>((n + tile - 1) / tile);
}

// Pixel-integrated one-axis kernel: H(i, c) = integral over pixel c of
// Phi_axis(u1, node_i) du1, by `sub` Gauss-Legendre nodes per pixel.
CMatrix pixel_kernel(const SourceParams& params, const QuadratureRule& plane,
                     std::size_t pixels, double origin, double pitch, std::size_t sub) {
  const auto& gl = gauss_legendre(sub);
  const double h = 0.5 * pitch;
  CMatrix H(static_cast<Eigen::Index>(plane.size()), static_cast<Eigen::Index>(pixels));
  for (std::size_t c = 0; c < pixels; ++c) {
    const double centre = origin + static_cast<double>(c) * pitch;
    for (std::size_t i = 0; i < plane.size(); ++i) {
      cplx acc = 0.0;
      for (std::size_t s = 0; s < sub; ++s)
        acc += (h * gl.weights[s]) * axis_amplitude(params, centre + h * gl.nodes[s], plane.nodes[i]);
      H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = acc;
    }
  }
  return H;
}

// Image-plane propagation matrix G(m, i) = fresnel_kernel(v, x2_m - xi_i).
CMatrix propagation_matrix(double k, double v, const QuadratureRule& plane, std::size_t n,
                           double origin, double pitch) {
  CMatrix G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(plane.size()));
  for (std::size_t m = 0; m < n; ++m) {
    const double x2 = origin + static_cast<double>(m) * pitch;
    for (std::size_t i = 0; i < plane.size(); ++i)
      G(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) =
          fresnel_kernel(v, k, x2 - plane.nodes[i], 0.0);
  }
  return G;
}

Grid2D<double> image_intensity(const SourceParams& params, const LensSystem& lens,
                               const PhasePattern& pattern, PolarizerAngle d1, PolarizerAngle d2,
                               const MapGeometry& image, const AperturePlaneRule& rule,
                               std::size_t sub, Execution exec) {
  const double k = params.wavenumber();
  const auto nxp = pattern.phase.nx();
  const auto nyp = pattern.phase.ny();

  const auto singlet = make_bell(BellKind::psi_minus);
  CMatrix coeff(static_cast<Eigen::Index>(nyp), static_cast<Eigen::Index>(nxp));
  for (std::size_t r = 0; r < nyp; ++r)
    for (std::size_t c = 0; c < nxp; ++c)
      coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          pattern.aperture(c, r) *
          project_linear(apply_pattern_phase(singlet, pattern.phase(c, r)), d1, d2);

  const CMatrix Hx = pixel_kernel(params, rule.xi, nxp, pattern.origin_x, pattern.pitch, sub);
  const CMatrix Hy = pixel_kernel(params, rule.eta, nyp, pattern.origin_y, pattern.pitch, sub);
  const CMatrix T = coeff * Hx.transpose();  // (pattern rows) x (xi nodes)

  const auto nxi = static_cast<Eigen::Index>(rule.xi.size());
  const auto neta = static_cast<Eigen::Index>(rule.eta.size());
  Eigen::VectorXcd wx(nxi), wy(neta);
  for (Eigen::Index i = 0; i < nxi; ++i) {
    const auto u = static_cast<std::size_t>(i);
    wx(i) = rule.xi.weights[u] * lens_phase(lens.f, k, rule.xi.nodes[u], 0.0);
  }
  for (Eigen::Index j = 0; j < neta; ++j) {
    const auto u = static_cast<std::size_t>(j);
    wy(j) = rule.eta.weights[u] * lens_phase(lens.f, k, 0.0, rule.eta.nodes[u]);
  }

  const CMatrix Gx = propagation_matrix(k, lens.v, rule.xi, image.nx, image.origin_x, image.pitch_x);
  const CMatrix Gy = propagation_matrix(k, lens.v, rule.eta, image.ny, image.origin_y, image.pitch_y);
  const auto ny2 = static_cast<Eigen::Index>(image.ny);
  const auto nx2 = static_cast<Eigen::Index>(image.nx);

  CMatrix P = CMatrix::Zero(ny2, nxi);
  CMatrix M(kEtaBlock, nxi);
  for (Eigen::Index j0 = 0; j0 < neta; j0 += kEtaBlock) {
    const Eigen::Index blk = std::min(kEtaBlock, neta - j0);
    parallel_for(tile_count(blk, kRowTile), exec, [&](std::size_t t) {
      const Eigen::Index r0 = static_cast<Eigen::Index>(t) * kRowTile;
      const Eigen::Index rows = std::min(kRowTile, blk - r0);
      M.middleRows(r0, rows).noalias() = Hy.middleRows(j0 + r0, rows) * T;
      for (Eigen::Index r = r0; r < r0 + rows; ++r) {
        const double eta = rule.eta.nodes[static_cast<std::size_t>(j0 + r)];
        for (Eigen::Index i = 0; i < nxi; ++i) {
          const double a = aperture_transmission(lens.aperture, rule.xi.nodes[static_cast<std::size_t>(i)], eta);
          M(r, i) = (a == 0.0) ? cplx(0.0) : M(r, i) * (a * wx(i) * wy(j0 + r));
        }
      }
    });
    const auto Mblk = M.topRows(blk);
    parallel_for(tile_count(ny2, kRowTile), exec, [&](std::size_t t) {
      const Eigen::Index r0 = static_cast<Eigen::Index>(t) * kRowTile;
      const Eigen::Index rows = std::min(kRowTile, ny2 - r0);
      P.middleRows(r0, rows).noalias() += Gy.block(r0, j0, rows, blk) * Mblk;
    });
  }

  CMatrix amp(ny2, nx2);
  parallel_for(tile_count(ny2, kRowTile), exec, [&](std::size_t t) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(t) * kRowTile;
    const Eigen::Index rows = std::min(kRowTile, ny2 - r0);
    amp.middleRows(r0, rows).noalias() = P.middleRows(r0, rows) * Gx.transpose();
  });

  const cplx norm = imaging_normalization(params, lens);
  Grid2D<double> out(image.nx, image.ny);
  for (std::size_t iy = 0; iy < image.ny; ++iy)
    for (std::size_t ix = 0; ix < image.nx; ++ix) {
      const double v = std::norm(amp(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix)) / norm);
      if (!std::isfinite(v)) throw NumericError("non-finite ghost image value");
      out(ix, iy) = v;
    }
  return out;
}

std::string angle_note(PolarizerAngle d1, PolarizerAngle d2) {
  std::ostringstream os;
  os << "delta1=" << d1.degrees() << "deg delta2=" << d2.degrees() << "deg";
  return os.str();
}

}  // namespace

void DoubleSlit::validate() const {
  if (!(d > 0.0) || !std::isfinite(d)) throw ParameterError("slit separation must be positive");
  if (!(slit_width >= 0.0) || !(slit_width < d))
    throw ParameterError("slit width must satisfy 0 <= width < separation");
  if (!std::isfinite(center)) throw ParameterError("slit centre must be finite");
}

PhasePattern PhasePattern::uniform(std::size_t nx, std::size_t ny, double pitch, double phi) {
  PhasePattern p;
  p.phase = Grid2D<double>(nx, ny, phi);
  p.aperture = Grid2D<double>(nx, ny, 1.0);
  p.pitch = pitch;
  p.origin_x = -0.5 * static_cast<double>(nx - 1) * pitch;
  p.origin_y = -0.5 * static_cast<double>(ny - 1) * pitch;
  return p;
}

PhasePattern PhasePattern::binary_halves(std::size_t nx, std::size_t ny, double pitch,
                                         double phi) {
  auto p = uniform(nx, ny, pitch, 0.0);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = nx / 2; i < nx; ++i) p.phase(i, j) = phi;
  return p;
}

void PhasePattern::validate() const {
  if (phase.empty()) throw ParameterError("phase pattern is empty");
  if (!phase.same_shape(aperture))
    throw GridMismatchError("pattern aperture grid does not match the phase grid");
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw ParameterError("pattern pitch must be positive");
  for (double v : phase.flat())
    if (!std::isfinite(v)) throw ParameterError("pattern phase values must be finite");
  for (double a : aperture.flat())
    if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("pattern aperture must lie in [0, 1]");
}

MapGeometry PhasePattern::geometry() const {
  return {phase.nx(), phase.ny(), pitch, pitch, origin_x, origin_y};
}

PhasePattern PhasePattern::rotated90() const {
  const std::size_t nx = phase.nx(), ny = phase.ny();
  PhasePattern r;
  r.phase = Grid2D<double>(ny, nx);
  r.aperture = Grid2D<double>(ny, nx);
  r.pitch = pitch;
  r.origin_x = -(origin_y + static_cast<double>(ny - 1) * pitch);
  r.origin_y = origin_x;
  for (std::size_t jn = 0; jn < nx; ++jn)
    for (std::size_t in = 0; in < ny; ++in) {
      r.phase(in, jn) = phase(jn, ny - 1 - in);
      r.aperture(in, jn) = aperture(jn, ny - 1 - in);
    }
  return r;
}

PhasePattern PhasePattern::phase_shifted(double delta) const {
  PhasePattern p = *this;
  for (double& v : p.phase.flat()) v += delta;
  return p;
}

CoincidenceMap make_normalized_map(MapGeometry geometry, Grid2D<double> raw, std::string note) {
  double peak = 0.0;
  for (double v : raw.flat()) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericError("coincidence values must be finite and >= 0");
    peak = std::max(peak, v);
  }
  if (peak > 0.0)
    for (double& v : raw.flat()) v /= peak;
  CoincidenceMap map;
  map.geometry = geometry;
  map.values = std::move(raw);
  map.scale = peak;
  map.note = std::move(note);
  return map;
}

double ghost_fringe_period(const SourceParams& params, const DoubleSlit& slit) {
  return params.wavelength * (params.s1 + params.s2) / slit.d;
}

CoincidenceMap ghost_interference_map(const SourceParams& params, const DoubleSlit& slit,
                                      const GridSpec& plane_grid) {
  validate(params);
  slit.validate();
  const auto g = plane_grid.geometry();
  const double period = ghost_fringe_period(params, slit);
  const double along_pitch = slit.axis == SlitAxis::x ? g.pitch_x : g.pitch_y;
  if (along_pitch > period / 8.0) {
    std::ostringstream os;
    os << "interference grid too coarse: pitch " << along_pitch << " m gives fewer than 8 pixels"
       << " per fringe period " << period << " m";
    throw SamplingError(os.str());
  }
  const double limit = 0.05 * std::min(params.s1, params.s2);
  const double reach = std::max({std::abs(g.origin_x), std::abs(g.x(g.nx - 1)),
                                 std::abs(g.origin_y), std::abs(g.y(g.ny - 1))});
  if (reach > limit || std::abs(slit.center) + slit.d > limit)
    warn("interference grid extends beyond the paraxial limit 0.05 min(s1, s2)");

  const double pos_a = slit.center + 0.5 * slit.d;
  const double pos_b = slit.center - 0.5 * slit.d;
  const std::size_t n_along = slit.axis == SlitAxis::x ? g.nx : g.ny;
  const std::size_t n_across = slit.axis == SlitAxis::x ? g.ny : g.nx;
  auto along_coord = [&](std::size_t m) { return slit.axis == SlitAxis::x ? g.x(m) : g.y(m); };
  auto across_coord = [&](std::size_t m) { return slit.axis == SlitAxis::x ? g.y(m) : g.x(m); };

  auto along_amplitude = [&](std::size_t nodes) {
    std::vector<cplx> a(n_along);
    for (std::size_t m = 0; m < n_along; ++m) {
      const double u2 = along_coord(m);
      if (slit.slit_width == 0.0) {
        a[m] = (axis_amplitude(params, pos_a, u2) + axis_amplitude(params, pos_b, u2)) /
               std::numbers::sqrt2;
      } else {
        cplx acc = 0.0;
        for (double c : {pos_a, pos_b}) {
          const auto rule = gauss_legendre(nodes, c - 0.5 * slit.slit_width, c + 0.5 * slit.slit_width);
          for (std::size_t s = 0; s < rule.size(); ++s)
            acc += rule.weights[s] * axis_amplitude(params, rule.nodes[s], u2);
        }
        a[m] = acc / (slit.slit_width * std::numbers::sqrt2);
      }
    }
    return a;
  };

  auto along = along_amplitude(32);
  if (slit.slit_width > 0.0) {
    const auto finer = along_amplitude(64);
    double change = 0.0, peak = 0.0;
    for (std::size_t m = 0; m < n_along; ++m) {
      change = std::max(change, std::abs(finer[m] - along[m]));
      peak = std::max(peak, std::abs(finer[m]));
    }
    if (change > 1e-8 * peak) throw ConvergenceError("slit-opening quadrature not converged");
    along = finer;
  }
  std::vector<double> across(n_across);
  for (std::size_t m = 0; m < n_across; ++m)
    across[m] = std::norm(axis_amplitude(params, 0.0, across_coord(m)));

  Grid2D<double> raw(g.nx, g.ny);
  for (std::size_t iy = 0; iy < g.ny; ++iy)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const std::size_t ia = slit.axis == SlitAxis::x ? ix : iy;
      const std::size_t ic = slit.axis == SlitAxis::x ? iy : ix;
      raw(ix, iy) = std::norm(along[ia]) * across[ic];
    }
  std::ostringstream note;
  note << "ghost interference d=" << slit.d << "m axis=" << (slit.axis == SlitAxis::x ? "x" : "y")
       << " slit_width=" << slit.slit_width << "m";
  return make_normalized_map(g, std::move(raw), note.str());
}

CoincidenceMap ghost_image_map(const SourceParams& params, const LensSystem& lens,
                               const PhasePattern& pattern, PolarizerAngle d1, PolarizerAngle d2,
                               const GridSpec& image_grid, const QuadSettings& quad,
                               Execution exec) {
  validate(params);
  validate(lens, true);
  check_lens_plane(params, lens);
  pattern.validate();
  const auto image = image_grid.geometry();
  if (quad.pattern_supersample == 0) throw ParameterError("pattern supersampling must be >= 1");

  const double m = ghost_magnification(params, lens);
  const double back_projected = std::min(image.pitch_x, image.pitch_y) / m;
  const double node_spacing = pattern.pitch / static_cast<double>(quad.pattern_supersample);
  if (node_spacing > back_projected * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "pattern sampled more coarsely (" << node_spacing << " m per node) than the image grid's"
       << " back-projected pitch " << back_projected << " m; raise pattern_supersample";
    throw SamplingError(os.str());
  }

  const auto rule = aperture_plane_rule(params, lens, quad);
  auto raw = image_intensity(params, lens, pattern, d1, d2, image, rule, quad.pattern_supersample,
                             exec);
  if (quad.verify_supersample) {
    auto finer = image_intensity(params, lens, pattern, d1, d2, image, rule,
                                 2 * quad.pattern_supersample, exec);
    double change = 0.0, peak = 0.0;
    for (std::size_t n = 0; n < raw.size(); ++n) {
      change = std::max(change, std::abs(finer.flat()[n] - raw.flat()[n]));
      peak = std::max(peak, finer.flat()[n]);
    }
    if (change > quad.tolerance * peak) {
      std::ostringstream os;
      os << "pattern sum not converged: 2x supersampling changed the map by " << change / peak
         << " of its peak";
      throw ConvergenceError(os.str());
    }
    raw = std::move(finer);
  }
  auto map = make_normalized_map(image, std::move(raw), "ghost image " + angle_note(d1, d2));
  map.delta1 = d1;
  map.delta2 = d2;
  return map;
}

SignedMap background_subtract(const CoincidenceMap& signal, const CoincidenceMap& background) {
  if (!signal.geometry.matches(background.geometry) || !signal.values.same_shape(background.values))
    throw GridMismatchError("signal and background maps are on different grids");
  SignedMap out;
  out.geometry = signal.geometry;
  out.values = Grid2D<double>(signal.values.nx(), signal.values.ny());
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values.flat()[n] = signal.values.flat()[n] * signal.scale -
                           background.values.flat()[n] * background.scale;
  out.note = "background subtracted";
  return out;
}

SignedMap peak_normalized(SignedMap map) {
  double peak = 0.0;
  for (double v : map.values.flat()) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double& v : map.values.flat()) v /= peak;
  return map;
}

CoincidenceMap through_relay(CoincidenceMap map, const RelayTelescope& relay) {
  map.geometry = map.geometry.scaled(relay.scale);
  return map;
}

}  // namespace ghost
