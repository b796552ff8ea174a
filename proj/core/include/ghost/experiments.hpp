#pragma once

#include <optional>
#include <string>

#include "ghost/biphoton.hpp"
#include "ghost/grid.hpp"
#include "ghost/optics.hpp"
#include "ghost/parallel.hpp"
#include "ghost/polarization.hpp"

namespace ghost {

enum class SlitAxis { x, y };

/// Double slit on plane 1. slit_width == 0 means ideal delta slits.
struct DoubleSlit {
  double d = 2e-3;
  SlitAxis axis = SlitAxis::x;
  double slit_width = 0.0;
  double center = 0.0;

  void validate() const;
};

/// Piecewise-constant polarization-sensitive phase object on plane 1. Pixel
/// (i, j) is centred at (origin_x + i*pitch, origin_y + j*pitch).
struct PhasePattern {
  Grid2D<double> phase;     // radians
  Grid2D<double> aperture;  // a_p1 in [0, 1]
  double pitch = 62.5e-6;
  double origin_x = 0.0;
  double origin_y = 0.0;

  /// nx by ny pattern of constant phase centred on the optical axis.
  static PhasePattern uniform(std::size_t nx, std::size_t ny, double pitch, double phi);

  /// Two-region pattern: phase `phi` on the half x >= 0 and 0 elsewhere.
  static PhasePattern binary_halves(std::size_t nx, std::size_t ny, double pitch, double phi);

  void validate() const;
  MapGeometry geometry() const;

  /// Pattern rotated by +90 degrees about the optical axis: a feature at
  /// (x, y) moves to (-y, x). Requires a centred pattern.
  PhasePattern rotated90() const;

  /// Same pattern with `delta` added to every phase value.
  PhasePattern phase_shifted(double delta) const;
};

/// Coincidence probability over plane 2 (or the image plane), normalized to
/// a peak of 1. Physical values are values * scale, where scale is the
/// pre-normalization peak; an identically zero map keeps scale = 0.
struct CoincidenceMap {
  MapGeometry geometry;
  Grid2D<double> values;
  double scale = 0.0;
  std::optional<PolarizerAngle> delta1;
  std::optional<PolarizerAngle> delta2;
  std::string note;

  double value_at(std::size_t ix, std::size_t iy) const { return values(ix, iy); }
  double physical(std::size_t ix, std::size_t iy) const { return values(ix, iy) * scale; }
};

/// Real map that may go negative (background-subtracted data).
struct SignedMap {
  MapGeometry geometry;
  Grid2D<double> values;
  std::string note;
};

/// Normalizes raw |A|^2 values in place and records the peak as the scale.
CoincidenceMap make_normalized_map(MapGeometry geometry, Grid2D<double> raw, std::string note);

/// Fringe period lambda (s1 + s2) / d of the ideal two-slit pattern.
double ghost_fringe_period(const SourceParams& params, const DoubleSlit& slit);

/// Ghost interference |A12(x2, y2)|^2 on plane 2 (no lens). Delta slits use
/// the two-term closed form; finite slits integrate Phi over each opening.
/// Throws SamplingError when the grid has fewer than 8 pixels per fringe
/// period along the slit axis.
CoincidenceMap ghost_interference_map(const SourceParams& params, const DoubleSlit& slit,
                                      const GridSpec& plane_grid);

/// Ghost image P_{d1,d2}(x2, y2) of a phase pattern: the coherent sum over
/// the pattern of a_p1 * Phi_I * <d1 d2| pattern-transformed singlet>.
/// params.s2 must equal lens.u - params.s1. The result does not depend on
/// exec.workers.
CoincidenceMap ghost_image_map(const SourceParams& params, const LensSystem& lens,
                               const PhasePattern& pattern, PolarizerAngle d1, PolarizerAngle d2,
                               const GridSpec& image_grid, const QuadSettings& quad = {},
                               Execution exec = {});

/// Pixel-wise physical(signal) - physical(background).
SignedMap background_subtract(const CoincidenceMap& signal, const CoincidenceMap& background);

/// Divides by the largest absolute value (no-op for an all-zero map).
SignedMap peak_normalized(SignedMap map);

/// Map with coordinates scaled by the relay telescope.
CoincidenceMap through_relay(CoincidenceMap map, const RelayTelescope& relay);

}  // namespace ghost
