#include "ghost/grid.hpp"

#include <cmath>

#include "ghost/error.hpp"

namespace ghost {

bool MapGeometry::matches(const MapGeometry& o) const {
  if (nx != o.nx || ny != o.ny) return false;
  auto close = [](double a, double b, double scale) {
    return std::abs(a - b) <= 1e-9 * std::max(std::abs(scale), 1e-300);
  };
  return close(pitch_x, o.pitch_x, pitch_x) && close(pitch_y, o.pitch_y, pitch_y) &&
         close(origin_x, o.origin_x, pitch_x) && close(origin_y, o.origin_y, pitch_y);
}

MapGeometry MapGeometry::scaled(double factor) const {
  MapGeometry g = *this;
  g.pitch_x *= factor;
  g.pitch_y *= factor;
  g.origin_x *= factor;
  g.origin_y *= factor;
  return g;
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw ParameterError("grid needs at least 2 pixels per axis");
  if (!(extent_x > 0.0) || !(extent_y > 0.0) || !std::isfinite(extent_x) ||
      !std::isfinite(extent_y))
    throw ParameterError("grid extents must be positive and finite");
  if (!std::isfinite(center_x) || !std::isfinite(center_y))
    throw ParameterError("grid centre must be finite");
}

MapGeometry GridSpec::geometry() const {
  validate();
  MapGeometry g;
  g.nx = nx;
  g.ny = ny;
  g.pitch_x = extent_x / static_cast<double>(nx);
  g.pitch_y = extent_y / static_cast<double>(ny);
  g.origin_x = center_x - 0.5 * extent_x + 0.5 * g.pitch_x;
  g.origin_y = center_y - 0.5 * extent_y + 0.5 * g.pitch_y;
  return g;
}

}  // namespace ghost
