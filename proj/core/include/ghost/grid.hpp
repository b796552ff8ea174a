#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ghost {

/// Dense row-major 2D array; row index is y, column index is x.
template <typename T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(std::size_t nx, std::size_t ny, T fill = T{}) : nx_(nx), ny_(ny), data_(nx * ny, fill) {}

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t ix, std::size_t iy) { return data_[iy * nx_ + ix]; }
  const T& operator()(std::size_t ix, std::size_t iy) const { return data_[iy * nx_ + ix]; }

  std::span<T> row(std::size_t iy) { return {data_.data() + iy * nx_, nx_}; }
  std::span<const T> row(std::size_t iy) const { return {data_.data() + iy * nx_, nx_}; }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }

  bool same_shape(const Grid2D& other) const { return nx_ == other.nx_ && ny_ == other.ny_; }
  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<T> data_;
};

/// Pixel layout of a sampled plane. Pixel (i, j) is centred at
/// (origin_x + i*pitch_x, origin_y + j*pitch_y).
struct MapGeometry {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double pitch_x = 0.0;
  double pitch_y = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;

  double x(std::size_t i) const { return origin_x + static_cast<double>(i) * pitch_x; }
  double y(std::size_t j) const { return origin_y + static_cast<double>(j) * pitch_y; }

  /// Equal shape and coordinates within a relative 1e-9 of the pitch.
  bool matches(const MapGeometry& other) const;

  /// Coordinates scaled by `factor` (composite relay magnification).
  MapGeometry scaled(double factor) const;
};

/// Output grid request: nx by ny cell-centred pixels covering
/// [center - extent/2, center + extent/2] on each axis.
struct GridSpec {
  std::size_t nx = 2;
  std::size_t ny = 2;
  double extent_x = 1e-3;
  double extent_y = 1e-3;
  double center_x = 0.0;
  double center_y = 0.0;

  /// Throws ParameterError unless nx, ny >= 2 and extents > 0.
  void validate() const;
  MapGeometry geometry() const;
};

}  // namespace ghost
