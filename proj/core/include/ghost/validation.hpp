#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ghost/experiments.hpp"

namespace ghost {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Mean spacing of the fringe maxima along the slit axis, taken on the
/// central row or column. Maxima are refined by parabolic interpolation and
/// the spacing is the least-squares slope of position against index.
/// Returns 0 when fewer than two maxima are found.
double measure_fringe_period(const CoincidenceMap& map, SlitAxis axis);

/// Pearson correlation of two equally sized grids (0 when either is flat).
double normalized_correlation(const Grid2D<double>& a, const Grid2D<double>& b);

/// Self-checks run by `ghostsim validate`: closed form against the
/// quadrature oracle, polarization and CHSH values, fringe period, ghost
/// image identities, magnification, gate count and Monte Carlo determinism.
/// `progress` is called with each result as soon as it is available.
std::vector<CheckResult> run_validation(
    const std::function<void(const CheckResult&)>& progress = {});

}  // namespace ghost
