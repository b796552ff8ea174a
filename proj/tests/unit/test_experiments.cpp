#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ghost/diagnostics.hpp"
#include "ghost/error.hpp"
#include "ghost/experiments.hpp"
#include "oracles.hpp"

using namespace ghost;
constexpr double pi = std::numbers::pi;

namespace {

const auto kLens = LensSystem::thin_lens(1.5, 2.83);

SourceParams imaging_source() { return lens_plane_params(SourceParams::paper_defaults(), kLens); }

PolarizerAngle deg(double d) { return PolarizerAngle::from_degrees(d); }

double max_physical(const CoincidenceMap& m) {
  double v = 0;
  for (double x : m.values.flat()) v = std::max(v, x * m.scale);
  return v;
}

// Small pattern, grid covering its magnified image.
GridSpec image_grid_for(std::size_t n, std::size_t pixels, double pitch) {
  const double ext = (1.5 / 1.33) * static_cast<double>(n) * pitch;
  return {pixels, pixels, ext, ext, 0, 0};
}

}  // namespace

TEST(Interference, FringePeriodMatchesPhaseDifferenceOracle) {
  const auto p = SourceParams::paper_defaults();
  const DoubleSlit slit;  // d = 2 mm along x
  const auto map = ghost_interference_map(p, slit, GridSpec{512, 128, 6e-3, 2e-3, 0, 0});
  const double expected = 2 * pi * (p.s1 + p.s2) / (p.wavenumber() * slit.d);
  EXPECT_NEAR(ghost_fringe_period(p, slit), expected, 1e-15);
  std::vector<double> row(map.geometry.nx);
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = map.values(i, 64);
  const auto peaks = oracle::maxima(row, map.geometry.origin_x, map.geometry.pitch_x);
  ASSERT_GE(peaks.size(), 4u);
  const double mean = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
  EXPECT_NEAR(mean, expected, 0.02 * expected);
}

TEST(Interference, AmplitudeIsTheTwoSlitSuperposition) {
  const auto p = SourceParams::paper_defaults();
  const oracle::Source o;
  const GridSpec g{64, 8, 4e-3, 1e-3, 0, 0};
  const auto map = ghost_interference_map(p, DoubleSlit{}, g);
  const auto geo = g.geometry();
  double peak = 0;
  Grid2D<double> ref(64, 8);
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t i = 0; i < 64; ++i) {
      const cplx a = oracle::amplitude(o, 1e-3, 0, geo.x(i), geo.y(j)) +
                     oracle::amplitude(o, -1e-3, 0, geo.x(i), geo.y(j));
      ref(i, j) = std::norm(a);
      peak = std::max(peak, ref(i, j));
    }
  for (std::size_t n = 0; n < ref.size(); ++n)
    EXPECT_NEAR(map.values.flat()[n], ref.flat()[n] / peak, 1e-10);
}

TEST(Interference, OrientationFollowsSlitAxis) {
  const auto p = SourceParams::paper_defaults();
  DoubleSlit sx, sy;
  sy.axis = SlitAxis::y;
  const auto mx = ghost_interference_map(p, sx, GridSpec{128, 32, 6e-3, 2e-3, 0, 0});
  const auto my = ghost_interference_map(p, sy, GridSpec{32, 128, 2e-3, 6e-3, 0, 0});
  for (std::size_t j = 0; j < 32; ++j)
    for (std::size_t i = 0; i < 128; ++i) EXPECT_EQ(mx.values(i, j), my.values(j, i));
  // fringes only along the slit axis
  std::vector<double> across(32);
  for (std::size_t j = 0; j < 32; ++j) across[j] = mx.values(64, j);
  EXPECT_LE(oracle::maxima(across, 0, 1).size(), 1u);
}

TEST(Interference, CoarseGridIsRejected) {
  EXPECT_THROW(ghost_interference_map(SourceParams{}, DoubleSlit{}, GridSpec{40, 8, 6e-3, 2e-3, 0, 0}),
               SamplingError);
}

TEST(Interference, FiniteSlitsLowerTheEnvelopeButKeepThePeriod) {
  const auto p = SourceParams::paper_defaults();
  DoubleSlit slit;
  slit.slit_width = 0.3e-3;
  const auto map = ghost_interference_map(p, slit, GridSpec{512, 16, 6e-3, 1e-3, 0, 0});
  std::vector<double> row(512);
  for (std::size_t i = 0; i < 512; ++i) row[i] = map.values(i, 8);
  const auto peaks = oracle::maxima(row, map.geometry.origin_x, map.geometry.pitch_x);
  ASSERT_GE(peaks.size(), 4u);
  const double mean = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
  EXPECT_NEAR(mean, ghost_fringe_period(p, slit), 0.02 * ghost_fringe_period(p, slit));
}

TEST(Interference, SlitValidation) {
  DoubleSlit s;
  s.slit_width = 3e-3;
  EXPECT_THROW(s.validate(), ParameterError);
  s = DoubleSlit{};
  s.d = 0;
  EXPECT_THROW(s.validate(), ParameterError);
}

TEST(PhasePattern, ConstructionAndValidation) {
  const auto b = PhasePattern::binary_halves(8, 4, 1e-4, pi);
  EXPECT_EQ(b.phase(3, 0), 0.0);
  EXPECT_EQ(b.phase(4, 0), pi);
  EXPECT_NEAR(b.origin_x, -3.5e-4, 1e-18);
  auto bad = b;
  bad.aperture(0, 0) = 1.5;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = b;
  bad.aperture = Grid2D<double>(3, 3, 1.0);
  EXPECT_THROW(bad.validate(), GridMismatchError);
}

TEST(PhasePattern, FourRotationsAreTheIdentity) {
  auto p = PhasePattern::binary_halves(6, 4, 1e-4, 1.0);
  p.phase(1, 3) = 2.0;
  auto r = p.rotated90().rotated90().rotated90().rotated90();
  EXPECT_TRUE(r.phase == p.phase);
  EXPECT_NEAR(r.origin_x, p.origin_x, 1e-18);
  EXPECT_NEAR(r.origin_y, p.origin_y, 1e-18);
  // a feature at (x, y) moves to (-y, x)
  const auto q = p.rotated90();
  const auto g = p.geometry(), h = q.geometry();
  const double x = g.x(1), y = g.y(3);
  bool found = false;
  for (std::size_t j = 0; j < h.ny; ++j)
    for (std::size_t i = 0; i < h.nx; ++i)
      if (std::abs(h.x(i) + y) < 1e-12 && std::abs(h.y(j) - x) < 1e-12) {
        EXPECT_EQ(q.phase(i, j), 2.0);
        found = true;
      }
  EXPECT_TRUE(found);
}

TEST(GhostImage, MatchesPixelSumOracle) {
  const auto p = imaging_source();
  const oracle::Source o{p.wavelength, p.sigma, p.s1, p.s2};
  const std::size_t n = 3;
  const double pitch = 62.5e-6;
  auto pattern = PhasePattern::uniform(n, n, pitch, 0.0);
  const double phases[] = {0.0, 1.0, pi, 2.5, 0.3, -1.2, pi / 2, 4.0, 0.8};
  for (std::size_t k = 0; k < 9; ++k) pattern.phase(k % 3, k / 3) = phases[k];
  pattern.aperture(2, 2) = 0.5;
  const GridSpec grid{9, 9, 4e-4, 4e-4, 0, 0};
  QuadSettings q;
  q.check_convergence = false;
  const auto map = ghost_image_map(p, kLens, pattern, deg(30), deg(-45), grid, q);

  const auto geo = grid.geometry();
  const auto pg = pattern.geometry();
  auto pixel_axis = [&](double centre, double x2) {
    return oracle::simpson([&](double x1) { return oracle::imaging_axis(o, kLens.f, kLens.v, x1, x2); },
                           centre - pitch / 2, centre + pitch / 2, 64);
  };
  double peak = 0, worst = 0;
  Grid2D<double> ref(9, 9);
  for (std::size_t jy = 0; jy < 9; ++jy)
    for (std::size_t ix = 0; ix < 9; ++ix) {
      cplx amp = 0;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
          amp += pattern.aperture(c, r) *
                 oracle::singlet_projection(pattern.phase(c, r), pi / 6, -pi / 4) *
                 pixel_axis(pg.x(c), geo.x(ix)) * pixel_axis(pg.y(r), geo.y(jy));
      ref(ix, jy) = std::norm(amp);
      peak = std::max(peak, ref(ix, jy));
    }
  for (std::size_t k = 0; k < ref.size(); ++k)
    worst = std::max(worst, std::abs(map.values.flat()[k] * map.scale - ref.flat()[k]));
  EXPECT_LT(worst / peak, 1e-5);
  EXPECT_NEAR(map.scale, peak, 1e-5 * peak);
}

TEST(GhostImage, UniformZeroPhaseBackgroundVanishes) {
  const auto p = imaging_source();
  const auto flat = PhasePattern::uniform(16, 16, 62.5e-6, 0.0);
  const auto grid = image_grid_for(16, 16, 62.5e-6);
  const auto bg = ghost_image_map(p, kLens, flat, deg(-45), deg(-45), grid);
  const auto ref = ghost_image_map(p, kLens, flat, deg(45), deg(-45), grid);
  EXPECT_LT(max_physical(bg), 1e-10 * ref.scale);
  EXPECT_EQ(bg.scale, 0.0);
}

TEST(GhostImage, PropertyPiShiftSwapsPolarizerOne) {
  const auto p = imaging_source();
  auto pattern = PhasePattern::binary_halves(12, 12, 62.5e-6, pi);
  for (std::size_t j = 0; j < 12; ++j)
    for (std::size_t i = 0; i < 12; ++i) pattern.phase(i, j) += 0.1 * double(i * j % 7);
  const auto grid = image_grid_for(12, 14, 62.5e-6);
  QuadSettings q;
  q.check_convergence = false;
  for (double d2 : {-45.0, 45.0, 10.0}) {
    const auto a = ghost_image_map(p, kLens, pattern, deg(45), deg(d2), grid, q);
    const auto b = ghost_image_map(p, kLens, pattern.phase_shifted(pi), deg(-45), deg(d2), grid, q);
    for (std::size_t k = 0; k < a.values.size(); ++k)
      EXPECT_NEAR(a.values.flat()[k] * a.scale, b.values.flat()[k] * b.scale, 1e-12 * a.scale);
  }
}

TEST(GhostImage, PropertyRotatingThePatternRotatesTheImage) {
  const auto p = imaging_source();
  auto pattern = PhasePattern::binary_halves(10, 10, 62.5e-6, pi);
  pattern.phase(2, 7) = 1.0;
  const auto grid = image_grid_for(10, 12, 62.5e-6);
  const auto a = ghost_image_map(p, kLens, pattern, deg(45), deg(-45), grid);
  const auto b = ghost_image_map(p, kLens, pattern.rotated90(), deg(45), deg(-45), grid);
  const std::size_t n = 12;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_NEAR(b.values(i, j) * b.scale, a.values(j, n - 1 - i) * a.scale, 1e-10 * a.scale);
}

TEST(GhostImage, BinaryPatternInvertsBetweenDiagonals) {
  const auto p = imaging_source();
  // pattern wider than the imaged field, as on a modulator
  const auto pattern = PhasePattern::binary_halves(48, 48, 62.5e-6, pi);
  const double ext = (1.5 / 1.33) * 2e-3;
  const GridSpec grid{32, 32, ext, ext, 0, 0};
  const auto plus = ghost_image_map(p, kLens, pattern, deg(45), deg(-45), grid);
  const auto minus = ghost_image_map(p, kLens, pattern, deg(-45), deg(-45), grid);
  std::vector<double> a(plus.values.flat().begin(), plus.values.flat().end()), c;
  for (double v : minus.values.flat()) c.push_back(1.0 - v);
  EXPECT_GT(oracle::pearson(a, c), 0.95);
  // the image is inverted: object half x >= 0 (phase pi) lands at x2 < 0
  EXPECT_GT(minus.values(4, 16), 0.9);
  EXPECT_LT(minus.values(27, 16), 0.05);
}

TEST(GhostImage, IndependentOfWorkerCount) {
  const auto p = imaging_source();
  const auto pattern = PhasePattern::binary_halves(40, 40, 62.5e-6, pi);
  const auto grid = image_grid_for(40, 70, 62.5e-6);
  QuadSettings q;
  q.check_convergence = false;
  const auto a = ghost_image_map(p, kLens, pattern, deg(45), deg(-45), grid, q, Execution{1});
  const auto b = ghost_image_map(p, kLens, pattern, deg(45), deg(-45), grid, q, Execution{3});
  EXPECT_TRUE(a.values == b.values);
  EXPECT_EQ(a.scale, b.scale);
}

TEST(GhostImage, LensPlaneRuleIsConverged) {
  const auto p = imaging_source();
  const auto pattern = PhasePattern::binary_halves(16, 16, 62.5e-6, pi);
  const auto grid = image_grid_for(16, 16, 62.5e-6);
  QuadSettings q;
  const auto a = ghost_image_map(p, kLens, pattern, deg(45), deg(-45), grid, q);
  q.aperture_node_spacing = max_aperture_node_spacing(p.wavenumber(), kLens) / 2;
  const auto b = ghost_image_map(p, kLens, pattern, deg(45), deg(-45), grid, q);
  for (std::size_t k = 0; k < a.values.size(); ++k)
    EXPECT_NEAR(a.values.flat()[k] * a.scale, b.values.flat()[k] * b.scale, 1e-8 * a.scale);
}

TEST(GhostImage, SupersamplingCheckPasses) {
  const auto p = imaging_source();
  const auto pattern = PhasePattern::binary_halves(16, 16, 62.5e-6, pi);
  QuadSettings q;
  q.verify_supersample = true;
  q.tolerance = 1e-6;
  EXPECT_NO_THROW(ghost_image_map(p, kLens, pattern, deg(45), deg(-45), image_grid_for(16, 16, 62.5e-6), q));
}

TEST(GhostImage, CoarsePatternSamplingIsRejected) {
  const auto p = imaging_source();
  const auto pattern = PhasePattern::binary_halves(16, 16, 62.5e-6, pi);
  QuadSettings q;
  q.pattern_supersample = 1;
  EXPECT_THROW(ghost_image_map(p, kLens, pattern, deg(45), deg(-45), image_grid_for(16, 64, 62.5e-6), q),
               SamplingError);
}

TEST(GhostImage, WrongSourcePlaneIsRejected) {
  const auto pattern = PhasePattern::uniform(4, 4, 62.5e-6, 0);
  EXPECT_THROW(ghost_image_map(SourceParams::paper_defaults(), kLens, pattern, deg(45), deg(-45),
                               image_grid_for(4, 4, 62.5e-6)),
               ParameterError);
}

TEST(Background, SubtractionIdentitiesAndErrors) {
  CoincidenceMap a;
  a.geometry = MapGeometry{3, 2, 1e-4, 1e-4, 0, 0};
  a.values = Grid2D<double>(3, 2, 0.5);
  a.values(1, 1) = 1.0;
  a.scale = 4.0;
  const auto zero = background_subtract(a, a);
  for (double v : zero.values.flat()) EXPECT_EQ(v, 0.0);
  CoincidenceMap empty = a;
  empty.values = Grid2D<double>(3, 2, 0.0);
  empty.scale = 0.0;
  const auto same = background_subtract(a, empty);
  EXPECT_EQ(same.values(1, 1), 4.0);
  EXPECT_EQ(same.values(0, 0), 2.0);
  const auto norm = peak_normalized(background_subtract(empty, a));
  EXPECT_EQ(norm.values(1, 1), -1.0);
  CoincidenceMap other = a;
  other.geometry.pitch_x = 2e-4;
  EXPECT_THROW(background_subtract(a, other), GridMismatchError);
}

TEST(Relay, ScalesCoordinatesOnly) {
  CoincidenceMap a;
  a.geometry = MapGeometry{2, 2, 1e-4, 2e-4, -1e-4, -2e-4};
  a.values = Grid2D<double>(2, 2, 1.0);
  a.scale = 1.0;
  const auto r = through_relay(a, RelayTelescope{0.5});
  EXPECT_DOUBLE_EQ(r.geometry.pitch_x, 0.5e-4);
  EXPECT_DOUBLE_EQ(r.geometry.origin_y, -1e-4);
  EXPECT_TRUE(r.values == a.values);
}

TEST(NormalizedMap, PeakIsOneAndScaleRecorded) {
  Grid2D<double> raw(2, 2, 0.0);
  raw(1, 0) = 8.0;
  raw(0, 1) = 2.0;
  const auto m = make_normalized_map(MapGeometry{2, 2, 1, 1, 0, 0}, raw, "x");
  EXPECT_EQ(m.values(1, 0), 1.0);
  EXPECT_EQ(m.physical(0, 1), 2.0);
  Grid2D<double> neg(2, 2, 0.0);
  neg(0, 0) = -1.0;
  EXPECT_THROW(make_normalized_map(MapGeometry{2, 2, 1, 1, 0, 0}, neg, "x"), NumericError);
}
