#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ghost/diagnostics.hpp"
#include "ghost/error.hpp"
#include "ghost/optics.hpp"
#include "oracles.hpp"

using namespace ghost;

namespace {

SourceParams imaging_source(const LensSystem& lens) {
  return lens_plane_params(SourceParams::paper_defaults(), lens);
}

oracle::Source to_oracle(const SourceParams& p) { return {p.wavelength, p.sigma, p.s1, p.s2}; }

QuadSettings unchecked() {
  QuadSettings q;
  q.check_convergence = false;
  return q;
}

}  // namespace

TEST(ThinLens, SolvesImagingEquation) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  EXPECT_NEAR(lens.v, 1.5 * 2.83 / 1.33, 1e-12);
  EXPECT_LT(lens.imaging_residual(), 1e-12);
  EXPECT_NO_THROW(validate(lens, true));
  EXPECT_THROW(LensSystem::thin_lens(1.5, 1.5), ParameterError);
  EXPECT_THROW(LensSystem::thin_lens(-1, 2), ParameterError);
}

TEST(ThinLens, ValidationCatchesBadSystems) {
  auto lens = LensSystem::thin_lens(1.5, 2.83);
  lens.v *= 1.01;
  EXPECT_THROW(validate(lens, true), ParameterError);
  EXPECT_NO_THROW(validate(lens, false));
  lens = LensSystem::thin_lens(1.5, 2.83, CircularAperture{-1.0});
  EXPECT_THROW(validate(lens, false), ParameterError);
  SampledAperture bad;
  bad.geometry = MapGeometry{4, 4, 1e-3, 1e-3, 0, 0};
  bad.transmission = Grid2D<double>(4, 4, 2.0);
  lens = LensSystem::thin_lens(1.5, 2.83, bad);
  EXPECT_THROW(validate(lens, false), ParameterError);
}

TEST(LensPlane, SourcePlaneMustSitOnTheLens) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  EXPECT_NO_THROW(check_lens_plane(imaging_source(lens), lens));
  EXPECT_THROW(check_lens_plane(SourceParams::paper_defaults(), lens), ParameterError);
  EXPECT_NEAR(imaging_source(lens).s2, 1.5, 1e-15);
}

TEST(Apertures, CircularAndSampledTransmission) {
  EXPECT_EQ(aperture_transmission(CircularAperture{1e-3}, 0.5e-3, 0.5e-3), 1.0);
  EXPECT_EQ(aperture_transmission(CircularAperture{1e-3}, 0.8e-3, 0.8e-3), 0.0);
  SampledAperture s;
  s.geometry = MapGeometry{2, 2, 1e-3, 1e-3, -0.5e-3, -0.5e-3};
  s.transmission = Grid2D<double>(2, 2, 0.0);
  s.transmission(1, 0) = 0.7;
  EXPECT_EQ(aperture_transmission(s, 0.4e-3, -0.4e-3), 0.7);
  EXPECT_EQ(aperture_transmission(s, -0.4e-3, -0.4e-3), 0.0);
  EXPECT_EQ(aperture_transmission(s, 5e-3, 0.0), 0.0);
  const auto b = aperture_bounds(s);
  EXPECT_NEAR(b.xi_min, -1e-3, 1e-15);
  EXPECT_NEAR(b.eta_max, 1e-3, 1e-15);
}

TEST(Fresnel, NumberAndSpacingRule) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  const double k = SourceParams{}.wavenumber();
  const double nf = fresnel_number(k, 25e-3, 2.83);
  EXPECT_NEAR(nf, 25e-3 * 25e-3 / (810e-9 * 2.83), 1e-9);
  EXPECT_NEAR(max_aperture_node_spacing(k, lens), 25e-3 / (8 * nf), 1e-15);
}

TEST(Fresnel, CoarseSpacingWarns) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  QuadSettings q;
  q.aperture_node_spacing = 1e-3;
  ScopedWarningCapture cap;
  const auto rule = aperture_plane_rule(imaging_source(lens), lens, q);
  EXPECT_TRUE(cap.contains("aperture undersampled"));
  EXPECT_EQ(rule.spacing, 1e-3);
}

TEST(Imaging, NormalizationGivesUnitAmplitudeAtOrigin) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  const auto v = imaging_amplitude(imaging_source(lens), lens, 0, 0, 0, 0);
  EXPECT_NEAR(std::abs(v.value - cplx(1.0)), 0.0, 1e-6);
}

TEST(Imaging, MatchesUnboundedApertureOracle) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  const auto p = imaging_source(lens);
  const auto o = to_oracle(p);
  const double m = ghost_magnification(p, lens);
  struct Pt { double x1, y1, x2, y2; };
  for (Pt t : {Pt{1e-3, 0, -m * 1e-3, 0}, Pt{0.5e-3, -1e-3, -m * 0.5e-3 + 5e-5, m * 1e-3},
               Pt{0, 0, 1e-4, -2e-4}, Pt{-2e-3, 1e-3, 2.3e-3, -1.1e-3}}) {
    const cplx ref = oracle::imaging(o, lens.f, lens.v, t.x1, t.y1, t.x2, t.y2);
    const cplx lib = imaging_amplitude(p, lens, t.x1, t.y1, t.x2, t.y2).value;
    EXPECT_LT(std::abs(lib - ref), 2e-6) << t.x1 << " " << t.x2;
  }
}

TEST(Imaging, IntegrationOrderDoesNotMatter) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  const auto p = imaging_source(lens);
  const auto q = unchecked();
  const cplx a = imaging_amplitude(p, lens, 1e-3, 0.3e-3, -1.1e-3, -0.3e-3, q, IntegrationOrder::xi_outer).value;
  const cplx b = imaging_amplitude(p, lens, 1e-3, 0.3e-3, -1.1e-3, -0.3e-3, q, IntegrationOrder::eta_outer).value;
  EXPECT_LT(std::abs(a - b), 1e-12);
}

TEST(Imaging, ProfileMatchesPointEvaluation) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  const auto p = imaging_source(lens);
  const std::vector<double> xs{-1.3e-3, -1.128e-3, -0.9e-3};
  const auto q = unchecked();
  const auto prof = imaging_amplitude_profile(p, lens, 1e-3, 0.2e-3, xs, -0.1e-3, q);
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_LT(std::abs(prof[i] - imaging_amplitude(p, lens, 1e-3, 0.2e-3, xs[i], -0.1e-3, q).value), 1e-12);
}

TEST(Imaging, PeakTracksMagnification) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  const auto p = imaging_source(lens);
  const double m = ghost_magnification(p, lens);
  EXPECT_NEAR(m, 1.5 / 1.33, 1e-12);
  for (double x1 : {-1.5e-3, 0.7e-3, 2e-3}) {
    std::vector<double> xs;
    for (int i = -60; i <= 60; ++i) xs.push_back(-m * x1 + i * 5e-6);
    const auto prof = imaging_amplitude_profile(p, lens, x1, 0, xs, 0, unchecked());
    std::size_t best = 0;
    for (std::size_t i = 0; i < prof.size(); ++i)
      if (std::abs(prof[i]) > std::abs(prof[best])) best = i;
    EXPECT_NEAR(xs[best], -m * x1, 5.1e-6);
  }
}

TEST(Imaging, WideSourceGivesAiryFirstZero) {
  // With a source much wider than the lens, the lens rim is the pupil and the
  // point-spread function is the Airy pattern with its first zero at
  // 0.61 lambda v / rho.
  auto lens = LensSystem::thin_lens(1.5, 2.83);
  SourceParams p;
  p.sigma = 0.1;
  p = lens_plane_params(p, lens);
  ScopedWarningCapture cap;  // plane distances are < 50 sigma here
  const double expected = 0.61 * p.wavelength * lens.v / 25e-3;
  std::vector<double> xs;
  for (int i = 0; i <= 240; ++i) xs.push_back(i * 0.5e-6);
  const auto prof = imaging_amplitude_profile(p, lens, 0, 0, xs, 0, unchecked());
  std::size_t first_min = 0;
  for (std::size_t i = 1; i + 1 < prof.size(); ++i)
    if (std::abs(prof[i]) < std::abs(prof[i - 1]) && std::abs(prof[i]) <= std::abs(prof[i + 1])) {
      first_min = i;
      break;
    }
  ASSERT_GT(first_min, 0u);
  EXPECT_NEAR(xs[first_min], expected, 0.02 * expected);
  EXPECT_LT(std::abs(prof[first_min]), 0.05 * std::abs(prof[0]));
  EXPECT_TRUE(cap.contains("50 sigma"));
}

TEST(Imaging, NonImagingLensRejected) {
  auto lens = LensSystem::thin_lens(1.5, 2.83);
  lens.v = 3.0;
  EXPECT_THROW(imaging_amplitude(imaging_source(lens), lens, 0, 0, 0, 0), ParameterError);
}

TEST(Relay, ScaleForTotalDemagnification) {
  const double m = 1.5 / 1.33;
  const auto relay = RelayTelescope::for_total_demagnification(0.87, m);
  // object size / camera image size = 0.87
  EXPECT_NEAR(1.0 / (m * relay.scale), 0.87, 1e-12);
  EXPECT_THROW(RelayTelescope::for_total_demagnification(0.0, m), ParameterError);
}
