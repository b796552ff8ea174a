#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "ghost/detector.hpp"
#include "ghost/error.hpp"

using namespace ghost;

namespace {

CoincidenceMap gaussian_map(std::size_t nx, std::size_t ny) {
  CoincidenceMap m;
  m.geometry = MapGeometry{nx, ny, 1e-4, 1e-4, 0, 0};
  m.values = Grid2D<double>(nx, ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = (i - nx / 2.0) / (nx / 4.0), y = (j - ny / 2.0) / (ny / 4.0);
      m.values(i, j) = std::exp(-x * x - y * y) * (1.0 + 0.5 * std::cos(3 * x));
    }
  double peak = 0;
  for (double v : m.values.flat()) peak = std::max(peak, v);
  for (double& v : m.values.flat()) v /= peak;
  m.scale = 1.0;
  return m;
}

double l2_error(const CountFrame& f, const CoincidenceMap& m) {
  const double total = static_cast<double>(f.total());
  double msum = 0;
  for (double v : m.values.flat()) msum += v;
  double e = 0;
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    const double d = f.counts.flat()[k] / total - m.values.flat()[k] / msum;
    e += d * d;
  }
  return std::sqrt(e);
}

}  // namespace

TEST(Gates, ExpectedCountForThirtyMinutes) {
  EXPECT_EQ(expected_gate_count(DetectorConfig{}), 36'000'000u);
  DetectorConfig c;
  c.exposure = 0;
  EXPECT_EQ(expected_gate_count(c), 0u);
}

TEST(Config, Validation) {
  DetectorConfig c;
  c.pair_detection_prob = 1.5;
  EXPECT_THROW(c.validate(), ParameterError);
  c = DetectorConfig{};
  c.exposure = -1;
  EXPECT_THROW(c.validate(), ParameterError);
  c = DetectorConfig{};
  c.dark_rate = NAN;
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(Exposure, DetectionsNeverExceedGates) {
  const auto m = gaussian_map(32, 24);
  DetectorConfig c;
  c.exposure = 2.0;
  c.pair_detection_prob = 1.0;
  const auto f = simulate_exposure(m, c);
  EXPECT_EQ(f.detections, f.gates_opened);
  std::uint64_t sum = 0;
  for (auto v : f.counts.flat()) sum += v;
  EXPECT_EQ(sum, f.detections);
  EXPECT_NEAR(static_cast<double>(f.gates_opened), 4e4, 5 * std::sqrt(4e4));
}

TEST(Exposure, ZeroMapGivesOnlyDarkCounts) {
  auto m = gaussian_map(8, 8);
  for (double& v : m.values.flat()) v = 0;
  m.scale = 0;
  DetectorConfig c;
  c.exposure = 10;
  c.dark_rate = 3;
  const auto f = simulate_exposure(m, c);
  EXPECT_EQ(f.detections, 0u);
  EXPECT_EQ(f.total(), f.dark_counts);
  EXPECT_NEAR(static_cast<double>(f.dark_counts) / 64.0, 30.0, 4 * std::sqrt(30.0 / 64.0));
}

TEST(Exposure, ZeroExposureIsEmpty) {
  DetectorConfig c;
  c.exposure = 0;
  c.dark_rate = 5;
  const auto f = simulate_exposure(gaussian_map(4, 4), c);
  EXPECT_EQ(f.total(), 0u);
}

TEST(Exposure, DeterministicAcrossRunsAndWorkerCounts) {
  const auto m = gaussian_map(40, 70);
  DetectorConfig c;
  c.exposure = 30;
  c.dark_rate = 0.2;
  const auto a = simulate_exposure(m, c, Execution{1});
  for (unsigned w : {1u, 2u, 5u, 8u}) {
    const auto b = simulate_exposure(m, c, Execution{w});
    EXPECT_TRUE(a.counts == b.counts) << w;
    EXPECT_EQ(a.gates_opened, b.gates_opened);
  }
  c.seed += 1;
  EXPECT_FALSE(simulate_exposure(m, c).counts == a.counts);
}

TEST(Exposure, PerPixelCountsArePoisson) {
  const auto m = gaussian_map(8, 8);
  DetectorConfig c;
  c.exposure = 2.0;  // ~4000 detections per frame
  const int runs = 4000;
  std::vector<double> s(64, 0), s2(64, 0);
  for (int r = 0; r < runs; ++r) {
    c.seed = derive_seed(77, static_cast<std::uint64_t>(r));
    const auto f = simulate_exposure(m, c);
    for (std::size_t k = 0; k < 64; ++k) {
      const double v = static_cast<double>(f.counts.flat()[k]);
      s[k] += v;
      s2[k] += v * v;
    }
  }
  int tested = 0;
  for (std::size_t k = 0; k < 64; ++k) {
    const double mean = s[k] / runs;
    const double var = (s2[k] - runs * mean * mean) / (runs - 1);
    if (mean < 50) continue;
    ++tested;
    EXPECT_GE(var / mean, 0.9) << k;
    EXPECT_LE(var / mean, 1.1) << k;
  }
  EXPECT_GE(tested, 10);
}

TEST(Exposure, NormalizedCountsConvergeAsSqrtN) {
  const auto m = gaussian_map(32, 32);
  DetectorConfig c;
  std::vector<double> err;
  for (double t : {1.0, 4.0, 16.0}) {
    c.exposure = t;
    err.push_back(l2_error(simulate_exposure(m, c), m));
  }
  EXPECT_LT(err[1], err[0]);
  EXPECT_LT(err[2], err[1]);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(err[i] / err[i + 1], 2.0, 0.4);
  }
}

TEST(GhostImage, EqualMapsCancelWithinPoissonNoise) {
  const auto m = gaussian_map(16, 16);
  DetectorConfig c;
  c.exposure = 5;
  const auto run = simulate_ghost_exposure(m, m, c);
  double msum = 0;
  for (double v : m.values.flat()) msum += v;
  const double n = static_cast<double>(run.signal.detections);
  double total = 0;
  for (std::size_t k = 0; k < 256; ++k) {
    const double mean = n * m.values.flat()[k] / msum;
    const double diff = static_cast<double>(run.corrected.counts.flat()[k]);
    total += diff;
    EXPECT_LT(std::abs(diff), 4 * std::sqrt(2 * mean) + 4) << k;
  }
  EXPECT_LT(std::abs(total), 4 * std::sqrt(2 * n) + 200);
  EXPECT_TRUE(build_ghost_image(m, m, c).counts == run.corrected.counts);
  EXPECT_NE(run.signal.seed, run.background.seed);
}

TEST(GhostImage, MismatchedGridsRejected) {
  DetectorConfig c;
  EXPECT_THROW(build_ghost_image(gaussian_map(4, 4), gaussian_map(4, 5), c), GridMismatchError);
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}
