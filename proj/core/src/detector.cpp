#include "ghost/detector.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ghost/error.hpp"

namespace ghost {
namespace {

// Rows per multinomial block. Fixed so that the random streams, and hence
// the frame, do not depend on the worker count.
constexpr std::size_t kBlockRows = 16;

constexpr std::uint64_t kStreamGates = 1;
constexpr std::uint64_t kStreamDark = 2;
constexpr std::uint64_t kStreamBlockBase = 1000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Engine = std::mt19937_64;

std::uint64_t draw_poisson(Engine& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(rng);
}

std::uint64_t draw_binomial(Engine& rng, std::uint64_t n, double p) {
  if (n == 0 || !(p > 0.0)) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::uint64_t> dist(n, p);
  return dist(rng);
}

// Multinomial(n, weights) by sequential conditional binomials. Suffix sums
// avoid the drift of repeated subtraction.
void multinomial(Engine& rng, std::uint64_t n, std::span<const double> weights,
                 std::span<std::uint64_t> out) {
  std::vector<double> suffix(weights.size() + 1, 0.0);
  for (std::size_t i = weights.size(); i-- > 0;) suffix[i] = suffix[i + 1] + weights[i];
  for (std::size_t i = 0; i < weights.size() && n > 0; ++i) {
    if (weights[i] <= 0.0) continue;
    const double p = suffix[i] > 0.0 ? weights[i] / suffix[i] : 1.0;
    const std::uint64_t k = draw_binomial(rng, n, std::min(1.0, p));
    out[i] += k;
    n -= k;
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

void DetectorConfig::validate() const {
  for (double v : {trigger_rate, gate_width, gate_delay, exposure, pair_detection_prob, dark_rate})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ParameterError("detector rates, widths and probabilities must be finite and >= 0");
  if (pair_detection_prob > 1.0) throw ParameterError("pair detection probability exceeds 1");
}

std::uint64_t expected_gate_count(const DetectorConfig& cfg) {
  cfg.validate();
  return static_cast<std::uint64_t>(std::llround(cfg.trigger_rate * cfg.exposure));
}

CountFrame simulate_exposure(const CoincidenceMap& map, const DetectorConfig& cfg,
                             Execution exec) {
  cfg.validate();
  const auto& g = map.geometry;
  if (map.values.nx() != g.nx || map.values.ny() != g.ny)
    throw GridMismatchError("map values do not match the map geometry");
  for (double v : map.values.flat())
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("map values must be finite and >= 0");

  CountFrame frame;
  frame.geometry = g;
  frame.counts = Grid2D<std::uint64_t>(g.nx, g.ny, 0);
  frame.exposure = cfg.exposure;
  frame.seed = cfg.seed;

  Engine gate_rng(derive_seed(cfg.seed, kStreamGates));
  frame.gates_opened = draw_poisson(gate_rng, cfg.trigger_rate * cfg.exposure);

  double total_weight = 0.0;
  for (double v : map.values.flat()) total_weight += v;
  if (total_weight > 0.0) {
    frame.detections = draw_binomial(gate_rng, frame.gates_opened, cfg.pair_detection_prob);

    const std::size_t blocks = (g.ny + kBlockRows - 1) / kBlockRows;
    std::vector<double> block_weight(blocks, 0.0);
    for (std::size_t b = 0; b < blocks; ++b)
      for (std::size_t iy = b * kBlockRows; iy < std::min(g.ny, (b + 1) * kBlockRows); ++iy)
        for (double v : map.values.row(iy)) block_weight[b] += v;
    std::vector<std::uint64_t> block_counts(blocks, 0);
    multinomial(gate_rng, frame.detections, block_weight, block_counts);

    parallel_for(blocks, exec, [&](std::size_t b) {
      const std::size_t row0 = b * kBlockRows;
      const std::size_t rows = std::min(g.ny, row0 + kBlockRows) - row0;
      Engine rng(derive_seed(cfg.seed, kStreamBlockBase + b));
      const auto weights = map.values.flat().subspan(row0 * g.nx, rows * g.nx);
      auto out = frame.counts.flat().subspan(row0 * g.nx, rows * g.nx);
      multinomial(rng, block_counts[b], weights, out);
    });
  }

  if (cfg.dark_rate > 0.0) {
    Engine dark_rng(derive_seed(cfg.seed, kStreamDark));
    const double mean = cfg.dark_rate * cfg.exposure;
    for (auto& c : frame.counts.flat()) {
      const auto d = draw_poisson(dark_rng, mean);
      c += d;
      frame.dark_counts += d;
    }
  }
  return frame;
}

GhostExposure simulate_ghost_exposure(const CoincidenceMap& signal_map,
                                      const CoincidenceMap& background_map,
                                      const DetectorConfig& cfg, Execution exec) {
  if (!signal_map.geometry.matches(background_map.geometry))
    throw GridMismatchError("signal and background maps are on different grids");
  DetectorConfig sig = cfg, bg = cfg;
  sig.seed = derive_seed(cfg.seed, 11);
  bg.seed = derive_seed(cfg.seed, 12);
  GhostExposure out;
  out.signal = simulate_exposure(signal_map, sig, exec);
  out.background = simulate_exposure(background_map, bg, exec);
  out.corrected.geometry = signal_map.geometry;
  out.corrected.counts = Grid2D<std::int64_t>(out.signal.counts.nx(), out.signal.counts.ny(), 0);
  for (std::size_t n = 0; n < out.corrected.counts.size(); ++n)
    out.corrected.counts.flat()[n] = static_cast<std::int64_t>(out.signal.counts.flat()[n]) -
                                     static_cast<std::int64_t>(out.background.counts.flat()[n]);
  return out;
}

SignedCountImage build_ghost_image(const CoincidenceMap& signal_map,
                                   const CoincidenceMap& background_map,
                                   const DetectorConfig& cfg, Execution exec) {
  return simulate_ghost_exposure(signal_map, background_map, cfg, exec).corrected;
}

}  // namespace ghost
