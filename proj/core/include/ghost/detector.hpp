#pragma once

#include <cstdint>

#include "ghost/experiments.hpp"
#include "ghost/grid.hpp"
#include "ghost/parallel.hpp"

namespace ghost {

/// Triggered, gated ICCD acquisition in accumulation mode.
struct DetectorConfig {
  double trigger_rate = 2e4;        // gate openings per second
  double gate_width = 10e-9;        // s
  double gate_delay = 20e-9;        // s, recorded only
  double exposure = 1800.0;         // s
  double pair_detection_prob = 0.1; // photon-2 detections per gate
  double dark_rate = 0.0;           // counts / pixel / s
  std::uint64_t seed = 20240101;

  /// Throws ParameterError for negative or non-finite values or a detection
  /// probability above 1.
  void validate() const;
};

/// Accumulated camera counts. `detections` counts gated photon-2 hits;
/// `dark_counts` the uniformly distributed dark events.
struct CountFrame {
  MapGeometry geometry;
  Grid2D<std::uint64_t> counts;
  std::uint64_t gates_opened = 0;
  std::uint64_t detections = 0;
  std::uint64_t dark_counts = 0;
  double exposure = 0.0;
  std::uint64_t seed = 0;

  std::uint64_t total() const { return detections + dark_counts; }
};

/// Pixel-wise difference of two frames; may be negative.
struct SignedCountImage {
  MapGeometry geometry;
  Grid2D<std::int64_t> counts;
};

/// round(trigger_rate * exposure).
std::uint64_t expected_gate_count(const DetectorConfig& cfg);

/// Stochastic realization of a normalized map: the number of gates is
/// Poisson(trigger_rate * exposure); each gate produces at most one
/// detection with probability pair_detection_prob, placed on pixel (i, j)
/// with probability map(i, j) / sum(map). Dark counts are Poisson per pixel.
/// Bit-identical for a given seed whatever exec.workers is.
CountFrame simulate_exposure(const CoincidenceMap& map, const DetectorConfig& cfg,
                             Execution exec = {});

/// Both raw frames of a background-corrected acquisition and their difference.
struct GhostExposure {
  CountFrame signal;
  CountFrame background;
  SignedCountImage corrected;
};

/// Simulates the signal and background exposures with sub-seeds derived from
/// cfg.seed and subtracts them pixel-wise.
GhostExposure simulate_ghost_exposure(const CoincidenceMap& signal_map,
                                      const CoincidenceMap& background_map,
                                      const DetectorConfig& cfg, Execution exec = {});

/// simulate_ghost_exposure(...).corrected
SignedCountImage build_ghost_image(const CoincidenceMap& signal_map,
                                   const CoincidenceMap& background_map,
                                   const DetectorConfig& cfg, Execution exec = {});

/// Deterministic stream seed from a base seed and a stream index
/// (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace ghost
