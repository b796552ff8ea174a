#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "ghost/biphoton.hpp"
#include "ghost/detector.hpp"
#include "ghost/experiments.hpp"
#include "ghost/io.hpp"
#include "ghost/optics.hpp"
#include "ghost/quadrature.hpp"

namespace ghost {

/// Everything a CLI run needs. Lengths in metres, times in seconds, angles
/// in degrees (converted to radians when handed to the physics modules).
struct RunConfig {
  SourceParams source;

  double lens_f = 1.5;
  double lens_u = 2.83;
  double lens_v = 0.0;  // 0: solve the thin-lens equation
  double aperture_radius = 25e-3;
  double relay_demagnification = 0.87;  // object size / camera size; 0 skips the relay

  double delta1_deg = 45.0;
  double delta2_deg = -45.0;
  double visibility = 1.0;
  double chsh_a_deg = 0.0;
  double chsh_a_prime_deg = 45.0;
  double chsh_b_deg = 22.5;
  double chsh_b_prime_deg = 67.5;

  double slit_d = 2e-3;
  SlitAxis slit_axis = SlitAxis::x;
  double slit_width = 0.0;

  GridSpec interference_grid{512, 128, 6e-3, 2e-3, 0.0, 0.0};
  GridSpec image_grid{256, 256, 0.0, 0.0, 0.0, 0.0};  // extents 0: magnified pattern extent

  std::string pattern_path;  // empty: built-in two-region pattern
  std::size_t pattern_nx = 128;
  std::size_t pattern_ny = 128;
  double pattern_pitch = 62.5e-6;
  double pattern_phase_scale = 3.141592653589793;

  QuadSettings quad;
  DetectorConfig detector;

  double amplitude_x1 = 0.0;
  double amplitude_y1 = 0.0;
  SlitAxis amplitude_axis = SlitAxis::x;
  double amplitude_from = -3e-3;
  double amplitude_to = 3e-3;
  std::size_t amplitude_points = 121;
  double amplitude_offset = 0.0;  // fixed coordinate on the other axis
  bool amplitude_oracle = false;

  std::string output_prefix = "ghostsim";
  MapFormat output_format = MapFormat::matrix_text;
  bool output_both_formats = false;
  std::size_t workers = 0;

  LensSystem lens() const;
  PolarizerAngle delta1() const { return PolarizerAngle::from_degrees(delta1_deg); }
  PolarizerAngle delta2() const { return PolarizerAngle::from_degrees(delta2_deg); }
  ChshAngles chsh_angles() const;
  DoubleSlit slit() const;
  Execution execution() const { return Execution{static_cast<unsigned>(workers)}; }
};

/// Applies one "key = value" assignment. Throws ParseError naming the key;
/// `line` is carried into the diagnostic when non-zero.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, int line = 0);

/// Parses flat key=value text. Blank lines and '#' comments are ignored.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});

/// Fully resolved configuration in the same format, one key per line.
std::string config_echo(const RunConfig& cfg);

/// Checks each field group with the module validators; throws on failure.
void validate(const RunConfig& cfg);

}  // namespace ghost
