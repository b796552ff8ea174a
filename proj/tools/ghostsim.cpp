#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ghost/biphoton.hpp"
#include "ghost/config.hpp"
#include "ghost/detector.hpp"
#include "ghost/error.hpp"
#include "ghost/experiments.hpp"
#include "ghost/io.hpp"
#include "ghost/optics.hpp"
#include "ghost/polarization.hpp"
#include "ghost/validation.hpp"

namespace {

using namespace ghost;

struct Options {
  std::string config_path;
  std::vector<std::string> settings;
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::optional<std::size_t> workers;

  std::optional<std::string> axis;
  std::optional<double> slit_d, slit_width;

  std::optional<double> delta1, delta2;
  std::optional<std::string> pattern;
  std::optional<double> phase_scale, relay;

  std::optional<std::uint64_t> seed;
  std::optional<double> exposure;
  std::string signal_map, background_map;

  std::optional<double> visibility, a, a_prime, b, b_prime;
  bool verbose = false;

  std::optional<double> x1, y1, from, to, offset;
  std::optional<std::size_t> points;
  bool oracle = false;
};

// Config file, then --set, then the dedicated flags.
RunConfig resolve(const Options& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + s + "'");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  auto set = [&](const char* key, const auto& value) {
    if (!value) return;
    std::ostringstream os;
    os.precision(17);
    os << *value;
    apply_setting(cfg, key, os.str());
  };
  set("output.prefix", o.output);
  set("output.format", o.format);
  set("run.workers", o.workers);
  set("slit.axis", o.axis);
  set("slit.d", o.slit_d);
  set("slit.width", o.slit_width);
  set("polarizer.delta1", o.delta1);
  set("polarizer.delta2", o.delta2);
  set("pattern.path", o.pattern);
  set("pattern.phase_scale", o.phase_scale);
  set("relay.demagnification", o.relay);
  set("detector.seed", o.seed);
  set("detector.exposure", o.exposure);
  set("polarizer.visibility", o.visibility);
  set("chsh.a", o.a);
  set("chsh.a_prime", o.a_prime);
  set("chsh.b", o.b);
  set("chsh.b_prime", o.b_prime);
  set("amplitude.x1", o.x1);
  set("amplitude.y1", o.y1);
  set("amplitude.from", o.from);
  set("amplitude.to", o.to);
  set("amplitude.offset", o.offset);
  set("amplitude.points", o.points);
  if (o.oracle) cfg.amplitude_oracle = true;
  validate(cfg);
  return cfg;
}

std::vector<MapFormat> formats(const RunConfig& cfg) {
  if (cfg.output_both_formats) return {MapFormat::matrix_text, MapFormat::graymap};
  return {cfg.output_format};
}

std::string output_path(const RunConfig& cfg, const std::string& name, MapFormat f) {
  return cfg.output_prefix + "_" + name + (f == MapFormat::matrix_text ? ".txt" : ".pgm");
}

void write_echo(const RunConfig& cfg) {
  const auto path = cfg.output_prefix + ".config.txt";
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
    std::filesystem::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  out << config_echo(cfg);
  if (!out) throw IoError("cannot write " + path);
  std::cout << "wrote " << path << '\n';
}

template <typename Map>
void emit(const RunConfig& cfg, const Map& map, const std::string& name) {
  for (auto f : formats(cfg)) {
    const auto path = output_path(cfg, name, f);
    save_map(map, path, f);
    std::cout << "wrote " << path << '\n';
  }
}

PhasePattern pattern_for(const RunConfig& cfg) {
  if (cfg.pattern_path.empty())
    return PhasePattern::binary_halves(cfg.pattern_nx, cfg.pattern_ny, cfg.pattern_pitch,
                                       cfg.pattern_phase_scale);
  return load_pattern(cfg.pattern_path, {cfg.pattern_phase_scale, cfg.pattern_pitch});
}

// The source plane-2 distance follows the lens position in imaging runs.
SourceParams imaging_params(const RunConfig& cfg, const LensSystem& lens) {
  return lens_plane_params(cfg.source, lens);
}

GridSpec image_grid_for(const RunConfig& cfg, const PhasePattern& pattern, double m) {
  GridSpec g = cfg.image_grid;
  const auto pg = pattern.geometry();
  const double cx = pg.origin_x + 0.5 * static_cast<double>(pg.nx - 1) * pg.pitch_x;
  const double cy = pg.origin_y + 0.5 * static_cast<double>(pg.ny - 1) * pg.pitch_y;
  if (g.extent_x == 0.0) {
    g.extent_x = m * static_cast<double>(pg.nx) * pg.pitch_x;
    g.center_x = -m * cx;
  }
  if (g.extent_y == 0.0) {
    g.extent_y = m * static_cast<double>(pg.ny) * pg.pitch_y;
    g.center_y = -m * cy;
  }
  return g;
}

struct ImageMaps {
  CoincidenceMap signal;
  CoincidenceMap background;
};

ImageMaps compute_image_maps(const RunConfig& cfg) {
  const auto lens = cfg.lens();
  const auto params = imaging_params(cfg, lens);
  const double m = ghost_magnification(params, lens);
  const auto pattern = pattern_for(cfg);
  const auto grid = image_grid_for(cfg, pattern, m);
  std::cout << "ghost image: " << pattern.phase.nx() << "x" << pattern.phase.ny() << " pattern -> "
            << grid.nx << "x" << grid.ny << " grid, m = " << m << '\n';
  ImageMaps maps;
  maps.signal = ghost_image_map(params, lens, pattern, cfg.delta1(), cfg.delta2(), grid, cfg.quad,
                                cfg.execution());
  // Background: uniform phi = 0 with both polarizers at -45 degrees.
  auto flat = pattern;
  for (double& v : flat.phase.flat()) v = 0.0;
  const auto minus45 = PolarizerAngle::from_degrees(-45.0);
  maps.background =
      ghost_image_map(params, lens, flat, minus45, minus45, grid, cfg.quad, cfg.execution());
  if (cfg.relay_demagnification > 0.0) {
    const auto relay = RelayTelescope::for_total_demagnification(cfg.relay_demagnification, m);
    maps.signal = through_relay(std::move(maps.signal), relay);
    maps.background = through_relay(std::move(maps.background), relay);
  }
  return maps;
}

int run_interference(const RunConfig& cfg) {
  write_echo(cfg);
  const auto slit = cfg.slit();
  const auto map = ghost_interference_map(cfg.source, slit, cfg.interference_grid);
  std::cout << "fringe period (ideal) " << ghost_fringe_period(cfg.source, slit) << " m, measured "
            << measure_fringe_period(map, slit.axis) << " m\n";
  emit(cfg, map, "interference");
  return 0;
}

int run_image(const RunConfig& cfg) {
  write_echo(cfg);
  const auto maps = compute_image_maps(cfg);
  emit(cfg, maps.signal, "image");
  emit(cfg, maps.background, "background");
  emit(cfg, peak_normalized(background_subtract(maps.signal, maps.background)), "corrected");
  return 0;
}

int run_montecarlo(const RunConfig& cfg, const Options& o) {
  write_echo(cfg);
  ImageMaps maps;
  if (!o.signal_map.empty()) {
    maps.signal = load_map(o.signal_map);
    if (!o.background_map.empty()) {
      maps.background = load_map(o.background_map);
    } else {
      maps.background = maps.signal;
      for (double& v : maps.background.values.flat()) v = 0.0;
      maps.background.scale = 0.0;
    }
  } else {
    maps = compute_image_maps(cfg);
  }
  const auto gates = expected_gate_count(cfg.detector);
  const auto run = simulate_ghost_exposure(maps.signal, maps.background, cfg.detector, cfg.execution());
  std::cout << "expected gate openings " << gates << ", signal exposure opened "
            << run.signal.gates_opened << " gates, " << run.signal.detections << " detections, "
            << run.signal.dark_counts << " dark counts\n";
  emit(cfg, run.signal, "mc_signal");
  emit(cfg, run.background, "mc_background");
  emit(cfg, run.corrected, "mc_corrected");
  return 0;
}

int run_chsh(const RunConfig& cfg, bool verbose) {
  const auto singlet = make_bell(BellKind::psi_minus);
  const auto angles = cfg.chsh_angles();
  const Visibility vis(cfg.visibility);
  const double S = chsh_S(singlet, angles, vis);
  if (verbose) {
    auto line = [&](const char* name, PolarizerAngle p, PolarizerAngle q) {
      std::printf("E(%s) = %.6f\n", name, correlation_E(singlet, p.radians(), q.radians(), vis));
    };
    line("a,b", angles.a, angles.b);
    line("a,b'", angles.a, angles.b_prime);
    line("a',b", angles.a_prime, angles.b);
    line("a',b'", angles.a_prime, angles.b_prime);
  }
  std::printf("S = %.4f\n", S);
  return 0;
}

int run_validate() {
  int failures = 0;
  run_validation([&](const CheckResult& r) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << std::endl;
    failures += r.passed ? 0 : 1;
  });
  std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}

int run_amplitude(const RunConfig& cfg) {
  write_echo(cfg);
  const auto& p = cfg.source;
  const auto path = cfg.output_prefix + "_amplitude.txt";
  std::ofstream out(path, std::ios::binary);
  const char* axis = cfg.amplitude_axis == SlitAxis::x ? "x2" : "y2";
  out << "# ghostsim amplitude profile\n# x1=" << cfg.amplitude_x1 << " y1=" << cfg.amplitude_y1
      << " along=" << axis << " offset=" << cfg.amplitude_offset << "\n# " << axis
      << " re im abs" << (cfg.amplitude_oracle ? " oracle_re oracle_im" : "") << '\n';
  const auto n = cfg.amplitude_points;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = cfg.amplitude_from +
                     (cfg.amplitude_to - cfg.amplitude_from) * static_cast<double>(i) /
                         static_cast<double>(n - 1);
    const double x2 = cfg.amplitude_axis == SlitAxis::x ? t : cfg.amplitude_offset;
    const double y2 = cfg.amplitude_axis == SlitAxis::x ? cfg.amplitude_offset : t;
    const auto v = closed_form_amplitude(p, cfg.amplitude_x1, cfg.amplitude_y1, x2, y2).value;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g", t, v.real(), v.imag(), std::abs(v));
    out << buf;
    if (cfg.amplitude_oracle) {
      const auto q = quadrature_oracle_amplitude(p, cfg.amplitude_x1, cfg.amplitude_y1, x2, y2,
                                                 cfg.quad).value;
      std::snprintf(buf, sizeof buf, " %.17g %.17g", q.real(), q.imag());
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("cannot write " + path);
  std::cout << "wrote " << path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ghost imaging and ghost interference simulator for hyper-entangled photon pairs"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Flat key = value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", o.settings, "Override one configuration key (key=value); repeatable");
  app.add_option("-o,--output", o.output, "Output path prefix");
  app.add_option("--format", o.format, "Output format: matrix-text, graymap or both");
  app.add_option("--workers", o.workers, "Worker threads (0: hardware concurrency)");

  auto* interference = app.add_subcommand("interference", "Ghost interference map behind a double slit");
  interference->add_option("--axis", o.axis, "Slit separation axis (x or y)")
      ->check(CLI::IsMember({"x", "y"}));
  interference->add_option("--slit-separation", o.slit_d, "Slit separation d in metres");
  interference->add_option("--slit-width", o.slit_width, "Slit width in metres (0: ideal slits)");

  auto* image = app.add_subcommand("image", "Ghost image of a polarization-sensitive phase pattern");
  auto* montecarlo = app.add_subcommand("montecarlo", "Gated camera emulation of a ghost image");
  for (auto* sub : {image, montecarlo}) {
    sub->add_option("--delta1", o.delta1, "Polarizer 1 angle in degrees");
    sub->add_option("--delta2", o.delta2, "Polarizer 2 angle in degrees");
    sub->add_option("--pattern", o.pattern, "Phase pattern file (P2 graymap or matrix text)");
    sub->add_option("--phase-scale", o.phase_scale, "Radians per maximum gray value");
    sub->add_option("--relay-demagnification", o.relay, "Overall object-to-camera demagnification");
  }
  montecarlo->add_option("--seed", o.seed, "Random seed");
  montecarlo->add_option("--exposure", o.exposure, "Exposure time in seconds");
  montecarlo->add_option("--signal-map", o.signal_map, "Use a saved matrix-text map as the signal")
      ->check(CLI::ExistingFile);
  montecarlo->add_option("--background-map", o.background_map, "Saved background map")
      ->check(CLI::ExistingFile);

  auto* chsh = app.add_subcommand("chsh", "CHSH parameter S of the singlet state");
  chsh->add_option("--visibility", o.visibility, "Correlation visibility in [0, 1]");
  chsh->add_option("--a", o.a, "Angle a in degrees");
  chsh->add_option("--a-prime", o.a_prime, "Angle a' in degrees");
  chsh->add_option("--b", o.b, "Angle b in degrees");
  chsh->add_option("--b-prime", o.b_prime, "Angle b' in degrees");
  chsh->add_flag("-v,--verbose", o.verbose, "Print the four correlations");

  auto* validate_cmd = app.add_subcommand("validate", "Run the built-in self-checks");

  auto* amplitude = app.add_subcommand("amplitude", "Dump the two-photon amplitude along a line");
  amplitude->add_option("--x1", o.x1, "Photon 1 x in metres");
  amplitude->add_option("--y1", o.y1, "Photon 1 y in metres");
  amplitude->add_option("--along", o.axis, "Plane 2 axis to scan (x or y)")
      ->check(CLI::IsMember({"x", "y"}));
  amplitude->add_option("--from", o.from, "Scan start in metres");
  amplitude->add_option("--to", o.to, "Scan end in metres");
  amplitude->add_option("--offset", o.offset, "Fixed plane 2 coordinate on the other axis");
  amplitude->add_option("--points", o.points, "Number of samples");
  amplitude->add_flag("--oracle", o.oracle, "Also evaluate the quadrature oracle");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    // --along shares storage with --axis but targets a different key.
    std::optional<std::string> along;
    if (amplitude->parsed()) std::swap(along, o.axis);
    RunConfig cfg = resolve(o);
    if (along) {
      apply_setting(cfg, "amplitude.axis", *along);
    }
    if (interference->parsed()) return run_interference(cfg);
    if (image->parsed()) return run_image(cfg);
    if (montecarlo->parsed()) return run_montecarlo(cfg, o);
    if (chsh->parsed()) return run_chsh(cfg, o.verbose);
    if (validate_cmd->parsed()) return run_validate();
    if (amplitude->parsed()) return run_amplitude(cfg);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "error: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
