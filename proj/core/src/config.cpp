#include "ghost/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "ghost/error.hpp"

namespace ghost {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  // shortest text that reads back to the same double
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
  return d;
}

std::size_t to_size(const std::string& v) {
  if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
  std::size_t used = 0;
  const auto n = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return static_cast<std::size_t>(n);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument(v);
}

SlitAxis to_axis(const std::string& v) {
  if (v == "x") return SlitAxis::x;
  if (v == "y") return SlitAxis::y;
  throw std::invalid_argument(v);
}

std::string axis_name(SlitAxis a) { return a == SlitAxis::x ? "x" : "y"; }

#define GS_DOUBLE(name, member)                                                       \
  Field {                                                                             \
    name, [](RunConfig& c, const std::string& v) { c.member = to_double(v); },        \
        [](const RunConfig& c) { return fmt(c.member); }                              \
  }
#define GS_SIZE(name, member)                                                         \
  Field {                                                                             \
    name, [](RunConfig& c, const std::string& v) { c.member = to_size(v); },          \
        [](const RunConfig& c) { return std::to_string(c.member); }                   \
  }
#define GS_BOOL(name, member)                                                         \
  Field {                                                                             \
    name, [](RunConfig& c, const std::string& v) { c.member = to_bool(v); },          \
        [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }   \
  }
#define GS_AXIS(name, member)                                                         \
  Field {                                                                             \
    name, [](RunConfig& c, const std::string& v) { c.member = to_axis(v); },          \
        [](const RunConfig& c) { return axis_name(c.member); }                        \
  }
#define GS_STRING(name, member)                                                       \
  Field {                                                                             \
    name, [](RunConfig& c, const std::string& v) { c.member = v; },                   \
        [](const RunConfig& c) { return c.member; }                                   \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      GS_DOUBLE("source.wavelength", source.wavelength),
      GS_DOUBLE("source.sigma", source.sigma),
      GS_DOUBLE("source.w", source.w),
      GS_DOUBLE("source.s1", source.s1),
      GS_DOUBLE("source.s2", source.s2),
      GS_DOUBLE("lens.f", lens_f),
      GS_DOUBLE("lens.u", lens_u),
      GS_DOUBLE("lens.v", lens_v),
      GS_DOUBLE("lens.aperture_radius", aperture_radius),
      GS_DOUBLE("relay.demagnification", relay_demagnification),
      GS_DOUBLE("polarizer.delta1", delta1_deg),
      GS_DOUBLE("polarizer.delta2", delta2_deg),
      GS_DOUBLE("polarizer.visibility", visibility),
      GS_DOUBLE("chsh.a", chsh_a_deg),
      GS_DOUBLE("chsh.a_prime", chsh_a_prime_deg),
      GS_DOUBLE("chsh.b", chsh_b_deg),
      GS_DOUBLE("chsh.b_prime", chsh_b_prime_deg),
      GS_DOUBLE("slit.d", slit_d),
      GS_AXIS("slit.axis", slit_axis),
      GS_DOUBLE("slit.width", slit_width),
      GS_SIZE("interference.nx", interference_grid.nx),
      GS_SIZE("interference.ny", interference_grid.ny),
      GS_DOUBLE("interference.extent_x", interference_grid.extent_x),
      GS_DOUBLE("interference.extent_y", interference_grid.extent_y),
      GS_DOUBLE("interference.center_x", interference_grid.center_x),
      GS_DOUBLE("interference.center_y", interference_grid.center_y),
      GS_SIZE("image.nx", image_grid.nx),
      GS_SIZE("image.ny", image_grid.ny),
      GS_DOUBLE("image.extent_x", image_grid.extent_x),
      GS_DOUBLE("image.extent_y", image_grid.extent_y),
      GS_DOUBLE("image.center_x", image_grid.center_x),
      GS_DOUBLE("image.center_y", image_grid.center_y),
      GS_STRING("pattern.path", pattern_path),
      GS_SIZE("pattern.nx", pattern_nx),
      GS_SIZE("pattern.ny", pattern_ny),
      GS_DOUBLE("pattern.pitch", pattern_pitch),
      GS_DOUBLE("pattern.phase_scale", pattern_phase_scale),
      GS_SIZE("quad.nodes", quad.nodes),
      GS_DOUBLE("quad.half_width_sigmas", quad.half_width_sigmas),
      GS_DOUBLE("quad.aperture_node_spacing", quad.aperture_node_spacing),
      GS_SIZE("quad.panel_order", quad.panel_order),
      GS_SIZE("quad.pattern_supersample", quad.pattern_supersample),
      GS_BOOL("quad.verify_supersample", quad.verify_supersample),
      GS_DOUBLE("quad.tolerance", quad.tolerance),
      GS_BOOL("quad.check_convergence", quad.check_convergence),
      GS_DOUBLE("detector.trigger_rate", detector.trigger_rate),
      GS_DOUBLE("detector.gate_width", detector.gate_width),
      GS_DOUBLE("detector.gate_delay", detector.gate_delay),
      GS_DOUBLE("detector.exposure", detector.exposure),
      GS_DOUBLE("detector.pair_detection_prob", detector.pair_detection_prob),
      GS_DOUBLE("detector.dark_rate", detector.dark_rate),
      Field{"detector.seed",
            [](RunConfig& c, const std::string& v) { c.detector.seed = std::stoull(v); },
            [](const RunConfig& c) { return std::to_string(c.detector.seed); }},
      GS_DOUBLE("amplitude.x1", amplitude_x1),
      GS_DOUBLE("amplitude.y1", amplitude_y1),
      GS_AXIS("amplitude.axis", amplitude_axis),
      GS_DOUBLE("amplitude.from", amplitude_from),
      GS_DOUBLE("amplitude.to", amplitude_to),
      GS_SIZE("amplitude.points", amplitude_points),
      GS_DOUBLE("amplitude.offset", amplitude_offset),
      GS_BOOL("amplitude.oracle", amplitude_oracle),
      GS_STRING("output.prefix", output_prefix),
      Field{"output.format",
            [](RunConfig& c, const std::string& v) {
              c.output_both_formats = v == "both";
              if (!c.output_both_formats) c.output_format = parse_map_format(v);
            },
            [](const RunConfig& c) {
              return c.output_both_formats ? std::string("both")
                                           : std::string(format_name(c.output_format));
            }},
      GS_SIZE("run.workers", workers),
  };
  return table;
}

#undef GS_DOUBLE
#undef GS_SIZE
#undef GS_BOOL
#undef GS_AXIS
#undef GS_STRING

}  // namespace

LensSystem RunConfig::lens() const {
  LensSystem l = lens_v > 0.0 ? LensSystem{lens_f, lens_u, lens_v, CircularAperture{aperture_radius}}
                              : LensSystem::thin_lens(lens_f, lens_u, CircularAperture{aperture_radius});
  return l;
}

ChshAngles RunConfig::chsh_angles() const {
  return {PolarizerAngle::from_degrees(chsh_a_deg), PolarizerAngle::from_degrees(chsh_a_prime_deg),
          PolarizerAngle::from_degrees(chsh_b_deg), PolarizerAngle::from_degrees(chsh_b_prime_deg)};
}

DoubleSlit RunConfig::slit() const { return DoubleSlit{slit_d, slit_axis, slit_width, 0.0}; }

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, int line) {
  const std::string k = trim(key), v = trim(value);
  for (const auto& f : fields()) {
    if (k != f.key) continue;
    try {
      f.set(cfg, v);
    } catch (const ParseError& e) {
      throw ParseError(std::string(k) + ": " + e.what(), line);
    } catch (const std::exception&) {
      throw ParseError("invalid value '" + v + "' for " + k, line);
    }
    return;
  }
  throw ParseError("unknown key '" + k + "'", line);
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1), lineno);
  }
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_run_config(ss.str(), std::move(base));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string config_echo(const RunConfig& cfg) {
  std::string out = "# ghostsim resolved configuration (SI units, angles in degrees)\n";
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  return out;
}

void validate(const RunConfig& cfg) {
  validate(cfg.source);
  cfg.detector.validate();
  cfg.slit().validate();
  cfg.interference_grid.validate();
  if (cfg.image_grid.nx < 2 || cfg.image_grid.ny < 2)
    throw ParameterError("image grid needs at least 2 x 2 pixels");
  if (cfg.image_grid.extent_x < 0.0 || cfg.image_grid.extent_y < 0.0)
    throw ParameterError("image grid extents must be positive (or 0 for automatic)");
  if (cfg.pattern_nx == 0 || cfg.pattern_ny == 0 || !(cfg.pattern_pitch > 0.0))
    throw ParameterError("pattern needs a positive size and pitch");
  if (cfg.amplitude_points < 2) throw ParameterError("amplitude profile needs at least 2 points");
  (void)Visibility(cfg.visibility);
  validate(cfg.lens(), cfg.lens_v <= 0.0);
  if (cfg.relay_demagnification < 0.0) throw ParameterError("relay demagnification must be >= 0");
}

}  // namespace ghost
