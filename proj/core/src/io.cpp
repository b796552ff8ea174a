#include "ghost/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ghost/error.hpp"

namespace ghost {
namespace {

std::string format_double(double v) {
  // shortest text that reads back to the same double
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& token, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError("non-numeric token '" + token + "'", line);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

Header geometry_header(const MapGeometry& g) {
  return {{"nx", std::to_string(g.nx)},          {"ny", std::to_string(g.ny)},
          {"pitch_x", format_double(g.pitch_x)}, {"pitch_y", format_double(g.pitch_y)},
          {"origin_x", format_double(g.origin_x)}, {"origin_y", format_double(g.origin_y)}};
}

double header_double(const std::map<std::string, std::string>& h, const std::string& key,
                     double fallback) {
  auto it = h.find(key);
  return it == h.end() ? fallback : parse_double(it->second, 0);
}

bool is_graymap(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string magic;
  in >> magic;
  return magic == "P2";
}

template <typename T>
Grid2D<double> to_double(const Grid2D<T>& g) {
  Grid2D<double> out(g.nx(), g.ny());
  for (std::size_t n = 0; n < g.size(); ++n) out.flat()[n] = static_cast<double>(g.flat()[n]);
  return out;
}

void write_grid(const Grid2D<double>& values, const std::filesystem::path& path,
                MapFormat format, Header header) {
  if (format == MapFormat::matrix_text) {
    write_matrix_text(path, values, header);
  } else {
    write_graymap(path, values);
  }
}

}  // namespace

MapFormat parse_map_format(std::string_view name) {
  if (name == "matrix-text" || name == "matrix" || name == "txt") return MapFormat::matrix_text;
  if (name == "graymap" || name == "pgm") return MapFormat::graymap;
  throw ParseError("unknown output format '" + std::string(name) + "' (matrix-text|graymap)");
}

std::string_view format_name(MapFormat format) {
  return format == MapFormat::matrix_text ? "matrix-text" : "graymap";
}

MatrixText read_matrix_text(const std::filesystem::path& path) {
  auto in = open_input(path);
  MatrixText result;
  std::vector<double> data;
  std::size_t cols = 0, rows = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string kv;
      while (hs >> kv) {
        const auto eq = kv.find('=');
        if (eq != std::string::npos && eq > 0) result.header[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      continue;
    }
    std::istringstream ls(line);
    std::string token;
    std::size_t n = 0;
    while (ls >> token) {
      data.push_back(parse_double(token, lineno));
      ++n;
    }
    if (rows == 0) cols = n;
    else if (n != cols)
      throw ParseError("row has " + std::to_string(n) + " values, expected " + std::to_string(cols),
                       lineno);
    ++rows;
  }
  if (rows == 0 || cols == 0) throw ParseError("matrix file " + path.string() + " has no data");
  result.values = Grid2D<double>(cols, rows);
  std::copy(data.begin(), data.end(), result.values.flat().begin());
  return result;
}

void write_matrix_text(const std::filesystem::path& path, const Grid2D<double>& values,
                       const Header& header) {
  auto out = open_output(path);
  out << "# ghostsim matrix-text v1\n";
  for (const auto& [k, v] : header) {
    std::string value = v;
    std::replace(value.begin(), value.end(), ' ', '_');
    out << "# " << k << '=' << value << '\n';
  }
  for (std::size_t iy = 0; iy < values.ny(); ++iy) {
    const auto row = values.row(iy);
    for (std::size_t ix = 0; ix < row.size(); ++ix) {
      if (ix) out << ' ';
      out << format_double(row[ix]);
    }
    out << '\n';
  }
  finish(out, path);
}

Graymap read_graymap(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  std::vector<int> token_lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) {
      tokens.push_back(t);
      token_lines.push_back(lineno);
    }
  }
  if (tokens.size() < 4 || tokens[0] != "P2") throw ParseError("not an ASCII graymap (P2)", 1);
  auto as_int = [&](std::size_t i) {
    const double v = parse_double(tokens[i], token_lines[i]);
    if (v < 0 || v != std::floor(v)) throw ParseError("expected a non-negative integer", token_lines[i]);
    return static_cast<long long>(v);
  };
  const auto width = as_int(1), height = as_int(2), maxval = as_int(3);
  if (width <= 0 || height <= 0) throw ParseError("graymap has an empty grid", token_lines[1]);
  if (maxval <= 0 || maxval > 65535) throw ParseError("graymap maxval out of range", token_lines[3]);
  const auto expected = static_cast<std::size_t>(width * height);
  if (tokens.size() - 4 != expected)
    throw ParseError("graymap has " + std::to_string(tokens.size() - 4) + " pixels, expected " +
                     std::to_string(expected), lineno);
  Graymap g;
  g.max_gray = static_cast<int>(maxval);
  g.values = Grid2D<double>(static_cast<std::size_t>(width), static_cast<std::size_t>(height));
  for (std::size_t n = 0; n < expected; ++n) {
    const auto v = as_int(4 + n);
    if (v > maxval) throw ParseError("gray value exceeds maxval", token_lines[4 + n]);
    g.values.flat()[n] = static_cast<double>(v);
  }
  return g;
}

bool write_graymap(const std::filesystem::path& path, const Grid2D<double>& values, int max_gray) {
  if (max_gray <= 0 || max_gray > 65535) throw ParameterError("max_gray must be in 1..65535");
  double peak = 0.0, lowest = 0.0;
  std::size_t clipped = 0;
  for (double v : values.flat()) {
    peak = std::max(peak, v);
    if (v < 0.0) {
      ++clipped;
      lowest = std::min(lowest, v);
    }
  }
  auto out = open_output(path);
  out << "P2\n" << values.nx() << ' ' << values.ny() << '\n' << max_gray << '\n';
  for (std::size_t iy = 0; iy < values.ny(); ++iy) {
    const auto row = values.row(iy);
    for (std::size_t ix = 0; ix < row.size(); ++ix) {
      const double v = std::max(0.0, row[ix]);
      const long g = peak > 0.0 ? std::lround(v / peak * max_gray) : 0;
      if (ix) out << ' ';
      out << g;
    }
    out << '\n';
  }
  finish(out, path);
  if (clipped > 0) {
    auto note_path = path;
    note_path += ".note";
    auto note = open_output(note_path);
    note << "negative values clipped at 0: " << clipped << " pixels, minimum " << format_double(lowest)
         << ", scale " << format_double(peak) << " -> " << max_gray << '\n';
    finish(note, note_path);
  }
  return clipped > 0;
}

PhasePattern load_pattern(const std::filesystem::path& path, const PatternLoadOptions& options) {
  if (!(options.pitch > 0.0)) throw ParameterError("pattern pitch must be positive");
  if (!std::isfinite(options.phase_scale)) throw ParameterError("phase scale must be finite");
  PhasePattern p;
  Grid2D<double> gray;
  double g_max = 0.0;
  bool verbatim = false;
  double pitch = options.pitch;
  std::optional<double> ox, oy;
  if (is_graymap(path)) {
    auto g = read_graymap(path);
    g_max = g.max_gray;
    gray = std::move(g.values);
  } else {
    auto m = read_matrix_text(path);
    gray = std::move(m.values);
    verbatim = m.header.count("kind") && m.header.at("kind") == "phase";
    pitch = header_double(m.header, "pitch", pitch);
    if (m.header.count("origin_x")) ox = header_double(m.header, "origin_x", 0.0);
    if (m.header.count("origin_y")) oy = header_double(m.header, "origin_y", 0.0);
    if (!verbatim) {
      for (double v : gray.flat())
        if (v < 0.0) throw ParseError("negative gray value in " + path.string());
      g_max = m.header.count("max_gray") ? header_double(m.header, "max_gray", 0.0)
                                         : *std::max_element(gray.flat().begin(), gray.flat().end());
    }
  }
  const std::size_t nx = gray.nx(), ny = gray.ny();
  p = PhasePattern::uniform(nx, ny, pitch, 0.0);
  if (ox) p.origin_x = *ox;
  if (oy) p.origin_y = *oy;
  for (std::size_t n = 0; n < gray.size(); ++n) {
    const double g = gray.flat()[n];
    p.phase.flat()[n] = verbatim ? g : (g_max > 0.0 ? options.phase_scale * g / g_max : 0.0);
  }
  auto aperture_path = path;
  aperture_path += ".aperture";
  if (verbatim && std::filesystem::exists(aperture_path)) {
    auto a = read_matrix_text(aperture_path);
    if (!a.values.same_shape(p.phase))
      throw GridMismatchError("aperture sidecar does not match the phase grid");
    p.aperture = std::move(a.values);
  }
  p.validate();
  return p;
}

void save_pattern(const PhasePattern& pattern, const std::filesystem::path& path) {
  pattern.validate();
  Header h{{"kind", "phase"},
           {"units", "rad"},
           {"pitch", format_double(pattern.pitch)},
           {"origin_x", format_double(pattern.origin_x)},
           {"origin_y", format_double(pattern.origin_y)}};
  write_matrix_text(path, pattern.phase, h);
  const bool open = std::all_of(pattern.aperture.flat().begin(), pattern.aperture.flat().end(),
                                [](double a) { return a == 1.0; });
  auto aperture_path = path;
  aperture_path += ".aperture";
  if (!open) write_matrix_text(aperture_path, pattern.aperture, {{"kind", "aperture"}});
  else if (std::filesystem::exists(aperture_path)) std::filesystem::remove(aperture_path);
}

void save_map(const CoincidenceMap& map, const std::filesystem::path& path, MapFormat format) {
  Header h{{"kind", "coincidence"}};
  for (auto& kv : geometry_header(map.geometry)) h.push_back(kv);
  h.emplace_back("scale", format_double(map.scale));
  h.emplace_back("delta1_deg", map.delta1 ? format_double(map.delta1->degrees()) : "none");
  h.emplace_back("delta2_deg", map.delta2 ? format_double(map.delta2->degrees()) : "none");
  h.emplace_back("normalization", "peak=1");
  if (!map.note.empty()) h.emplace_back("note", map.note);
  write_grid(map.values, path, format, std::move(h));
}

void save_map(const SignedMap& map, const std::filesystem::path& path, MapFormat format) {
  Header h{{"kind", "signed"}};
  for (auto& kv : geometry_header(map.geometry)) h.push_back(kv);
  if (!map.note.empty()) h.emplace_back("note", map.note);
  write_grid(map.values, path, format, std::move(h));
}

void save_map(const CountFrame& frame, const std::filesystem::path& path, MapFormat format) {
  Header h{{"kind", "counts"}};
  for (auto& kv : geometry_header(frame.geometry)) h.push_back(kv);
  h.emplace_back("gates_opened", std::to_string(frame.gates_opened));
  h.emplace_back("detections", std::to_string(frame.detections));
  h.emplace_back("dark_counts", std::to_string(frame.dark_counts));
  h.emplace_back("exposure", format_double(frame.exposure));
  h.emplace_back("seed", std::to_string(frame.seed));
  write_grid(to_double(frame.counts), path, format, std::move(h));
}

void save_map(const SignedCountImage& image, const std::filesystem::path& path, MapFormat format) {
  Header h{{"kind", "signed_counts"}};
  for (auto& kv : geometry_header(image.geometry)) h.push_back(kv);
  write_grid(to_double(image.counts), path, format, std::move(h));
}

CoincidenceMap load_map(const std::filesystem::path& path) {
  auto m = read_matrix_text(path);
  CoincidenceMap map;
  map.geometry.nx = m.values.nx();
  map.geometry.ny = m.values.ny();
  map.geometry.pitch_x = header_double(m.header, "pitch_x", 1.0);
  map.geometry.pitch_y = header_double(m.header, "pitch_y", 1.0);
  map.geometry.origin_x = header_double(m.header, "origin_x", 0.0);
  map.geometry.origin_y = header_double(m.header, "origin_y", 0.0);
  map.scale = header_double(m.header, "scale", 1.0);
  auto angle = [&](const char* key) -> std::optional<PolarizerAngle> {
    auto it = m.header.find(key);
    if (it == m.header.end() || it->second == "none") return std::nullopt;
    return PolarizerAngle::from_degrees(parse_double(it->second, 0));
  };
  map.delta1 = angle("delta1_deg");
  map.delta2 = angle("delta2_deg");
  if (auto it = m.header.find("note"); it != m.header.end()) map.note = it->second;
  for (double v : m.values.flat())
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParseError("coincidence map has a negative value");
  map.values = std::move(m.values);
  return map;
}

}  // namespace ghost
