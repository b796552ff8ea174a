#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ghost/detector.hpp"
#include "ghost/experiments.hpp"
#include "ghost/grid.hpp"

namespace ghost {

enum class MapFormat { matrix_text, graymap };

MapFormat parse_map_format(std::string_view name);
std::string_view format_name(MapFormat format);

using Header = std::vector<std::pair<std::string, std::string>>;

/// Plain-text matrix: '#'-prefixed header lines holding key=value pairs,
/// then one row of space-separated numbers per y (row 0 first). UTF-8, LF.
struct MatrixText {
  Grid2D<double> values;
  std::map<std::string, std::string> header;
};

MatrixText read_matrix_text(const std::filesystem::path& path);
void write_matrix_text(const std::filesystem::path& path, const Grid2D<double>& values,
                       const Header& header);

/// ASCII portable graymap ("P2"). The first pixel row in the file is y index 0.
struct Graymap {
  Grid2D<double> values;
  int max_gray = 255;
};

Graymap read_graymap(const std::filesystem::path& path);

/// Rescales linearly so that the largest value maps to max_gray. Negative
/// values are clipped at 0 and reported in a sidecar "<path>.note" file.
/// Returns true when clipping happened.
bool write_graymap(const std::filesystem::path& path, const Grid2D<double>& values,
                   int max_gray = 255);

struct PatternLoadOptions {
  double phase_scale = 3.141592653589793;  // radians per max gray
  double pitch = 62.5e-6;                   // used when the file carries no pitch
};

/// Loads a phase pattern from a P2 graymap or a matrix-text file. Gray value
/// g becomes phi = phase_scale * g / g_max (g_max: the graymap maxval, a
/// "max_gray" header entry, or the largest value). Matrix files written by
/// save_pattern (header kind=phase) are read back verbatim. The pattern is
/// centred on the optical axis unless the file records an origin; the
/// aperture is 1 everywhere unless an "aperture" sidecar was saved.
PhasePattern load_pattern(const std::filesystem::path& path, const PatternLoadOptions& options = {});

/// Writes phi in radians (matrix-text, kind=phase) so that load_pattern
/// reproduces it exactly.
void save_pattern(const PhasePattern& pattern, const std::filesystem::path& path);

void save_map(const CoincidenceMap& map, const std::filesystem::path& path, MapFormat format);
void save_map(const SignedMap& map, const std::filesystem::path& path, MapFormat format);
void save_map(const CountFrame& frame, const std::filesystem::path& path, MapFormat format);
void save_map(const SignedCountImage& image, const std::filesystem::path& path, MapFormat format);

/// Reads a matrix-text map written by save_map(CoincidenceMap, ...).
CoincidenceMap load_map(const std::filesystem::path& path);

}  // namespace ghost
