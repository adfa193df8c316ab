#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bibfractal/bayes.hpp"
#include "bibfractal/bib_loop.hpp"
#include "bibfractal/fractal_metrics.hpp"
#include "bibfractal/inverse_bayes.hpp"
#include "bibfractal/newton.hpp"
#include "bibfractal/perception.hpp"
#include "bibfractal/rough_partition.hpp"
#include "bibfractal/walker.hpp"

namespace bib::io {

inline constexpr std::string_view kToolVersion = "0.3.1";

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Fixed color per basin index; black for kUnresolved.
Rgb basin_color(int label);

/// Binary P6 pixmap, 8-bit. Pixels row-major with the top row first.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
};

void write_ppm(const std::string& path, const Image& image);
Image read_ppm(const std::string& path);

/// Top image row is the grid's largest imaginary part.
Image basin_image(const ComplexGrid& grid);
Image mask_image(const GridSpec& spec, std::span<const std::uint8_t> mask);
/// Inverse of basin_image for a grid with root_count roots. Throws ParseError
/// on colors outside the palette.
std::vector<int> labels_from_image(const Image& image, int root_count);

using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::string& path);
void write_key_values(const std::string& path, const KeyValues& values);

/// Accepts comma-separated entries, each real ("-1", "2.5e-3") or complex
/// ("1+2i", "-0.5-1.5i", "3i"). Constant term first.
std::vector<Complex> parse_coefficients(std::string_view text);
std::string format_coefficients(std::span<const Complex> coefficients);
std::vector<double> parse_doubles(std::string_view text);
std::vector<int> parse_ints(std::string_view text);

/// Sidecar written next to a basin pixmap.
struct BasinsMetadata {
  std::vector<Complex> coefficients;
  GridSpec spec;
  IterationLimits limits;
  std::string tool_version{kToolVersion};
};

KeyValues to_key_values(const BasinsMetadata& meta);
BasinsMetadata basins_metadata(const KeyValues& values);

/// Sidecar path for a pixmap path: "x.ppm" -> "x.meta".
std::string metadata_path(const std::string& path);
/// Pixmap path for a metadata path: "x.meta" -> "x.ppm".
std::string pixmap_path(const std::string& path);

void save_basins(const std::string& ppm_path, const ComplexGrid& grid, const BasinsMetadata& meta);

struct LoadedBasins {
  ComplexGrid grid;
  BasinsMetadata meta;
};
/// Accepts either member of the pixmap/metadata pair.
LoadedBasins load_basins(const std::string& path);

nlohmann::json to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LikelihoodTable& t);
LikelihoodTable likelihood_from_json(const nlohmann::json& j);
nlohmann::json to_json(const JointTable& t);
nlohmann::json to_json(const BinaryRelation& r);
BinaryRelation relation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RoughApproximation& r);
nlohmann::json to_json(const SwitchKernel& k);
SwitchKernel kernel_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DimensionEstimate& e);
nlohmann::json to_json(const MeasureReport& m);
nlohmann::json to_json(const PowerLawFit& f);
nlohmann::json to_json(const DwellStats& s);
nlohmann::json to_json(const DiffusionStats& s);

/// Reads every nonblank line of a JSON-lines file.
std::vector<nlohmann::json> read_json_lines(const std::string& path);

/// Percept logs: "t,percept,event"; position logs: "t,x,y,event". Positions
/// use 17 significant digits so a reload reproduces them exactly.
void write_log_csv(std::ostream& out, const TrajectoryLog& log);
void write_log_csv(const std::string& path, const TrajectoryLog& log);
TrajectoryLog read_log_csv(std::istream& in);
TrajectoryLog read_log_csv(const std::string& path);

}  // namespace bib::io
