#include "bibfractal/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bibfractal/error.hpp"

namespace bib::io {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(!s.empty() && end == s.c_str() + s.size(), ErrorCode::ParseError, "not a number: '" + s + "'");
  return v;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  require(in.good(), ErrorCode::ParseError, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  require(out.good(), ErrorCode::InvalidArgument, "cannot write " + path);
  return out;
}

Complex parse_complex(const std::string& s) {
  require(!s.empty(), ErrorCode::ParseError, "empty coefficient");
  if (s.back() != 'i') return {to_double(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not part of an exponent.
  std::size_t split_at = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  auto imag_of = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return to_double(t);
  };
  if (split_at == std::string::npos) return {0.0, imag_of(body)};
  return {to_double(body.substr(0, split_at)), imag_of(body.substr(split_at))};
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Rgb basin_color(int label) {
  if (label == kUnresolved) return {0, 0, 0};
  static constexpr Rgb kPalette[] = {
      {230, 57, 70},   {42, 157, 143}, {69, 123, 157}, {244, 162, 97}, {131, 56, 236}, {255, 214, 10},
      {58, 134, 255},  {251, 86, 7},   {6, 214, 160},  {239, 71, 111}, {17, 138, 178}, {141, 153, 174},
  };
  constexpr int n = static_cast<int>(std::size(kPalette));
  if (label >= 0 && label < n) return kPalette[label];
  // Beyond the palette: distinct, never black.
  const auto h = static_cast<std::uint32_t>(label) * 2654435761u;
  return {static_cast<std::uint8_t>(64 + (h & 0x7f)), static_cast<std::uint8_t>(64 + ((h >> 8) & 0x7f)),
          static_cast<std::uint8_t>(64 + ((h >> 16) & 0x7f))};
}

void write_ppm(const std::string& path, const Image& image) {
  require(image.pixels.size() == static_cast<std::size_t>(image.width) * image.height,
          ErrorCode::ShapeMismatch, "pixel count does not match image size");
  auto out = open_out(path, std::ios::binary);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  for (const auto& p : image.pixels) {
    const char rgb[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    out.write(rgb, 3);
  }
}

Image read_ppm(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  auto token = [&]() {
    std::string t;
    while (true) {
      const int c = in.peek();
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    in >> t;
    return t;
  };
  require(token() == "P6", ErrorCode::ParseError, path + ": not a binary P6 pixmap");
  Image image;
  image.width = std::stoi(token());
  image.height = std::stoi(token());
  require(std::stoi(token()) == 255, ErrorCode::ParseError, path + ": only 8-bit pixmaps are supported");
  in.get();  // single whitespace before the raster
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
  for (auto& p : image.pixels) {
    char rgb[3];
    in.read(rgb, 3);
    require(in.good(), ErrorCode::ParseError, path + ": truncated raster");
    p = {static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]), static_cast<std::uint8_t>(rgb[2])};
  }
  return image;
}

Image basin_image(const ComplexGrid& grid) {
  Image image{grid.spec.nx, grid.spec.ny, {}};
  image.pixels.reserve(grid.spec.cell_count());
  for (int row = 0; row < grid.spec.ny; ++row) {
    const int j = grid.spec.ny - 1 - row;
    for (int i = 0; i < grid.spec.nx; ++i) image.pixels.push_back(basin_color(grid.label(i, j)));
  }
  return image;
}

Image mask_image(const GridSpec& spec, std::span<const std::uint8_t> mask) {
  require(mask.size() == spec.cell_count(), ErrorCode::ShapeMismatch, "mask size does not match grid");
  Image image{spec.nx, spec.ny, {}};
  image.pixels.reserve(mask.size());
  for (int row = 0; row < spec.ny; ++row) {
    const int j = spec.ny - 1 - row;
    for (int i = 0; i < spec.nx; ++i)
      image.pixels.push_back(mask[spec.index(i, j)] ? Rgb{255, 255, 255} : Rgb{0, 0, 0});
  }
  return image;
}

std::vector<int> labels_from_image(const Image& image, int root_count) {
  std::map<std::tuple<int, int, int>, int> lookup;
  lookup[{0, 0, 0}] = kUnresolved;
  for (int k = 0; k < root_count; ++k) {
    const auto c = basin_color(k);
    lookup[{c.r, c.g, c.b}] = k;
  }
  std::vector<int> labels(image.pixels.size());
  for (int row = 0; row < image.height; ++row) {
    const int j = image.height - 1 - row;
    for (int i = 0; i < image.width; ++i) {
      const auto& p = image.pixels[static_cast<std::size_t>(row) * image.width + i];
      const auto it = lookup.find({p.r, p.g, p.b});
      require(it != lookup.end(), ErrorCode::ParseError, "pixel color outside the basin palette");
      labels[static_cast<std::size_t>(j) * image.width + i] = it->second;
    }
  }
  return labels;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues values;
  std::string line;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    require(eq != std::string::npos, ErrorCode::ParseError, "expected key=value, got '" + text + "'");
    values[trim(std::string_view(text).substr(0, eq))] = trim(std::string_view(text).substr(eq + 1));
  }
  return values;
}

KeyValues read_key_values(const std::string& path) {
  auto in = open_in(path);
  return parse_key_values(in);
}

void write_key_values(const std::string& path, const KeyValues& values) {
  auto out = open_out(path);
  for (const auto& [k, v] : values) out << k << '=' << v << '\n';
}

std::vector<Complex> parse_coefficients(std::string_view text) {
  std::vector<Complex> coeffs;
  for (const auto& part : split(text, ',')) coeffs.push_back(parse_complex(part));
  return coeffs;
}

std::string format_coefficients(std::span<const Complex> coefficients) {
  std::string out;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (k) out += ',';
    const auto c = coefficients[k];
    out += format_double(c.real());
    if (c.imag() != 0.0) out += (c.imag() < 0 ? "" : "+") + format_double(c.imag()) + "i";
  }
  return out;
}

std::vector<double> parse_doubles(std::string_view text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(part));
  return out;
}

std::vector<int> parse_ints(std::string_view text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    int v = 0;
    const auto r = std::from_chars(part.data(), part.data() + part.size(), v);
    require(r.ec == std::errc{} && r.ptr == part.data() + part.size(), ErrorCode::ParseError,
            "not an integer: '" + part + "'");
    out.push_back(v);
  }
  return out;
}

KeyValues to_key_values(const BasinsMetadata& meta) {
  KeyValues kv;
  kv["poly"] = format_coefficients(meta.coefficients);
  kv["window"] = format_double(meta.spec.xmin()) + "," + format_double(meta.spec.xmax()) + "," +
                 format_double(meta.spec.ymin()) + "," + format_double(meta.spec.ymax());
  kv["resolution"] = std::to_string(meta.spec.nx) + "," + std::to_string(meta.spec.ny);
  kv["max_iters"] = std::to_string(meta.limits.max_iters);
  kv["convergence_radius"] = format_double(meta.limits.convergence_radius);
  kv["seed"] = "irrelevant";
  kv["tool_version"] = meta.tool_version;
  return kv;
}

BasinsMetadata basins_metadata(const KeyValues& values) {
  auto get = [&](const std::string& key) {
    const auto it = values.find(key);
    require(it != values.end(), ErrorCode::ParseError, "metadata lacks key " + key);
    return it->second;
  };
  BasinsMetadata meta;
  meta.coefficients = parse_coefficients(get("poly"));
  const auto w = parse_doubles(get("window"));
  const auto r = parse_ints(get("resolution"));
  require(w.size() == 4 && r.size() == 2, ErrorCode::ParseError, "malformed window or resolution");
  meta.spec = GridSpec::window(w[0], w[1], w[2], w[3], r[0], r[1]);
  if (values.count("max_iters")) meta.limits.max_iters = std::stoi(get("max_iters"));
  if (values.count("convergence_radius")) meta.limits.convergence_radius = to_double(get("convergence_radius"));
  if (values.count("tool_version")) meta.tool_version = get("tool_version");
  return meta;
}

std::string metadata_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ".meta";
  return path.substr(0, dot) + ".meta";
}

std::string pixmap_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ".ppm";
  return path.substr(0, dot) + ".ppm";
}

void save_basins(const std::string& ppm_path, const ComplexGrid& grid, const BasinsMetadata& meta) {
  write_ppm(ppm_path, basin_image(grid));
  write_key_values(metadata_path(ppm_path), to_key_values(meta));
}

LoadedBasins load_basins(const std::string& path) {
  const bool is_meta = path.size() >= 5 && path.substr(path.size() - 5) == ".meta";
  const auto meta_file = is_meta ? path : metadata_path(path);
  const auto ppm_file = is_meta ? pixmap_path(path) : path;
  LoadedBasins loaded;
  loaded.meta = basins_metadata(read_key_values(meta_file));
  const auto image = read_ppm(ppm_file);
  require(image.width == loaded.meta.spec.nx && image.height == loaded.meta.spec.ny, ErrorCode::ShapeMismatch,
          "pixmap size disagrees with metadata resolution");
  const int roots = static_cast<int>(loaded.meta.coefficients.size()) - 1;
  loaded.grid.spec = loaded.meta.spec;
  loaded.grid.root_count = roots;
  loaded.grid.labels = labels_from_image(image, roots);
  loaded.grid.iters.assign(loaded.grid.labels.size(), 0);
  return loaded;
}

nlohmann::json to_json(const Distribution& d) { return {{"labels", d.labels()}, {"probs", d.probs()}}; }

Distribution distribution_from_json(const nlohmann::json& j) {
  return Distribution(j.at("labels").get<std::vector<Label>>(), j.at("probs").get<std::vector<double>>());
}

nlohmann::json to_json(const LikelihoodTable& t) {
  return {{"h_labels", t.h_labels()}, {"d_labels", t.d_labels()}, {"rows", t.rows()}};
}

LikelihoodTable likelihood_from_json(const nlohmann::json& j) {
  return LikelihoodTable(j.at("h_labels").get<std::vector<Label>>(), j.at("d_labels").get<std::vector<Label>>(),
                         j.at("rows").get<std::vector<std::vector<double>>>());
}

nlohmann::json to_json(const JointTable& t) {
  return {{"h_labels", t.h_labels}, {"d_labels", t.d_labels}, {"rows", t.entries}};
}

nlohmann::json to_json(const BinaryRelation& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [h, d] : r.pairs()) pairs.push_back({h, d});
  return {{"theta", r.theta}, {"h_labels", r.h_labels}, {"d_labels", r.d_labels}, {"pairs", pairs}};
}

BinaryRelation relation_from_json(const nlohmann::json& j) {
  BinaryRelation r;
  r.theta = j.at("theta").get<double>();
  r.h_labels = j.at("h_labels").get<std::vector<Label>>();
  r.d_labels = j.at("d_labels").get<std::vector<Label>>();
  r.related.assign(r.h_labels.size() * r.d_labels.size(), 0);
  for (const auto& p : j.at("pairs")) {
    const auto h = std::find(r.h_labels.begin(), r.h_labels.end(), p.at(0).get<Label>());
    const auto d = std::find(r.d_labels.begin(), r.d_labels.end(), p.at(1).get<Label>());
    require(h != r.h_labels.end() && d != r.d_labels.end(), ErrorCode::ParseError, "relation pair uses unknown label");
    r.related[static_cast<std::size_t>(h - r.h_labels.begin()) * r.d_labels.size() +
              static_cast<std::size_t>(d - r.d_labels.begin())] = 1;
  }
  return r;
}

nlohmann::json to_json(const RoughApproximation& r) { return {{"lower", r.lower}, {"upper", r.upper}}; }

nlohmann::json to_json(const SwitchKernel& k) {
  return {{"kernel", k.p}, {"basins", k.basins}, {"samples", k.samples_per_row}, {"seed", k.seed}};
}

SwitchKernel kernel_from_json(const nlohmann::json& j) {
  auto kernel = make_kernel(j.at("kernel").get<std::vector<std::vector<double>>>());
  if (j.contains("basins")) kernel.basins = j.at("basins").get<std::vector<int>>();
  if (j.contains("samples")) kernel.samples_per_row = j.at("samples").get<std::size_t>();
  if (j.contains("seed")) kernel.seed = j.at("seed").get<std::uint64_t>();
  return kernel;
}

nlohmann::json to_json(const DimensionEstimate& e) {
  return {{"slope", e.slope}, {"r2", e.r2}, {"intercept", e.intercept}, {"box_sizes", e.box_sizes},
          {"counts", e.counts}};
}

nlohmann::json to_json(const MeasureReport& m) {
  nlohmann::json j = {{"basin_fractions", m.basin_fractions},
                      {"unresolved_fraction", m.unresolved_fraction},
                      {"boundary_fraction", m.boundary_fraction}};
  if (m.uncertain_fraction) j["uncertain_fraction"] = *m.uncertain_fraction;
  return j;
}

nlohmann::json to_json(const PowerLawFit& f) {
  return {{"alpha", f.alpha},       {"x_min", f.x_min},     {"tail_count", f.tail_count}, {"ks", f.ks_distance},
          {"std_error", f.std_error}, {"ci_low", f.ci_low}, {"ci_high", f.ci_high}};
}

nlohmann::json to_json(const DwellStats& s) {
  nlohmann::json means = nlohmann::json::array(), medians = nlohmann::json::array(),
                 errors = nlohmann::json::array(), counts = nlohmann::json::array();
  for (std::size_t k = 0; k < s.samples.size(); ++k) {
    means.push_back(number_or_null(s.means[k]));
    medians.push_back(number_or_null(s.medians[k]));
    errors.push_back(number_or_null(s.std_errors[k]));
    counts.push_back(s.samples[k].size());
  }
  nlohmann::json j = {{"kind", "dwell"},     {"switches", s.switches}, {"means", means},
                      {"medians", medians}, {"std_errors", errors},   {"counts", counts}};
  j["tail"] = s.tail ? to_json(*s.tail) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const DiffusionStats& s) {
  nlohmann::json msd = nlohmann::json::array();
  for (const auto& [lag, v] : s.msd) msd.push_back({lag, v});
  nlohmann::json j = {{"kind", "diffusion"},
                      {"alpha", s.alpha},
                      {"alpha_r2", s.alpha_r2},
                      {"fit_lags", {s.fit_lag_min, s.fit_lag_max}},
                      {"runs", s.run_lengths.size()},
                      {"msd", msd}};
  j["mu"] = s.tail ? to_json(*s.tail) : nlohmann::json(nullptr);
  return j;
}

std::vector<nlohmann::json> read_json_lines(const std::string& path) {
  auto in = open_in(path);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, path + ": " + e.what());
    }
  }
  return out;
}

void write_log_csv(std::ostream& out, const TrajectoryLog& log) {
  if (log.kind() == TrajectoryLog::Kind::Percept) {
    out << "t,percept,event\n";
    for (const auto& r : log.records()) out << r.t << ',' << r.percept << ',' << to_string(r.tag) << '\n';
  } else {
    out << "t,x,y,event\n";
    for (const auto& r : log.records())
      out << r.t << ',' << format_double(r.x) << ',' << format_double(r.y) << ',' << to_string(r.tag) << '\n';
  }
}

void write_log_csv(const std::string& path, const TrajectoryLog& log) {
  auto out = open_out(path);
  write_log_csv(out, log);
}

TrajectoryLog read_log_csv(std::istream& in) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), ErrorCode::ParseError, "empty log");
  const auto columns = split(header, ',');
  const bool position = columns == std::vector<std::string>{"t", "x", "y", "event"};
  require(position || columns == std::vector<std::string>{"t", "percept", "event"}, ErrorCode::ParseError,
          "unrecognized log header '" + trim(header) + "'");
  TrajectoryLog log(position ? TrajectoryLog::Kind::Position : TrajectoryLog::Kind::Percept);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    require(f.size() == columns.size(), ErrorCode::ParseError, "malformed log line '" + line + "'");
    TrajectoryRecord r;
    r.t = std::stoll(f[0]);
    if (position) {
      r.x = to_double(f[1]);
      r.y = to_double(f[2]);
    } else {
      r.percept = std::stoi(f[1]);
    }
    r.tag = parse_event(f.back());
    r.flags = static_cast<std::uint8_t>(r.tag);
    log.append(r);
  }
  return log;
}

TrajectoryLog read_log_csv(const std::string& path) {
  auto in = open_in(path);
  return read_log_csv(in);
}

}  // namespace bib::io
