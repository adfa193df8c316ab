#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bibfractal/error.hpp"
#include "bibfractal/io.hpp"

using namespace bib;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "bibfractal_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("coefficient parsing") {
  const auto c = io::parse_coefficients("-1, 0, 0, 1");
  CHECK(c == std::vector<Complex>{-1.0, 0.0, 0.0, 1.0});
  const auto z = io::parse_coefficients("1+2i,-0.5-1.5i,3i,-i,2.5e-3");
  CHECK(z[0] == Complex(1, 2));
  CHECK(z[1] == Complex(-0.5, -1.5));
  CHECK(z[2] == Complex(0, 3));
  CHECK(z[3] == Complex(0, -1));
  CHECK(z[4] == Complex(2.5e-3, 0));
  CHECK(io::parse_coefficients(io::format_coefficients(z)) == z);
  CHECK_THROWS_AS(io::parse_coefficients("1,,2"), Error);
  CHECK_THROWS_AS(io::parse_coefficients("x"), Error);
  CHECK(io::parse_doubles("-2,2,-1.5,1.5") == std::vector<double>{-2, 2, -1.5, 1.5});
  CHECK(io::parse_ints("2,4,8") == std::vector<int>{2, 4, 8});
}

TEST_CASE("key=value files") {
  std::istringstream in("# comment\npoly = -1,0,0,1\n\nseed=4\n");
  const auto kv = io::parse_key_values(in);
  CHECK(kv.at("poly") == "-1,0,0,1");
  CHECK(kv.at("seed") == "4");
  std::istringstream bad("novalue\n");
  CHECK_THROWS_AS(io::parse_key_values(bad), Error);
}

TEST_CASE("basins round trip through pixmap and sidecar") {
  const auto map = PolynomialMap::cubic_unity();
  const auto spec = GridSpec::window(-2, 2, -1.5, 1.5, 40, 30);
  const auto grid = label_grid(map, spec, {60, 1e-9});
  io::BasinsMetadata meta{{map.coefficients().begin(), map.coefficients().end()}, spec, {60, 1e-9}};
  const auto path = scratch("basins.ppm").string();
  io::save_basins(path, grid, meta);
  CHECK(io::metadata_path(path) == scratch("basins.meta").string());
  for (const auto& which : {path, io::metadata_path(path)}) {
    const auto loaded = io::load_basins(which);
    CHECK(loaded.grid.labels == grid.labels);
    CHECK(loaded.grid.spec == spec);
    CHECK(loaded.meta.limits.max_iters == 60);
    CHECK(loaded.meta.coefficients == meta.coefficients);
  }
  const auto kv = io::read_key_values(io::metadata_path(path));
  CHECK(kv.at("seed") == "irrelevant");
  CHECK(kv.at("tool_version") == io::kToolVersion);

  const auto image = io::basin_image(grid);
  // top image row holds the largest imaginary part
  CHECK(image.pixels[0] == io::basin_color(grid.labels[spec.index(0, spec.ny - 1)]));
  CHECK(io::basin_color(kUnresolved) == io::Rgb{0, 0, 0});
}

TEST_CASE("pixmap errors") {
  const auto path = scratch("bad.ppm");
  {
    std::ofstream out(path);
    out << "P3\n1 1\n255\n0 0 0\n";
  }
  CHECK_THROWS_AS(io::read_ppm(path.string()), Error);
  CHECK_THROWS_AS(io::read_ppm(scratch("missing.ppm").string()), Error);
}

TEST_CASE("json round trips") {
  const auto m = cyclic_model(3, 0.6);
  CHECK(io::distribution_from_json(io::to_json(m.prior)) == m.prior);
  CHECK(io::likelihood_from_json(io::to_json(m.likelihood)) == m.likelihood);
  const auto relation = build_relation(joint_from(m.prior, m.likelihood), 0.1);
  CHECK(io::relation_from_json(io::to_json(relation)) == relation);
  const auto kernel = uniform_kernel(3, 0.4);
  CHECK(io::kernel_from_json(io::to_json(kernel)).p == kernel.p);
  const auto rough = io::to_json(rough_approximation(relation));
  CHECK(rough.at("upper").at("h1").size() == 1);
}

TEST_CASE("log csv round trips exactly") {
  const auto walk = simulate_walk(WalkerConfig{}, 500, 3);
  std::stringstream buffer;
  io::write_log_csv(buffer, walk.log);
  const auto back = io::read_log_csv(buffer);
  REQUIRE(back.size() == walk.log.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back.records()[k].x == walk.log.records()[k].x);
    CHECK(back.records()[k].tag == walk.log.records()[k].tag);
  }
  CHECK(back.kind() == TrajectoryLog::Kind::Position);

  TrajectoryLog percepts;
  percepts.append({1, 2, 0, 0, Event::B, 1});
  percepts.append({2, 0, 0, 0, Event::SWITCH, 9});
  std::stringstream p;
  io::write_log_csv(p, percepts);
  CHECK(p.str() == "t,percept,event\n1,2,B\n2,0,SWITCH\n");
  const auto q = io::read_log_csv(p);
  CHECK(q.records()[1].percept == 0);
  CHECK(has(q.records()[1].flags, Event::SWITCH));

  std::istringstream bad("t,what\n1,2\n");
  CHECK_THROWS_AS(io::read_log_csv(bad), Error);
}

}  // TEST_SUITE
