#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bibfractal/bibfractal.hpp"
#include "bibfractal/error.hpp"
#include "bibfractal/io.hpp"

namespace py = pybind11;
using namespace bib;

namespace {

template <class T>
py::array_t<T> grid_array(const std::vector<T>& values, int nx, int ny) {
  py::array_t<T> out({ny, nx});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::array_t<bool> mask_array(const std::vector<std::uint8_t>& cells, int nx, int ny) {
  py::array_t<bool> out({ny, nx});
  auto* data = out.mutable_data();
  for (std::size_t k = 0; k < cells.size(); ++k) data[k] = cells[k] != 0;
  return out;
}

py::dict json_dict(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_bibfractal, m) {
  m.doc() = "Newton basins, rough partitions and Bayesian/inverse-Bayesian inference";
  m.attr("__version__") = std::string(io::kToolVersion);

  py::register_exception<Error>(m, "BibError", PyExc_RuntimeError);

  // newton-dynamics
  py::class_<PolynomialMap>(m, "PolynomialMap")
      .def(py::init<std::vector<Complex>>(), py::arg("coefficients"))
      .def_static("cubic_unity", &PolynomialMap::cubic_unity)
      .def_property_readonly("degree", &PolynomialMap::degree)
      .def_property_readonly("roots", &PolynomialMap::roots)
      .def_property_readonly("coefficients",
                             [](const PolynomialMap& p) { return std::vector<Complex>(p.coefficients().begin(), p.coefficients().end()); })
      .def("__call__", &PolynomialMap::value);

  py::class_<IterationLimits>(m, "IterationLimits")
      .def(py::init([](int max_iters, double radius) { return IterationLimits{max_iters, radius}; }),
           py::arg("max_iters") = 200, py::arg("convergence_radius") = 1e-9)
      .def_readwrite("max_iters", &IterationLimits::max_iters)
      .def_readwrite("convergence_radius", &IterationLimits::convergence_radius);

  py::enum_<Termination>(m, "Termination")
      .value("Converged", Termination::Converged)
      .value("MaxItersExceeded", Termination::MaxItersExceeded)
      .value("SingularDerivative", Termination::SingularDerivative);

  py::class_<Orbit>(m, "Orbit")
      .def_readonly("points", &Orbit::points)
      .def_readonly("status", &Orbit::status)
      .def_readonly("root_index", &Orbit::root_index)
      .def_readonly("ftle", &Orbit::ftle)
      .def_property_readonly("steps", &Orbit::steps);

  m.def("newton_step", &newton_step, py::arg("map"), py::arg("z"));
  m.def("iterate_orbit", &iterate_orbit, py::arg("map"), py::arg("z0"), py::arg("limits") = IterationLimits{});
  m.def("transient_ftle", &transient_ftle, py::arg("map"), py::arg("z0"), py::arg("horizon") = 5,
        py::arg("limits") = IterationLimits{});
  m.def("lyapunov_time", &lyapunov_time, py::arg("ftle"));

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init(&GridSpec::window), py::arg("xmin"), py::arg("xmax"), py::arg("ymin"), py::arg("ymax"),
           py::arg("nx"), py::arg("ny"))
      .def_readonly("nx", &GridSpec::nx)
      .def_readonly("ny", &GridSpec::ny)
      .def("cell_center", &GridSpec::cell_center, py::arg("i"), py::arg("j"));

  py::class_<ComplexGrid>(m, "ComplexGrid")
      .def_readonly("spec", &ComplexGrid::spec)
      .def_readonly("root_count", &ComplexGrid::root_count)
      .def_property_readonly("labels",
                             [](const ComplexGrid& g) { return grid_array(g.labels, g.spec.nx, g.spec.ny); })
      .def_property_readonly("iters",
                             [](const ComplexGrid& g) { return grid_array(g.iters, g.spec.nx, g.spec.ny); });

  m.def("label_grid", &label_grid, py::arg("map"), py::arg("spec"), py::arg("limits") = IterationLimits{},
        py::arg("threads") = 0u, py::call_guard<py::gil_scoped_release>());

  // fractal-metrics
  py::class_<BoundaryMask>(m, "BoundaryMask")
      .def_property_readonly("cells", [](const BoundaryMask& b) { return mask_array(b.cells, b.nx, b.ny); })
      .def("count", &BoundaryMask::count);

  py::class_<DimensionEstimate>(m, "DimensionEstimate")
      .def_readonly("box_sizes", &DimensionEstimate::box_sizes)
      .def_readonly("counts", &DimensionEstimate::counts)
      .def_readonly("slope", &DimensionEstimate::slope)
      .def_readonly("r2", &DimensionEstimate::r2);

  m.def("extract_boundary", &extract_boundary, py::arg("grid"));
  m.def(
      "box_counting_dimension",
      [](const BoundaryMask& mask, std::optional<std::vector<int>> sizes) {
        const auto s = sizes ? *sizes : default_box_sizes(mask.nx, mask.ny);
        return box_counting_dimension(mask, s);
      },
      py::arg("mask"), py::arg("sizes") = py::none());
  m.def(
      "measure_report",
      [](const ComplexGrid& g, const BoundaryMask& b) { return json_dict(io::to_json(measure_report(g, b))); },
      py::arg("grid"), py::arg("mask"));

  // rough-partition
  py::enum_<ThetaNormalization>(m, "ThetaNormalization")
      .value("ShellOverOuter", ThetaNormalization::ShellOverOuter)
      .value("ShellOverGrid", ThetaNormalization::ShellOverGrid);

  py::class_<Partition>(m, "Partition")
      .def_readonly("basin", &Partition::basin)
      .def_readonly("dilation_radius", &Partition::dilation_radius)
      .def_readonly("theta", &Partition::theta)
      .def_property_readonly("inner", [](const Partition& p) { return mask_array(p.inner, p.spec.nx, p.spec.ny); })
      .def_property_readonly("outer", [](const Partition& p) { return mask_array(p.outer, p.spec.nx, p.spec.ny); })
      .def_property_readonly("shell", [](const Partition& p) { return mask_array(p.shell, p.spec.nx, p.spec.ny); });

  m.def("build_partition", &build_partition, py::arg("grid"), py::arg("mask"), py::arg("basin"),
        py::arg("dilation_radius"), py::arg("normalization") = ThetaNormalization::ShellOverOuter);

  py::class_<SwitchKernel>(m, "SwitchKernel")
      .def_readonly("p", &SwitchKernel::p)
      .def_readonly("samples_per_row", &SwitchKernel::samples_per_row)
      .def_readonly("seed", &SwitchKernel::seed);
  m.def("make_kernel", &make_kernel, py::arg("rows"));
  m.def(
      "switch_kernel",
      [](const PolynomialMap& map, const ComplexGrid& grid, int radius, std::size_t samples, std::uint64_t seed,
         bool disk) {
        const auto parts = build_partitions(grid, extract_boundary(grid), radius);
        KernelOptions options;
        options.samples_per_row = samples;
        options.seed = seed;
        if (disk) options.region = Disk::inscribed(grid.spec);
        py::gil_scoped_release release;
        return switch_kernel(map, grid, parts, options);
      },
      py::arg("map"), py::arg("grid"), py::arg("dilation_radius") = 2, py::arg("samples_per_row") = 10000,
      py::arg("seed") = 1, py::arg("disk") = true);

  // bayes-engine
  py::class_<Distribution>(m, "Distribution")
      .def(py::init<std::vector<Label>, std::vector<double>>(), py::arg("labels"), py::arg("probs"))
      .def_static("uniform", &Distribution::uniform, py::arg("labels"))
      .def_property_readonly("labels", &Distribution::labels)
      .def_property_readonly("probs", &Distribution::probs)
      .def("prob", &Distribution::prob)
      .def("argmax", &Distribution::argmax)
      .def("__len__", &Distribution::size)
      .def("__eq__", [](const Distribution& a, const Distribution& b) { return a == b; });

  py::class_<LikelihoodTable>(m, "LikelihoodTable")
      .def(py::init<std::vector<Label>, std::vector<Label>, std::vector<std::vector<double>>>(), py::arg("h_labels"),
           py::arg("d_labels"), py::arg("rows"))
      .def_property_readonly("h_labels", &LikelihoodTable::h_labels)
      .def_property_readonly("d_labels", &LikelihoodTable::d_labels)
      .def_property_readonly("rows", &LikelihoodTable::rows);

  py::class_<FreeEnergyReport>(m, "FreeEnergyReport")
      .def_readonly("energy", &FreeEnergyReport::energy)
      .def_readonly("entropy", &FreeEnergyReport::entropy)
      .def_readonly("free_energy", &FreeEnergyReport::free_energy);

  m.def("bayes_update", py::overload_cast<const Distribution&, const LikelihoodTable&, const Label&>(&bayes_update),
        py::arg("prior"), py::arg("likelihood"), py::arg("observed"));
  m.def("free_energy",
        py::overload_cast<const Distribution&, const LikelihoodTable&, const Distribution&, const Label&>(&free_energy),
        py::arg("q"), py::arg("likelihood"), py::arg("prior"), py::arg("observed"));

  // inverse-bayes
  py::class_<BinaryRelation>(m, "BinaryRelation")
      .def_readonly("theta", &BinaryRelation::theta)
      .def("pairs", &BinaryRelation::pairs)
      .def("empty", &BinaryRelation::empty);
  m.def(
      "build_relation",
      [](const Distribution& prior, const LikelihoodTable& lik, double theta) {
        return build_relation(joint_from(prior, lik), theta);
      },
      py::arg("prior"), py::arg("likelihood"), py::arg("theta"));
  m.def(
      "rough_approximation",
      [](const BinaryRelation& r) {
        const auto a = rough_approximation(r);
        return py::make_tuple(a.lower, a.upper);
      },
      py::arg("relation"));

  // bib-applications
  py::enum_<Event>(m, "Event")
      .value("B", Event::B)
      .value("IB", Event::IB)
      .value("EXPLORE", Event::EXPLORE)
      .value("SWITCH", Event::SWITCH);

  py::class_<BIBState>(m, "BIBState")
      .def(py::init([](const Distribution& prior, const LikelihoodTable& lik, double gamma, double theta,
                       std::size_t window, const std::string& policy, std::uint64_t seed) {
             BIBConfig config;
             config.seed = seed;
             config.ib.gamma = gamma;
             config.ib.theta = ThetaSource::fixed(theta);
             config.ib.window = window;
             if (policy == "add") {
               config.ib.policy = ExplorationPolicy::AddHypothesis;
             } else if (policy != "replace") {
               fail(ErrorCode::InvalidArgument, "policy must be 'replace' or 'add'");
             }
             return BIBState(HypothesisSpace{prior, lik}, config);
           }),
           py::arg("prior"), py::arg("likelihood"), py::arg("gamma") = 0.2, py::arg("theta") = 0.2,
           py::arg("window") = 16, py::arg("policy") = "replace", py::arg("seed") = 1)
      .def(
          "step",
          [](BIBState& s, const Label& datum) {
            const auto flags = s.step(datum);
            std::vector<std::string> events;
            for (Event e : {Event::B, Event::IB, Event::EXPLORE, Event::SWITCH})
              if (has(flags, e)) events.emplace_back(to_string(e));
            return events;
          },
          py::arg("datum"))
      .def_property_readonly("t", &BIBState::t)
      .def_property_readonly("prior", &BIBState::prior)
      .def_property_readonly("posterior", &BIBState::posterior)
      .def_property_readonly("likelihood", &BIBState::likelihood)
      .def_property_readonly("relation", &BIBState::relation)
      .def_property_readonly("map_hypothesis", &BIBState::map_hypothesis);

  m.def(
      "run_perception",
      [](const SwitchKernel& kernel, double noise, std::int64_t steps, std::uint64_t seed) {
        const auto result = run_perception(kernel, noise, steps, seed);
        std::vector<int> percepts;
        for (const auto& r : result.log.records()) percepts.push_back(r.percept);
        py::object stats = result.stats ? py::object(json_dict(io::to_json(*result.stats))) : py::none();
        return py::make_tuple(percepts, stats);
      },
      py::arg("kernel"), py::arg("noise_amplitude") = 1.0, py::arg("steps") = 100000, py::arg("seed") = 1);

  m.def(
      "simulate_walk",
      [](std::int64_t steps, std::uint64_t seed, bool control, double gamma, double theta,
         const std::string& stream) {
        WalkResult walk;
        {
          py::gil_scoped_release release;
          if (control) {
            walk = simulate_memoryless_walk(3, steps, seed);
          } else {
            WalkerConfig config;
            config.bib.ib.gamma = gamma;
            config.bib.ib.theta = ThetaSource::fixed(theta);
            config.stream = parse_stream_kind(stream);
            walk = simulate_walk(config, steps, seed);
          }
        }
        py::array_t<double> path({static_cast<py::ssize_t>(walk.path.size()), py::ssize_t{2}});
        auto* data = path.mutable_data();
        for (std::size_t k = 0; k < walk.path.size(); ++k) {
          data[2 * k] = walk.path[k].x;
          data[2 * k + 1] = walk.path[k].y;
        }
        return py::make_tuple(path, walk.run_lengths);
      },
      py::arg("steps") = 100000, py::arg("seed") = 1, py::arg("control") = false, py::arg("gamma") = 0.2,
      py::arg("theta") = kWalkerTheta, py::arg("stream") = "ambiguous");

  m.def(
      "diffusion_statistics",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> path, std::vector<std::int64_t> runs,
         std::size_t min_runs) {
        require(path.ndim() == 2 && path.shape(1) == 2, ErrorCode::ShapeMismatch, "path must have shape (n, 2)");
        std::vector<Point2> points(static_cast<std::size_t>(path.shape(0)));
        for (std::size_t k = 0; k < points.size(); ++k) points[k] = {path.at(k, 0), path.at(k, 1)};
        return json_dict(io::to_json(diffusion_statistics(points, runs, min_runs)));
      },
      py::arg("path"), py::arg("run_lengths"), py::arg("min_runs") = 30);
}
