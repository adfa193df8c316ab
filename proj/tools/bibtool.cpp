// bibtool: command-line front end. Records go to stdout as JSON lines;
// diagnostics go to stderr. Library errors exit with status 1.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bibfractal/bibfractal.hpp"
#include "bibfractal/error.hpp"
#include "bibfractal/io.hpp"

using namespace bib;
using nlohmann::json;

namespace {

void emit(const json& record) { std::cout << record.dump() << '\n'; }

std::string stem_of(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

std::string lookup(const io::KeyValues& kv, const std::string& key, const std::string& fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double number(const io::KeyValues& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "config key '" + key + "' is not a number: " + it->second);
  }
}

// ---- basins -----------------------------------------------------------

struct BasinsArgs {
  std::string poly = "-1,0,0,1";
  std::string window = "-2,2,-2,2";
  std::vector<int> res{512, 512};
  int max_iters = 200;
  double radius = 1e-9;
  unsigned threads = 0;
  std::string out;
};

int cmd_basins(const BasinsArgs& a) {
  const auto w = io::parse_doubles(a.window);
  require(w.size() == 4, ErrorCode::ParseError, "--window needs xmin,xmax,ymin,ymax");
  require(a.res.size() == 2, ErrorCode::ParseError, "--res needs NX NY");
  io::BasinsMetadata meta;
  meta.coefficients = io::parse_coefficients(a.poly);
  meta.spec = GridSpec::window(w[0], w[1], w[2], w[3], a.res[0], a.res[1]);
  meta.limits = {a.max_iters, a.radius};
  const PolynomialMap map(meta.coefficients);
  const auto grid = label_grid(map, meta.spec, meta.limits, a.threads);
  io::save_basins(a.out, grid, meta);
  std::size_t unresolved = 0;
  for (int l : grid.labels) unresolved += l == kUnresolved;
  emit({{"pixmap", a.out}, {"metadata", io::metadata_path(a.out)}, {"roots", grid.root_count},
        {"unresolved", unresolved}});
  return 0;
}

// ---- dimension --------------------------------------------------------

struct DimensionArgs {
  std::string in;
  std::string sizes;
  std::string out;
};

int cmd_dimension(const DimensionArgs& a) {
  const auto loaded = io::load_basins(a.in);
  const auto mask = extract_boundary(loaded.grid);
  const auto sizes = a.sizes.empty() ? default_box_sizes(loaded.grid.spec.nx, loaded.grid.spec.ny)
                                     : io::parse_ints(a.sizes);
  const auto est = box_counting_dimension(mask, sizes);
  if (!a.out.empty()) {
    std::ofstream csv(a.out);
    require(static_cast<bool>(csv), ErrorCode::InvalidArgument, "cannot write " + a.out);
    csv << "box_size,count\n";
    for (std::size_t k = 0; k < est.box_sizes.size(); ++k) csv << est.box_sizes[k] << ',' << est.counts[k] << '\n';
  }
  if (est.r2 < kDimensionFitWarnR2) std::cerr << "warning: box-counting fit r2 " << est.r2 << " is low\n";
  json record = io::to_json(est);
  record["kind"] = "dimension";
  record["measure"] = io::to_json(measure_report(loaded.grid, mask));
  emit(record);
  return 0;
}

// ---- partition --------------------------------------------------------

struct PartitionArgs {
  std::string in;
  int basin = 0;
  int radius = 2;
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  bool disk = false;
  std::string out;
  std::string kernel_out;
  unsigned threads = 0;
};

struct KernelBuild {
  std::vector<Partition> partitions;
  SwitchKernel kernel;
};

KernelBuild kernel_from_basins(const io::LoadedBasins& loaded, int radius, std::size_t samples, std::uint64_t seed,
                               bool disk, unsigned threads) {
  const PolynomialMap map(loaded.meta.coefficients);
  auto partitions = build_partitions(loaded.grid, extract_boundary(loaded.grid), radius);
  KernelOptions options;
  options.samples_per_row = samples;
  options.seed = seed;
  options.limits = loaded.meta.limits;
  options.threads = threads;
  if (disk) options.region = Disk::inscribed(loaded.grid.spec);
  auto kernel = switch_kernel(map, loaded.grid, partitions, options);
  return {std::move(partitions), std::move(kernel)};
}

int cmd_partition(const PartitionArgs& a) {
  const auto loaded = io::load_basins(a.in);
  require(a.basin >= 0 && a.basin < loaded.grid.root_count, ErrorCode::InvalidArgument,
          "--basin out of range");
  const auto built = kernel_from_basins(loaded, a.radius, a.samples, a.seed, a.disk, a.threads);
  const auto& p = built.partitions[static_cast<std::size_t>(a.basin)];
  const std::string prefix = a.out.empty() ? stem_of(a.in) + "_basin" + std::to_string(a.basin) : a.out;
  io::write_ppm(prefix + "_inner.ppm", io::mask_image(p.spec, p.inner));
  io::write_ppm(prefix + "_outer.ppm", io::mask_image(p.spec, p.outer));
  io::write_ppm(prefix + "_shell.ppm", io::mask_image(p.spec, p.shell));
  std::vector<double> per_basin;
  for (const auto& q : built.partitions) per_basin.push_back(q.theta);
  if (!a.kernel_out.empty()) {
    std::ofstream out(a.kernel_out);
    require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write " + a.kernel_out);
    out << io::to_json(built.kernel).dump() << '\n';
  }
  emit({{"theta", p.theta},
        {"basin", a.basin},
        {"radius", a.radius},
        {"theta_per_basin", per_basin},
        {"kernel", built.kernel.p},
        {"samples", a.samples},
        {"seed", a.seed},
        {"region", a.disk ? "disk" : "window"},
        {"masks", prefix}});
  return 0;
}

// ---- perceive ---------------------------------------------------------

struct PerceiveArgs {
  std::string kernel;
  std::string from_partition;
  int radius = 2;
  std::size_t samples = 100000;
  bool disk = true;
  double noise = 1.0;
  std::int64_t steps = 100000;
  std::uint64_t seed = 1;
  std::string log;
};

int cmd_perceive(const PerceiveArgs& a) {
  SwitchKernel kernel;
  if (!a.kernel.empty()) {
    const auto records = io::read_json_lines(a.kernel);
    require(!records.empty(), ErrorCode::ParseError, "no kernel record in " + a.kernel);
    kernel = io::kernel_from_json(records.front());
  } else {
    require(!a.from_partition.empty(), ErrorCode::InvalidArgument, "give --kernel or --from-partition");
    kernel = kernel_from_basins(io::load_basins(a.from_partition), a.radius, a.samples, a.seed, a.disk, 0).kernel;
  }
  const auto result = run_perception(kernel, a.noise, a.steps, a.seed);
  if (!a.log.empty()) io::write_log_csv(a.log, result.log);
  json record = result.stats ? io::to_json(*result.stats) : json{{"kind", "dwell"}, {"switches", 0}};
  record["steps"] = a.steps;
  record["seed"] = a.seed;
  record["kernel"] = kernel.p;
  emit(record);
  return 0;
}

// ---- walk -------------------------------------------------------------

IBConfig ib_from(const io::KeyValues& kv, IBConfig ib) {
  ib.gamma = number(kv, "gamma", ib.gamma);
  ib.window = static_cast<std::size_t>(number(kv, "window", static_cast<double>(ib.window)));
  const auto policy = lookup(kv, "policy", "replace");
  if (policy == "replace" || policy == "replace_weakest") {
    ib.policy = ExplorationPolicy::ReplaceWeakest;
  } else if (policy == "add" || policy == "add_hypothesis") {
    ib.policy = ExplorationPolicy::AddHypothesis;
  } else {
    fail(ErrorCode::ParseError, "unknown policy: " + policy);
  }
  const auto source = lookup(kv, "theta_source", "fixed");
  if (source == "fixed") {
    ib.theta = ThetaSource::fixed(number(kv, "theta", ib.theta.value));
  } else if (source == "partition") {
    const auto path = lookup(kv, "basins", "");
    require(!path.empty(), ErrorCode::InvalidArgument, "theta_source=partition needs basins=<file>");
    const auto loaded = io::load_basins(path);
    const auto p = build_partition(loaded.grid, extract_boundary(loaded.grid),
                                   static_cast<int>(number(kv, "basin", 0)),
                                   static_cast<int>(number(kv, "radius", 2)));
    ib.theta = ThetaSource::from_partition(p);
  } else {
    fail(ErrorCode::ParseError, "unknown theta_source: " + source);
  }
  ib.validate();
  return ib;
}

struct WalkArgs {
  std::string config;
  std::int64_t steps = 100000;
  std::uint64_t seed = 1;
  bool control = false;
  std::string log;
};

int cmd_walk(const WalkArgs& a) {
  const auto kv = a.config.empty() ? io::KeyValues{} : io::read_key_values(a.config);
  WalkerConfig config;
  const auto k = static_cast<std::size_t>(number(kv, "hypotheses", 3));
  config.model = cyclic_model(k, number(kv, "peak", 0.6));
  config.bib.ib = ib_from(kv, config.bib.ib);
  config.stream = parse_stream_kind(lookup(kv, "stream", "ambiguous"));
  config.true_hypothesis = static_cast<std::size_t>(number(kv, "true_hypothesis", 0));
  const auto walk = a.control ? simulate_memoryless_walk(k, a.steps, a.seed) : simulate_walk(config, a.steps, a.seed);
  if (!a.log.empty()) io::write_log_csv(a.log, walk.log);
  json record;
  try {
    record = io::to_json(diffusion_statistics(walk.path, walk.run_lengths));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    std::cerr << "warning: " << e.what() << '\n';
    record = {{"kind", "diffusion"}, {"runs", walk.run_lengths.size()}};
  }
  record["walker"] = a.control ? "memoryless" : "bib";
  record["steps"] = a.steps;
  record["seed"] = a.seed;
  record["switch"] = walk.log.count(Event::SWITCH);
  record["explore"] = walk.log.count(Event::EXPLORE);
  emit(record);
  return 0;
}

// ---- infer ------------------------------------------------------------

struct InferArgs {
  std::string mode = "bayes";
  std::string config;
  std::string log;
};

HypothesisSpace model_from(const io::KeyValues& kv) {
  const auto tables = lookup(kv, "tables", "");
  if (tables.empty()) return cyclic_model(static_cast<std::size_t>(number(kv, "hypotheses", 3)), number(kv, "peak", 0.6));
  std::optional<Distribution> prior;
  std::optional<LikelihoodTable> likelihood;
  for (const auto& record : io::read_json_lines(tables)) {
    if (record.contains("rows")) {
      likelihood = io::likelihood_from_json(record);
    } else if (record.contains("probs")) {
      prior = io::distribution_from_json(record);
    }
  }
  require(likelihood.has_value(), ErrorCode::ParseError, tables + " has no likelihood record");
  if (!prior) prior = Distribution::uniform(likelihood->h_labels());
  return {*prior, *likelihood};
}

int cmd_infer(const InferArgs& a) {
  require(a.mode == "bayes" || a.mode == "bib", ErrorCode::InvalidArgument, "--mode must be bayes or bib");
  const auto kv = io::read_key_values(a.config);
  const auto model = model_from(kv);
  const auto seed = static_cast<std::uint64_t>(number(kv, "seed", 1));
  const auto steps = static_cast<std::int64_t>(number(kv, "steps", 1000));
  const auto truth_label = lookup(kv, "true_hypothesis", model.likelihood.h_labels().front());
  const auto truth = model.likelihood.h_index(truth_label);
  require(truth.has_value(), ErrorCode::UnknownHypothesis, "unknown true_hypothesis: " + truth_label);
  DataStream stream(parse_stream_kind(lookup(kv, "stream", "true_hypothesis")), model.likelihood, *truth, seed);

  json record{{"mode", a.mode}, {"steps", steps}, {"seed", seed}};
  RunResult run;
  if (a.mode == "bayes") {
    run = run_bayes(model, stream, steps, true);
    record["posterior"] = io::to_json(Distribution(model.prior.labels(), run.posteriors.back()));
  } else {
    BIBConfig config;
    config.seed = seed;
    config.ib = ib_from(kv, config.ib);
    BIBState state(model, config);
    run = run_bib(state, stream, steps);
    record["posterior"] = io::to_json(state.posterior());
    record["likelihood"] = io::to_json(state.likelihood());
    record["relation"] = io::to_json(state.relation());
    record["rough"] = io::to_json(state.rough());
  }
  for (Event e : {Event::B, Event::IB, Event::EXPLORE, Event::SWITCH})
    record["events"][std::string(to_string(e))] = run.log.count(e);
  if (!a.log.empty()) io::write_log_csv(a.log, run.log);
  emit(record);
  return 0;
}

// ---- analyze ----------------------------------------------------------

int cmd_analyze(const std::string& path) {
  const auto log = io::read_log_csv(path);
  if (log.kind() == TrajectoryLog::Kind::Percept) {
    emit(io::to_json(dwell_statistics(log)));
  } else {
    emit(io::to_json(diffusion_statistics(path_from_log(log), run_lengths_from_log(log))));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Newton basins, rough partitions and BIB inference"};
  app.set_version_flag("--version", std::string(io::kToolVersion));
  app.require_subcommand(1);

  BasinsArgs basins;
  auto* sb = app.add_subcommand("basins", "Label Newton basins and write a pixmap with metadata");
  sb->add_option("--poly", basins.poly, "Coefficients, constant term first")->capture_default_str();
  sb->add_option("--window", basins.window, "xmin,xmax,ymin,ymax")->capture_default_str();
  sb->add_option("--res", basins.res, "NX NY")->expected(2)->capture_default_str();
  sb->add_option("--max-iters", basins.max_iters)->capture_default_str();
  sb->add_option("--convergence-radius", basins.radius)->capture_default_str();
  sb->add_option("--threads", basins.threads, "0 = hardware concurrency");
  sb->add_option("--out", basins.out, "Output .ppm; metadata goes to the matching .meta")->required();

  DimensionArgs dimension;
  auto* sd = app.add_subcommand("dimension", "Box-counting dimension of the basin boundary");
  sd->add_option("--in", dimension.in, "Pixmap or metadata from basins")->required();
  sd->add_option("--sizes", dimension.sizes, "Comma-separated box sizes in cells");
  sd->add_option("--out", dimension.out, "CSV of box_size,count");

  PartitionArgs partition;
  auto* sp = app.add_subcommand("partition", "Build R-/R+ partitions, theta and the switch kernel");
  sp->add_option("--in", partition.in)->required();
  sp->add_option("--basin", partition.basin)->capture_default_str();
  sp->add_option("--radius", partition.radius, "Dilation radius in cells")->capture_default_str();
  sp->add_option("--seed", partition.seed)->capture_default_str();
  sp->add_option("--samples", partition.samples, "Kernel samples per row")->capture_default_str();
  sp->add_flag("--disk", partition.disk, "Sample only inside the inscribed disk");
  sp->add_option("--out", partition.out, "Prefix for mask pixmaps");
  sp->add_option("--kernel-out", partition.kernel_out, "Write the kernel as a JSON line");
  sp->add_option("--threads", partition.threads);

  PerceiveArgs perceive;
  auto* sv = app.add_subcommand("perceive", "Simulate percept switching");
  auto* kernel_opt = sv->add_option("--kernel", perceive.kernel, "Kernel JSON-lines file");
  auto* from_opt = sv->add_option("--from-partition", perceive.from_partition, "Basins file to build the kernel from");
  kernel_opt->excludes(from_opt);
  sv->add_option("--radius", perceive.radius)->capture_default_str();
  sv->add_option("--samples", perceive.samples)->capture_default_str();
  sv->add_option("--noise", perceive.noise)->capture_default_str();
  sv->add_option("--steps", perceive.steps)->capture_default_str();
  sv->add_option("--seed", perceive.seed)->capture_default_str();
  sv->add_option("--log", perceive.log, "TrajectoryLog CSV");

  WalkArgs walk;
  auto* sw = app.add_subcommand("walk", "BIB-driven random walker");
  sw->add_option("--config", walk.config, "key=value file");
  sw->add_option("--steps", walk.steps)->capture_default_str();
  sw->add_option("--seed", walk.seed)->capture_default_str();
  sw->add_flag("--control", walk.control, "Memoryless control walker");
  sw->add_option("--log", walk.log, "TrajectoryLog CSV");

  InferArgs infer;
  auto* si = app.add_subcommand("infer", "Run a Bayesian or BIB inference loop");
  si->add_option("--mode", infer.mode)->check(CLI::IsMember({"bayes", "bib"}))->capture_default_str();
  si->add_option("--config", infer.config, "key=value file")->required();
  si->add_option("--log", infer.log, "TrajectoryLog CSV");

  std::string analyze_log;
  auto* sa = app.add_subcommand("analyze", "Recompute statistics from a stored log");
  sa->add_option("--log", analyze_log)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sb) return cmd_basins(basins);
    if (*sd) return cmd_dimension(dimension);
    if (*sp) return cmd_partition(partition);
    if (*sv) return cmd_perceive(perceive);
    if (*sw) return cmd_walk(walk);
    if (*si) return cmd_infer(infer);
    if (*sa) return cmd_analyze(analyze_log);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
