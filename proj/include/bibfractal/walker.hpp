#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bibfractal/bib_loop.hpp"
#include "bibfractal/statistics.hpp"

namespace bib {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct DiffusionStats {
  std::vector<std::int64_t> run_lengths;                 ///< straight-run lengths in steps
  std::vector<std::pair<std::int64_t, double>> msd;      ///< (lag, time-averaged MSD)
  double alpha = 0.0;                                    ///< MSD exponent
  double alpha_r2 = 0.0;
  std::int64_t fit_lag_min = 0;
  std::int64_t fit_lag_max = 0;
  std::optional<PowerLawFit> tail;                       ///< run-length tail exponent mu
};

/// Integer lags spaced roughly logarithmically in [1, max_lag].
std::vector<std::int64_t> log_spaced_lags(std::int64_t max_lag, int per_decade = 20);

/// Time-averaged mean-squared displacement at the given lags.
std::vector<std::pair<std::int64_t, double>> mean_squared_displacement(std::span<const Point2> path,
                                                                       std::span<const std::int64_t> lags);

/// MSD curve over lags up to N/4 (N = path.size() - 1 steps), alpha from a
/// log-log fit over lags in [10, N/10], and the run-length tail fit.
/// Throws InsufficientData when fewer than min_runs runs are observed or the
/// path is too short for the fit range.
DiffusionStats diffusion_statistics(std::span<const Point2> path, std::span<const std::int64_t> run_lengths,
                                    std::size_t min_runs = 30);

/// Relation threshold used by the default walker. It sits just above 1/|D|
/// for three data labels, so the relation empties whenever IB has flattened
/// the MAP row towards uniform; lower values lock the walker into one run.
inline constexpr double kWalkerTheta = 0.34;

inline BIBConfig default_walker_bib() {
  BIBConfig config;
  config.ib.theta = ThetaSource::fixed(kWalkerTheta);
  return config;
}

/// Walker configuration: a B-diamond-IB model and the stream driving it.
struct WalkerConfig {
  HypothesisSpace model = cyclic_model(3, 0.6);
  BIBConfig bib = default_walker_bib();
  StreamKind stream = StreamKind::Ambiguous;
  std::size_t true_hypothesis = 0;
};

struct WalkResult {
  TrajectoryLog log{TrajectoryLog::Kind::Position};
  std::vector<Point2> path;               ///< path[0] is the origin
  std::vector<std::int64_t> run_lengths;  ///< completed runs; the last open run is excluded
  std::optional<DiffusionStats> stats;
};

/// Unit-speed 2-D walker. The heading persists while the loop raises neither
/// SWITCH nor EXPLORE, and is redrawn uniformly on the circle when it does,
/// so straight runs last exactly as long as the MAP hypothesis dwells.
/// Statistics are left empty; see run_walker.
WalkResult simulate_walk(const WalkerConfig& config, std::int64_t steps, std::uint64_t seed);

/// Control walker whose percept is redrawn uniformly from k states every step.
WalkResult simulate_memoryless_walk(std::size_t k, std::int64_t steps, std::uint64_t seed);

/// simulate_walk followed by diffusion_statistics. Throws InsufficientData
/// with fewer than 30 runs.
WalkResult run_walker(const WalkerConfig& config, std::int64_t steps, std::uint64_t seed);

/// Recovers straight-run lengths from a position log: a run ends at each
/// SWITCH or EXPLORE record.
std::vector<std::int64_t> run_lengths_from_log(const TrajectoryLog& log);

/// Path with the origin prepended, from a position log.
std::vector<Point2> path_from_log(const TrajectoryLog& log);

/// Runs independent walks in parallel; walk i uses seed stream_seed(seed, i).
/// Results are in index order and do not depend on `threads`.
std::vector<WalkResult> simulate_walk_ensemble(const WalkerConfig& config, std::int64_t steps,
                                               std::uint64_t seed, std::size_t count, unsigned threads = 0);

}  // namespace bib
