#include "bibfractal/walker.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "bibfractal/error.hpp"
#include "bibfractal/parallel.hpp"

namespace bib {
namespace {

constexpr std::uint8_t kTurnFlags = static_cast<std::uint8_t>(Event::SWITCH) | static_cast<std::uint8_t>(Event::EXPLORE);

// Shared stepping for every walker flavour: flags_for(t) yields the step's
// event flags and percept.
template <typename NextStep>
WalkResult walk(std::int64_t steps, std::uint64_t seed, NextStep&& next_step) {
  require(steps >= 1, ErrorCode::InvalidArgument, "steps must be >= 1");
  std::mt19937_64 heading_rng(stream_seed(seed, 0x4ead));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  WalkResult result;
  result.path.reserve(static_cast<std::size_t>(steps) + 1);
  result.log.reserve(static_cast<std::size_t>(steps));
  result.path.push_back({0.0, 0.0});
  double heading = angle(heading_rng);
  double dx = std::cos(heading), dy = std::sin(heading);
  std::int64_t run = 0;
  for (std::int64_t t = 1; t <= steps; ++t) {
    const auto [flags, percept] = next_step();
    if ((flags & kTurnFlags) != 0) {
      if (run > 0) result.run_lengths.push_back(run);
      run = 0;
      heading = angle(heading_rng);
      dx = std::cos(heading);
      dy = std::sin(heading);
    }
    auto p = result.path.back();
    p.x += dx;
    p.y += dy;
    ++run;
    result.path.push_back(p);
    result.log.append({t, percept, p.x, p.y, primary_event(flags), flags});
  }
  return result;
}

}  // namespace

std::vector<std::int64_t> log_spaced_lags(std::int64_t max_lag, int per_decade) {
  std::vector<std::int64_t> lags;
  if (max_lag < 1) return lags;
  const double factor = std::pow(10.0, 1.0 / per_decade);
  double x = 1.0;
  while (true) {
    const auto lag = static_cast<std::int64_t>(std::llround(x));
    if (lag > max_lag) break;
    if (lags.empty() || lag != lags.back()) lags.push_back(lag);
    x *= factor;
  }
  if (lags.back() != max_lag) lags.push_back(max_lag);
  return lags;
}

std::vector<std::pair<std::int64_t, double>> mean_squared_displacement(std::span<const Point2> path,
                                                                       std::span<const std::int64_t> lags) {
  std::vector<std::pair<std::int64_t, double>> msd;
  const auto n = static_cast<std::int64_t>(path.size());
  for (auto lag : lags) {
    require(lag >= 1 && lag < n, ErrorCode::InvalidArgument, "lag out of range");
    double acc = 0.0;
    for (std::int64_t t = 0; t + lag < n; ++t) {
      const double ddx = path[t + lag].x - path[t].x;
      const double ddy = path[t + lag].y - path[t].y;
      acc += ddx * ddx + ddy * ddy;
    }
    msd.emplace_back(lag, acc / static_cast<double>(n - lag));
  }
  return msd;
}

DiffusionStats diffusion_statistics(std::span<const Point2> path, std::span<const std::int64_t> run_lengths,
                                    std::size_t min_runs) {
  require(run_lengths.size() >= min_runs, ErrorCode::InsufficientData,
          "too few straight runs for diffusion statistics");
  const auto steps = static_cast<std::int64_t>(path.size()) - 1;
  DiffusionStats stats;
  stats.run_lengths.assign(run_lengths.begin(), run_lengths.end());
  stats.fit_lag_min = 10;
  stats.fit_lag_max = steps / 10;
  require(stats.fit_lag_max > stats.fit_lag_min, ErrorCode::InsufficientData,
          "trajectory too short for the MSD fit range");
  const auto lags = log_spaced_lags(steps / 4);
  stats.msd = mean_squared_displacement(path, lags);

  std::vector<double> x, y;
  for (const auto& [lag, value] : stats.msd) {
    if (lag < stats.fit_lag_min || lag > stats.fit_lag_max) continue;
    x.push_back(std::log(static_cast<double>(lag)));
    y.push_back(std::log(value));
  }
  const auto fit = fit_line(x, y);
  stats.alpha = fit.slope;
  stats.alpha_r2 = fit.r2;
  stats.tail = fit_discrete_power_law(stats.run_lengths);
  return stats;
}

WalkResult simulate_walk(const WalkerConfig& config, std::int64_t steps, std::uint64_t seed) {
  BIBConfig bib = config.bib;
  bib.seed = stream_seed(seed, 0xb1b);
  BIBState state(config.model, bib);
  DataStream stream(config.stream, config.model.likelihood, config.true_hypothesis, seed);
  return walk(steps, seed, [&] {
    const auto flags = state.step(stream.next());
    return std::make_pair(flags, static_cast<int>(state.map_hypothesis()));
  });
}

WalkResult simulate_memoryless_walk(std::size_t k, std::int64_t steps, std::uint64_t seed) {
  require(k >= 2, ErrorCode::InvalidArgument, "memoryless control needs at least two percepts");
  std::mt19937_64 rng(stream_seed(seed, 0x3e3));
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::size_t percept = pick(rng);
  return walk(steps, seed, [&] {
    const auto next = pick(rng);
    std::uint8_t flags = static_cast<std::uint8_t>(Event::B);
    if (next != percept) flags |= static_cast<std::uint8_t>(Event::SWITCH);
    percept = next;
    return std::make_pair(flags, static_cast<int>(percept));
  });
}

WalkResult run_walker(const WalkerConfig& config, std::int64_t steps, std::uint64_t seed) {
  auto result = simulate_walk(config, steps, seed);
  result.stats = diffusion_statistics(result.path, result.run_lengths);
  return result;
}

std::vector<std::int64_t> run_lengths_from_log(const TrajectoryLog& log) {
  std::vector<std::int64_t> runs;
  std::int64_t run = 0;
  for (const auto& r : log.records()) {
    if ((r.flags & kTurnFlags) != 0) {
      if (run > 0) runs.push_back(run);
      run = 0;
    }
    ++run;
  }
  return runs;
}

std::vector<Point2> path_from_log(const TrajectoryLog& log) {
  std::vector<Point2> path{{0.0, 0.0}};
  for (const auto& r : log.records()) path.push_back({r.x, r.y});
  return path;
}

std::vector<WalkResult> simulate_walk_ensemble(const WalkerConfig& config, std::int64_t steps,
                                               std::uint64_t seed, std::size_t count, unsigned threads) {
  std::vector<WalkResult> results(count);
  parallel_for(count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) results[i] = simulate_walk(config, steps, stream_seed(seed, i));
  });
  return results;
}

}  // namespace bib
