#include "bibfractal/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bibfractal/error.hpp"
#include "bibfractal/parallel.hpp"

namespace bib {

std::vector<std::int64_t> DwellStats::pooled() const {
  std::vector<std::int64_t> all;
  for (const auto& s : samples) all.insert(all.end(), s.begin(), s.end());
  return all;
}

DwellStats dwell_statistics(std::span<const int> percepts, bool fit_tail) {
  require(!percepts.empty(), ErrorCode::InsufficientData, "empty percept sequence");
  int max_percept = 0;
  for (int p : percepts) {
    require(p >= 0, ErrorCode::InvalidArgument, "percepts must be nonnegative");
    max_percept = std::max(max_percept, p);
  }
  DwellStats stats;
  stats.samples.resize(static_cast<std::size_t>(max_percept) + 1);

  std::size_t start = 0;
  for (std::size_t k = 1; k < percepts.size(); ++k) {
    if (percepts[k] != percepts[k - 1]) {
      stats.samples[static_cast<std::size_t>(percepts[k - 1])].push_back(static_cast<std::int64_t>(k - start));
      start = k;
      ++stats.switches;
    }
  }
  require(stats.switches > 0, ErrorCode::InsufficientData, "percept never switched");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : stats.samples) {
    std::vector<double> v(s.begin(), s.end());
    stats.means.push_back(v.empty() ? nan : mean(v));
    stats.medians.push_back(v.empty() ? nan : median(v));
    stats.std_errors.push_back(v.size() < 2 ? nan : stddev(v) / std::sqrt(static_cast<double>(v.size())));
  }
  if (fit_tail) {
    const auto all = stats.pooled();
    stats.tail = fit_discrete_power_law(all);
  }
  return stats;
}

DwellStats dwell_statistics(const TrajectoryLog& log, bool fit_tail) {
  std::vector<int> percepts;
  percepts.reserve(log.size());
  for (const auto& r : log.records()) percepts.push_back(r.percept);
  return dwell_statistics(percepts, fit_tail);
}

SwitchKernel uniform_kernel(std::size_t k, double p_stay) {
  require(k >= 1, ErrorCode::InvalidArgument, "kernel needs at least one state");
  require(p_stay > 0.0 && p_stay <= 1.0, ErrorCode::InvalidArgument, "p_stay must lie in (0, 1]");
  if (k == 1) return make_kernel({{1.0}});
  const double off = (1.0 - p_stay) / static_cast<double>(k - 1);
  std::vector<std::vector<double>> rows(k, std::vector<double>(k, off));
  for (std::size_t i = 0; i < k; ++i) rows[i][i] = p_stay;
  return make_kernel(std::move(rows));
}

PerceptionResult run_perception(const SwitchKernel& kernel, double noise_amplitude, std::int64_t steps,
                                std::uint64_t seed, int initial_percept) {
  require(steps >= 1, ErrorCode::InvalidArgument, "steps must be >= 1");
  require(noise_amplitude >= 0.0 && noise_amplitude <= 1.0, ErrorCode::InvalidArgument,
          "noise amplitude must lie in [0, 1]");
  const std::size_t k = kernel.size();
  require(k >= 1, ErrorCode::InvalidArgument, "empty kernel");
  require(initial_percept >= 0 && static_cast<std::size_t>(initial_percept) < k, ErrorCode::InvalidArgument,
          "initial percept out of range");

  // Cumulative rows of the blended kernel.
  std::vector<std::vector<double>> cumulative(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i) {
    require(kernel.p[i].size() == k, ErrorCode::ShapeMismatch, "kernel must be square");
    double acc = 0.0, total = 0.0;
    for (std::size_t j = 0; j < k; ++j) total += kernel.p[i][j];
    require(std::abs(total - 1.0) < 1e-9, ErrorCode::InvalidArgument, "kernel rows must sum to 1");
    for (std::size_t j = 0; j < k; ++j) {
      const double p = noise_amplitude * kernel.p[i][j] + (i == j ? 1.0 - noise_amplitude : 0.0);
      acc += p;
      cumulative[i][j] = acc;
    }
  }

  std::mt19937_64 rng(stream_seed(seed, 0x9e6c));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PerceptionResult result;
  result.log.reserve(static_cast<std::size_t>(steps));
  std::size_t state = static_cast<std::size_t>(initial_percept);
  std::vector<int> percepts;
  percepts.reserve(static_cast<std::size_t>(steps));
  for (std::int64_t t = 1; t <= steps; ++t) {
    const double u = unit(rng) * cumulative[state].back();
    std::size_t next = 0;
    while (next + 1 < k && u >= cumulative[state][next]) ++next;
    std::uint8_t flags = static_cast<std::uint8_t>(Event::B);
    if (next != state) flags |= static_cast<std::uint8_t>(Event::SWITCH);
    state = next;
    percepts.push_back(static_cast<int>(state));
    result.log.append({t, static_cast<int>(state), 0.0, 0.0, primary_event(flags), flags});
  }
  try {
    result.stats = dwell_statistics(percepts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
  }
  return result;
}

}  // namespace bib
