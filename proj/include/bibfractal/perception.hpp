#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bibfractal/bib_loop.hpp"
#include "bibfractal/rough_partition.hpp"
#include "bibfractal/statistics.hpp"

namespace bib {

/// Dwell-time samples per percept. The final run of a log is right-censored
/// and excluded; the first run is kept.
struct DwellStats {
  std::vector<std::vector<std::int64_t>> samples;  ///< indexed by percept
  std::vector<double> means;                       ///< NaN for percepts without samples
  std::vector<double> medians;
  std::vector<double> std_errors;                  ///< NaN with fewer than two samples
  std::size_t switches = 0;
  std::optional<PowerLawFit> tail;                 ///< pooled dwell times

  std::size_t sample_count(std::size_t percept) const { return samples.at(percept).size(); }
  std::vector<std::int64_t> pooled() const;
};

/// Run-length encoding of a percept sequence. Throws InsufficientData when
/// the sequence never switches.
DwellStats dwell_statistics(std::span<const int> percepts, bool fit_tail = true);
DwellStats dwell_statistics(const TrajectoryLog& log, bool fit_tail = true);

struct PerceptionResult {
  TrajectoryLog log{TrajectoryLog::Kind::Percept};
  std::optional<DwellStats> stats;  ///< empty when the run never switched
};

/// Markov percept chain over the kernel's attractors. noise_amplitude a in
/// [0, 1] blends the kernel with the identity, K' = (1 - a) I + a K, so a = 1
/// uses the kernel as given and a = 0 freezes the percept.
PerceptionResult run_perception(const SwitchKernel& kernel, double noise_amplitude, std::int64_t steps,
                                std::uint64_t seed, int initial_percept = 0);

/// Uniform K-state kernel with diagonal p_stay and equal off-diagonals.
SwitchKernel uniform_kernel(std::size_t k, double p_stay);

}  // namespace bib
