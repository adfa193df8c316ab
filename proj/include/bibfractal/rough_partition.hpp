#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bibfractal/fractal_metrics.hpp"
#include "bibfractal/newton.hpp"

namespace bib {

enum class ThetaNormalization {
  ShellOverOuter,  ///< area(R+ \ R-) / area(R+)
  ShellOverGrid,   ///< area(R+ \ R-) / area(grid)
};

/// Coarse-graining of one basin: inner region R- (certainly in the basin),
/// outer region R+ (certainly containing it) and the uncertain shell between.
/// Masks are row-major over spec.
struct Partition {
  GridSpec spec;
  int basin = 0;
  int dilation_radius = 0;
  std::vector<std::uint8_t> inner;
  std::vector<std::uint8_t> outer;
  std::vector<std::uint8_t> shell;
  double theta = 0.0;

  std::size_t inner_count() const;
  std::size_t outer_count() const;
  std::size_t shell_count() const;
};

/// R+ = basin cells dilated by `dilation_radius` (Chebyshev metric) united
/// with the boundary mask; R- = basin cells eroded by the same radius, with
/// neighborhoods clipped to the window. Throws EmptyInner when erosion
/// removes every cell.
Partition build_partition(const ComplexGrid& grid, const BoundaryMask& mask, int basin,
                          int dilation_radius,
                          ThetaNormalization normalization = ThetaNormalization::ShellOverOuter);

/// One partition per root of the grid, in root order.
std::vector<Partition> build_partitions(const ComplexGrid& grid, const BoundaryMask& mask,
                                        int dilation_radius,
                                        ThetaNormalization normalization = ThetaNormalization::ShellOverOuter);

enum class Region { Inside, Outside, Uncertain };

/// Throws OutOfWindow when z lies outside the partition's window.
Region classify_point(const Partition& partition, Complex z);

/// Row-stochastic transition matrix between attractors; row/column k refers
/// to basins[k].
struct SwitchKernel {
  std::vector<int> basins;
  std::vector<std::vector<double>> p;
  std::size_t samples_per_row = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return p.size(); }
};

/// Builds a kernel from its rows after validating shape and stochasticity.
SwitchKernel make_kernel(std::vector<std::vector<double>> rows);

struct KernelOptions {
  std::size_t samples_per_row = 10000;
  std::uint64_t seed = 1;
  IterationLimits limits{};
  double jitter_cells = 1.0;  ///< jitter radius in cell diagonals
  unsigned threads = 0;
  /// When set, only shell cells whose centers lie in this disk are sampled.
  std::optional<Disk> region;
};

/// Monte-Carlo transition frequencies: for each partition, sample points
/// uniformly from its uncertain shell, perturb each by a random offset of at
/// most jitter_cells cell diagonals, and tally which root the perturbed orbit
/// reaches. Sample s of row k draws from its own stream derived from
/// (seed, k, s), so the tally is independent of thread count. A single
/// partition yields the 1x1 identity. Throws EmptyShell.
SwitchKernel switch_kernel(const PolynomialMap& map, const ComplexGrid& grid,
                           std::span<const Partition> partitions, const KernelOptions& options = {});

}  // namespace bib
