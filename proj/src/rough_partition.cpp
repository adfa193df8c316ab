#include "bibfractal/rough_partition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "bibfractal/error.hpp"
#include "bibfractal/parallel.hpp"

namespace bib {
namespace {

using Mask = std::vector<std::uint8_t>;

// One separable pass of a clipped square max (dilate) or min (erode) filter.
Mask filter_1d(const Mask& in, int nx, int ny, int radius, bool horizontal, bool dilate) {
  Mask out(in.size(), 0);
  const int lines = horizontal ? ny : nx;
  const int length = horizontal ? nx : ny;
  std::vector<int> prefix(static_cast<std::size_t>(length) + 1);
  for (int line = 0; line < lines; ++line) {
    auto at = [&](int k) -> std::size_t {
      return horizontal ? static_cast<std::size_t>(line) * nx + k : static_cast<std::size_t>(k) * nx + line;
    };
    prefix[0] = 0;
    for (int k = 0; k < length; ++k) prefix[k + 1] = prefix[k] + in[at(k)];
    for (int k = 0; k < length; ++k) {
      const int lo = std::max(0, k - radius), hi = std::min(length - 1, k + radius);
      const int set = prefix[hi + 1] - prefix[lo];
      out[at(k)] = dilate ? (set > 0) : (set == hi - lo + 1);
    }
  }
  return out;
}

Mask morph(const Mask& in, int nx, int ny, int radius, bool dilate) {
  return filter_1d(filter_1d(in, nx, ny, radius, true, dilate), nx, ny, radius, false, dilate);
}

std::size_t popcount(const Mask& m) {
  return static_cast<std::size_t>(std::count(m.begin(), m.end(), std::uint8_t{1}));
}

}  // namespace

std::size_t Partition::inner_count() const { return popcount(inner); }
std::size_t Partition::outer_count() const { return popcount(outer); }
std::size_t Partition::shell_count() const { return popcount(shell); }

Partition build_partition(const ComplexGrid& grid, const BoundaryMask& mask, int basin,
                          int dilation_radius, ThetaNormalization normalization) {
  require(basin >= 0 && basin < grid.root_count, ErrorCode::InvalidArgument, "basin index out of range");
  require(dilation_radius >= 1, ErrorCode::InvalidArgument, "dilation radius must be >= 1");
  const int nx = grid.spec.nx, ny = grid.spec.ny;
  require(mask.nx == nx && mask.ny == ny, ErrorCode::ShapeMismatch, "mask and grid resolutions differ");

  Mask in_basin(grid.labels.size());
  for (std::size_t k = 0; k < in_basin.size(); ++k) in_basin[k] = grid.labels[k] == basin;

  Partition part;
  part.spec = grid.spec;
  part.basin = basin;
  part.dilation_radius = dilation_radius;
  part.outer = morph(in_basin, nx, ny, dilation_radius, true);
  for (std::size_t k = 0; k < part.outer.size(); ++k) part.outer[k] |= mask.cells[k];
  part.inner = morph(in_basin, nx, ny, dilation_radius, false);
  require(popcount(part.inner) > 0, ErrorCode::EmptyInner, "erosion removed the whole basin");

  part.shell.resize(part.outer.size());
  for (std::size_t k = 0; k < part.shell.size(); ++k) part.shell[k] = part.outer[k] && !part.inner[k];

  const double shell = static_cast<double>(popcount(part.shell));
  const double denom = normalization == ThetaNormalization::ShellOverOuter
                           ? static_cast<double>(popcount(part.outer))
                           : static_cast<double>(grid.spec.cell_count());
  part.theta = shell / denom;
  return part;
}

std::vector<Partition> build_partitions(const ComplexGrid& grid, const BoundaryMask& mask,
                                        int dilation_radius, ThetaNormalization normalization) {
  std::vector<Partition> parts;
  for (int k = 0; k < grid.root_count; ++k)
    parts.push_back(build_partition(grid, mask, k, dilation_radius, normalization));
  return parts;
}

Region classify_point(const Partition& partition, Complex z) {
  const auto cell = partition.spec.cell_of(z);
  require(cell.has_value(), ErrorCode::OutOfWindow, "point outside the partition window");
  const auto idx = partition.spec.index(cell->first, cell->second);
  if (partition.inner[idx]) return Region::Inside;
  if (!partition.outer[idx]) return Region::Outside;
  return Region::Uncertain;
}

SwitchKernel make_kernel(std::vector<std::vector<double>> rows) {
  require(!rows.empty(), ErrorCode::InvalidArgument, "kernel must have at least one row");
  const auto k = rows.size();
  for (const auto& row : rows) {
    require(row.size() == k, ErrorCode::ShapeMismatch, "kernel must be square");
    double sum = 0.0;
    for (double v : row) {
      require(v >= 0.0 && std::isfinite(v), ErrorCode::InvalidArgument, "kernel entries must be nonnegative");
      sum += v;
    }
    require(std::abs(sum - 1.0) < 1e-9, ErrorCode::InvalidArgument, "kernel rows must sum to 1");
  }
  SwitchKernel kernel;
  for (std::size_t b = 0; b < k; ++b) kernel.basins.push_back(static_cast<int>(b));
  kernel.p = std::move(rows);
  return kernel;
}

SwitchKernel switch_kernel(const PolynomialMap& map, const ComplexGrid& grid,
                           std::span<const Partition> partitions, const KernelOptions& options) {
  require(!partitions.empty(), ErrorCode::InvalidArgument, "need one partition per attractor");
  SwitchKernel kernel;
  kernel.samples_per_row = options.samples_per_row;
  kernel.seed = options.seed;
  for (const auto& p : partitions) {
    require(p.spec == grid.spec, ErrorCode::ShapeMismatch, "partition window differs from grid");
    kernel.basins.push_back(p.basin);
  }
  require(std::set<int>(kernel.basins.begin(), kernel.basins.end()).size() == kernel.basins.size(),
          ErrorCode::InvalidArgument, "duplicate basin in partition list");

  const std::size_t k_count = partitions.size();
  if (k_count == 1) {
    kernel.p = {{1.0}};
    return kernel;
  }
  require(options.samples_per_row >= 1, ErrorCode::InvalidArgument, "need at least one sample per row");

  std::vector<int> column_of(static_cast<std::size_t>(grid.root_count), -1);
  for (std::size_t c = 0; c < k_count; ++c) column_of.at(static_cast<std::size_t>(kernel.basins[c])) = static_cast<int>(c);

  const double jitter = options.jitter_cells * grid.spec.cell_diagonal();
  constexpr int kMaxAttempts = 64;
  kernel.p.assign(k_count, std::vector<double>(k_count, 0.0));

  for (std::size_t row = 0; row < k_count; ++row) {
    std::vector<std::size_t> shell_cells;
    const auto& shell = partitions[row].shell;
    for (std::size_t idx = 0; idx < shell.size(); ++idx) {
      if (!shell[idx]) continue;
      if (options.region) {
        const int i = static_cast<int>(idx % static_cast<std::size_t>(grid.spec.nx));
        const int j = static_cast<int>(idx / static_cast<std::size_t>(grid.spec.nx));
        if (!options.region->contains(grid.spec.cell_center(i, j))) continue;
      }
      shell_cells.push_back(idx);
    }
    require(!shell_cells.empty(), ErrorCode::EmptyShell, "partition has an empty uncertain shell");

    // Destination per sample; -1 when every attempt failed to converge.
    std::vector<int> destination(options.samples_per_row, -1);
    parallel_for(options.samples_per_row, options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t s = begin; s < end; ++s) {
        SplitMix64 rng(stream_seed(options.seed, row, s));
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
          const auto idx = shell_cells[rng.below(shell_cells.size())];
          const int i = static_cast<int>(idx % static_cast<std::size_t>(grid.spec.nx));
          const int j = static_cast<int>(idx / static_cast<std::size_t>(grid.spec.nx));
          const double r = jitter * std::sqrt(rng.uniform());
          const double phi = 2.0 * std::numbers::pi * rng.uniform();
          const Complex z = grid.spec.cell_center(i, j) + std::polar(r, phi);
          const auto out = orbit_outcome(map, z, options.limits);
          if (out.status != Termination::Converged) continue;
          const int col = column_of[static_cast<std::size_t>(out.root_index)];
          if (col < 0) continue;
          destination[s] = col;
          break;
        }
      }
    });

    std::vector<std::size_t> counts(k_count, 0);
    std::size_t total = 0;
    for (int d : destination)
      if (d >= 0) {
        ++counts[static_cast<std::size_t>(d)];
        ++total;
      }
    require(total > 0, ErrorCode::EmptyShell, "no shell sample reached a partitioned attractor");
    for (std::size_t c = 0; c < k_count; ++c)
      kernel.p[row][c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  }
  return kernel;
}

}  // namespace bib
