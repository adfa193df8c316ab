#include "bibfractal/fractal_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "bibfractal/error.hpp"
#include "bibfractal/parallel.hpp"
#include "bibfractal/rough_partition.hpp"
#include "bibfractal/statistics.hpp"

namespace bib {

BoundaryMask BoundaryMask::empty(int nx, int ny) {
  require(nx >= 1 && ny >= 1, ErrorCode::InvalidArgument, "mask resolution must be positive");
  return {nx, ny, std::vector<std::uint8_t>(static_cast<std::size_t>(nx) * ny, 0)};
}

std::size_t BoundaryMask::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

BoundaryMask extract_boundary(const ComplexGrid& grid) {
  const int nx = grid.spec.nx, ny = grid.spec.ny;
  require(grid.labels.size() == grid.spec.cell_count(), ErrorCode::ShapeMismatch,
          "label array does not match grid resolution");
  const std::set<int> distinct(grid.labels.begin(), grid.labels.end());
  require(distinct.size() >= 2, ErrorCode::DegenerateGrid, "grid has a single label; no boundary");

  auto mask = BoundaryMask::empty(nx, ny);
  auto differs = [&](int a, int b) { return a == kUnresolved || b == kUnresolved || a != b; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int here = grid.label(i, j);
      bool marked = here == kUnresolved;
      if (!marked && i > 0) marked = differs(here, grid.label(i - 1, j));
      if (!marked && i + 1 < nx) marked = differs(here, grid.label(i + 1, j));
      if (!marked && j > 0) marked = differs(here, grid.label(i, j - 1));
      if (!marked && j + 1 < ny) marked = differs(here, grid.label(i, j + 1));
      mask.cells[grid.spec.index(i, j)] = marked ? 1 : 0;
    }
  }
  return mask;
}

std::vector<int> default_box_sizes(int nx, int ny) {
  std::vector<int> sizes;
  const int limit = std::min(nx, ny) / 8;
  for (int s = 2; s <= limit; s *= 2) sizes.push_back(s);
  return sizes;
}

DimensionEstimate box_counting_dimension(const BoundaryMask& mask, std::span<const int> sizes,
                                         unsigned threads) {
  require(sizes.size() >= 4, ErrorCode::InvalidArgument, "box counting needs at least 4 sizes");
  require(std::all_of(sizes.begin(), sizes.end(), [](int s) { return s >= 1; }),
          ErrorCode::InvalidArgument, "box sizes must be positive");
  require(std::set<int>(sizes.begin(), sizes.end()).size() == sizes.size(),
          ErrorCode::InvalidArgument, "box sizes must be distinct");
  require(mask.cells.size() == static_cast<std::size_t>(mask.nx) * mask.ny, ErrorCode::ShapeMismatch,
          "mask cell array does not match its resolution");
  require(mask.count() > 0, ErrorCode::EmptyMask, "boundary mask is empty");

  DimensionEstimate est;
  est.box_sizes.assign(sizes.begin(), sizes.end());
  est.counts.assign(sizes.size(), 0);
  parallel_for(sizes.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const int s = sizes[k];
      const int bx = (mask.nx + s - 1) / s, by = (mask.ny + s - 1) / s;
      std::vector<std::uint8_t> boxes(static_cast<std::size_t>(bx) * by, 0);
      for (int j = 0; j < mask.ny; ++j)
        for (int i = 0; i < mask.nx; ++i)
          if (mask.at(i, j)) boxes[static_cast<std::size_t>(j / s) * bx + i / s] = 1;
      est.counts[k] = std::count(boxes.begin(), boxes.end(), std::uint8_t{1});
    }
  });

  std::vector<double> x, y;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    x.push_back(std::log(1.0 / sizes[k]));
    y.push_back(std::log(static_cast<double>(est.counts[k])));
  }
  const auto fit = fit_line(x, y);
  est.slope = fit.slope;
  est.intercept = fit.intercept;
  est.r2 = fit.r2;
  return est;
}

MeasureReport measure_report(const ComplexGrid& grid, const BoundaryMask& mask,
                             const Partition* partition) {
  require(mask.nx == grid.spec.nx && mask.ny == grid.spec.ny, ErrorCode::ShapeMismatch,
          "mask and grid resolutions differ");
  if (partition)
    require(partition->spec.nx == grid.spec.nx && partition->spec.ny == grid.spec.ny,
            ErrorCode::ShapeMismatch, "partition and grid resolutions differ");

  const double total = static_cast<double>(grid.spec.cell_count());
  MeasureReport report;
  std::vector<std::size_t> counts(static_cast<std::size_t>(grid.root_count), 0);
  std::size_t unresolved = 0;
  for (int label : grid.labels) {
    if (label == kUnresolved)
      ++unresolved;
    else
      ++counts.at(static_cast<std::size_t>(label));
  }
  for (auto c : counts) report.basin_fractions.push_back(static_cast<double>(c) / total);
  report.unresolved_fraction = static_cast<double>(unresolved) / total;
  report.boundary_fraction = static_cast<double>(mask.count()) / total;
  if (partition) {
    const auto shell = std::count(partition->shell.begin(), partition->shell.end(), std::uint8_t{1});
    report.uncertain_fraction = static_cast<double>(shell) / total;
  }
  return report;
}

std::vector<double> basin_fractions_within(const ComplexGrid& grid, const Disk& region) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(grid.root_count), 0);
  std::size_t total = 0;
  for (int j = 0; j < grid.spec.ny; ++j)
    for (int i = 0; i < grid.spec.nx; ++i) {
      if (!region.contains(grid.spec.cell_center(i, j))) continue;
      ++total;
      const int label = grid.labels[grid.spec.index(i, j)];
      if (label != kUnresolved) ++counts.at(static_cast<std::size_t>(label));
    }
  require(total > 0, ErrorCode::EmptyMask, "no cell center inside the region");
  std::vector<double> fractions;
  for (auto c : counts) fractions.push_back(static_cast<double>(c) / static_cast<double>(total));
  return fractions;
}

EquivarianceReport rotational_equivariance(const PolynomialMap& map, const ComplexGrid& grid, int order,
                                           const IterationLimits& limits, unsigned threads) {
  require(order >= 2, ErrorCode::InvalidArgument, "rotation order must be at least 2");
  require(static_cast<int>(map.roots().size()) == grid.root_count, ErrorCode::ShapeMismatch,
          "grid was not labeled with this map");
  const Complex w = std::polar(1.0, 2.0 * std::numbers::pi / order);
  const auto& roots = map.roots();

  EquivarianceReport report;
  for (const auto& r : roots) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < roots.size(); ++c)
      if (std::abs(roots[c] - w * r) < std::abs(roots[best] - w * r)) best = c;
    require(std::abs(roots[best] - w * r) <= map.root_tolerance() * 10.0 + 1e-9, ErrorCode::InvalidArgument,
            "roots are not closed under the rotation");
    report.root_permutation.push_back(static_cast<int>(best));
  }
  const auto rotate_label = [&](int label) {
    return label == kUnresolved ? kUnresolved : report.root_permutation[static_cast<std::size_t>(label)];
  };

  const auto window_contains = [&](Complex z) {
    return z.real() >= grid.spec.xmin() && z.real() <= grid.spec.xmax() && z.imag() >= grid.spec.ymin() &&
           z.imag() <= grid.spec.ymax();
  };

  const auto cells = grid.spec.cell_count();
  std::vector<std::uint8_t> counted(cells, 0), violated(cells, 0);
  parallel_for(cells, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const int i = static_cast<int>(idx % static_cast<std::size_t>(grid.spec.nx));
      const int j = static_cast<int>(idx / static_cast<std::size_t>(grid.spec.nx));
      const Complex z = grid.spec.cell_center(i, j);
      bool closed = true;
      Complex zr = z;
      for (int m = 1; m < order && closed; ++m) {
        zr *= w;
        closed = window_contains(zr);
      }
      if (!closed) continue;
      counted[idx] = 1;
      int expected = grid.labels[idx];
      zr = z;
      for (int m = 1; m < order; ++m) {
        zr *= w;
        expected = rotate_label(expected);
        const auto out = orbit_outcome(map, zr, limits);
        const int label = out.status == Termination::Converged ? out.root_index : kUnresolved;
        if (label != expected) {
          violated[idx] = 1;
          break;
        }
      }
    }
  });
  report.triples = static_cast<std::size_t>(std::count(counted.begin(), counted.end(), std::uint8_t{1}));
  report.violations = static_cast<std::size_t>(std::count(violated.begin(), violated.end(), std::uint8_t{1}));
  return report;
}

}  // namespace bib
