#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bibfractal/newton.hpp"

namespace bib {

struct Partition;

/// Cells adjacent to a basin change. A cell is marked iff it is Unresolved,
/// or one of its 4-neighbors carries a different label or is Unresolved.
struct BoundaryMask {
  int nx = 0;
  int ny = 0;
  std::vector<std::uint8_t> cells;

  static BoundaryMask empty(int nx, int ny);

  bool at(int i, int j) const { return cells[static_cast<std::size_t>(j) * nx + i] != 0; }
  std::size_t count() const;
};

/// Throws DegenerateGrid when the grid carries fewer than two distinct labels.
BoundaryMask extract_boundary(const ComplexGrid& grid);

struct DimensionEstimate {
  std::vector<int> box_sizes;
  std::vector<std::int64_t> counts;
  double slope = 0.0;      ///< d log(count) / d log(1/box_size)
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Fits with r2 below this are reported but flagged by callers.
inline constexpr double kDimensionFitWarnR2 = 0.98;

/// Powers of two from 2 up to min(nx, ny)/8.
std::vector<int> default_box_sizes(int nx, int ny);

/// Box counting over a ceil(nx/s) x ceil(ny/s) tiling; partial edge boxes
/// count. Requires at least four distinct positive sizes; throws EmptyMask.
DimensionEstimate box_counting_dimension(const BoundaryMask& mask, std::span<const int> sizes,
                                         unsigned threads = 0);

struct MeasureReport {
  std::vector<double> basin_fractions;
  double unresolved_fraction = 0.0;
  double boundary_fraction = 0.0;
  std::optional<double> uncertain_fraction;  ///< shell area over grid area, when a partition is given
};

/// Area fractions by cell counting. Throws ShapeMismatch when the mask or
/// partition resolution differs from the grid.
MeasureReport measure_report(const ComplexGrid& grid, const BoundaryMask& mask,
                             const Partition* partition = nullptr);

/// Basin area fractions over the cells whose centers lie in `region`
/// (unresolved cells included in the denominator). Throws EmptyMask when no
/// cell center falls inside.
std::vector<double> basin_fractions_within(const ComplexGrid& grid, const Disk& region);

struct EquivarianceReport {
  std::size_t triples = 0;
  std::size_t violations = 0;
  std::vector<int> root_permutation;  ///< root r maps to root_permutation[r] under z -> w z

  double violation_fraction() const {
    return triples == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(triples);
  }
};

/// Checks label(w^m z) = sigma^m(label(z)) for w = exp(2 pi i / order), over
/// every cell center z whose rotations all stay in the window. The rotated
/// points are iterated directly rather than snapped to cells, so the check
/// measures the dynamics and not the lattice. Unresolved must map to
/// Unresolved. Throws InvalidArgument when the roots are not closed under
/// the rotation.
EquivarianceReport rotational_equivariance(const PolynomialMap& map, const ComplexGrid& grid, int order,
                                           const IterationLimits& limits = {}, unsigned threads = 0);

}  // namespace bib
