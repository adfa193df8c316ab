#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace bib {

using Complex = std::complex<double>;

/// Polynomial f(z) with complex coefficients, constant term first. The roots
/// are computed once at construction and ordered by argument in [0, 2pi),
/// so for z^3 - 1 the order is 1, w, w^2 with w = exp(2pi i/3).
class PolynomialMap {
 public:
  explicit PolynomialMap(std::vector<Complex> coefficients);

  /// f(z) = z^3 - 1.
  static PolynomialMap cubic_unity();

  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  std::span<const Complex> coefficients() const { return coefficients_; }
  const std::vector<Complex>& roots() const { return roots_; }
  bool has_real_coefficients() const;

  Complex value(Complex z) const;
  Complex derivative(Complex z) const;

  /// f, f' and f'' in one Horner pass.
  struct Jet {
    Complex f, df, d2f;
  };
  Jet jet(Complex z) const;

  /// |f'(z)| at or below this is treated as singular for the Newton step.
  double derivative_floor() const { return derivative_floor_; }

  /// Root acceptance bound on |f(root)|, scaled by the largest coefficient.
  double root_tolerance() const { return root_tolerance_; }

 private:
  std::vector<Complex> coefficients_;
  std::vector<Complex> roots_;
  double derivative_floor_ = 0.0;
  double root_tolerance_ = 0.0;
};

/// One Newton step z - f(z)/f'(z). Throws SingularDerivative when
/// |f'(z)| <= derivative_floor.
Complex newton_step(const PolynomialMap& map, Complex z);

/// Derivative of the Newton map, N'(z) = f(z) f''(z) / f'(z)^2.
Complex newton_map_derivative(const PolynomialMap& map, Complex z);

enum class Termination : std::uint8_t { Converged, MaxItersExceeded, SingularDerivative };

struct IterationLimits {
  int max_iters = 200;
  double convergence_radius = 1e-9;
};

/// Per-step log-derivatives are clipped to this magnitude so superattracting
/// roots (N' = 0) and singular points do not produce infinities.
inline constexpr double kFtleClip = 50.0;

struct Orbit {
  std::vector<Complex> points;  ///< z_0 .. z_n
  Termination status = Termination::MaxItersExceeded;
  int root_index = -1;          ///< valid when status == Converged
  double ftle = 0.0;            ///< nats per iteration

  int steps() const { return static_cast<int>(points.size()) - 1; }
};

/// Iterates the Newton map from z0 until the orbit enters the convergence
/// disk of a root, hits a singular derivative, or takes max_iters steps.
/// ftle is the mean of clip(ln|N'(z_k)|) over every orbit point where N' is
/// defined.
Orbit iterate_orbit(const PolynomialMap& map, Complex z0, IterationLimits limits = {});

struct OrbitOutcome {
  Termination status = Termination::MaxItersExceeded;
  int root_index = -1;
  int steps = 0;
};

/// Same termination rule as iterate_orbit without storing points or
/// accumulating the exponent.
OrbitOutcome orbit_outcome(const PolynomialMap& map, Complex z0, IterationLimits limits = {});

/// Finite-horizon exponent (1/T) ln|(N^T)'(z0)| with T = min(horizon, steps
/// until capture). Measures the local stretching an orbit sees before it is
/// absorbed by a root; positive near basin boundaries.
double transient_ftle(const PolynomialMap& map, Complex z0, int horizon,
                      IterationLimits limits = {});

/// Lyapunov time 1/ftle for ftle > 0, +infinity otherwise.
double lyapunov_time(double ftle);

inline constexpr int kUnresolved = -1;

/// Rectangular sampling of the complex plane. Cell (i, j) has center
/// origin + ((i + 0.5)/nx) Re(extent) + i ((j + 0.5)/ny) Im(extent);
/// j grows with the imaginary part.
struct GridSpec {
  Complex origin{-2.0, -2.0};
  Complex extent{4.0, 4.0};
  int nx = 2;
  int ny = 2;

  static GridSpec window(double xmin, double xmax, double ymin, double ymax, int nx, int ny);

  double xmin() const { return origin.real(); }
  double xmax() const { return origin.real() + extent.real(); }
  double ymin() const { return origin.imag(); }
  double ymax() const { return origin.imag() + extent.imag(); }
  double cell_width() const { return extent.real() / nx; }
  double cell_height() const { return extent.imag() / ny; }
  double cell_diagonal() const;
  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

  Complex cell_center(int i, int j) const;
  /// Cell containing z, or nullopt outside the closed window.
  std::optional<std::pair<int, int>> cell_of(Complex z) const;

  bool operator==(const GridSpec&) const = default;
};

/// Closed disk in the complex plane. The disk inscribed in a square window
/// centred on the origin is closed under rotation, unlike the window itself.
struct Disk {
  Complex center{0.0, 0.0};
  double radius = 0.0;

  bool contains(Complex z) const { return std::abs(z - center) <= radius; }
  static Disk inscribed(const GridSpec& spec);
};

/// Per-cell basin labels (root index or kUnresolved) and iteration counts,
/// stored row-major with j as the row.
struct ComplexGrid {
  GridSpec spec;
  int root_count = 0;
  std::vector<int> labels;
  std::vector<int> iters;

  int label(int i, int j) const { return labels[spec.index(i, j)]; }
};

/// Labels every cell by the terminal status of its center's orbit. Cells are
/// independent; threads = 0 uses all hardware threads. Output does not depend
/// on the thread count.
ComplexGrid label_grid(const PolynomialMap& map, const GridSpec& spec, IterationLimits limits = {},
                       unsigned threads = 0);

}  // namespace bib
