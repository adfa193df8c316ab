#include "bibfractal/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bibfractal/error.hpp"
#include "bibfractal/parallel.hpp"

namespace bib {
namespace {

// Aberth-Ehrlich simultaneous iteration on the monic polynomial.
std::vector<Complex> aberth_roots(const std::vector<Complex>& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  const Complex lead = coeffs.back();
  std::vector<Complex> monic(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) monic[k] = coeffs[k] / lead;

  auto eval = [&](Complex z, Complex& f, Complex& df) {
    f = monic[n];
    df = 0.0;
    for (int k = n - 1; k >= 0; --k) {
      df = df * z + f;
      f = f * z + monic[k];
    }
  };

  // Cauchy bound for the initial circle.
  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(monic[k]));
  radius = 1.0 + radius;

  std::vector<Complex> z(n);
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n + 0.4;
    z[k] = std::polar(0.5 * radius, angle);
  }

  for (int iter = 0; iter < 500; ++iter) {
    double max_shift = 0.0;
    for (int k = 0; k < n; ++k) {
      Complex f, df;
      eval(z[k], f, df);
      if (f == Complex{}) continue;
      const Complex ratio = f / df;
      Complex repulsion{};
      for (int j = 0; j < n; ++j)
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      const Complex shift = ratio / (1.0 - ratio * repulsion);
      z[k] -= shift;
      max_shift = std::max(max_shift, std::abs(shift) / std::max(1.0, std::abs(z[k])));
    }
    if (max_shift < 1e-15) break;
  }

  // A few plain Newton polishes; harmless for simple roots.
  for (auto& r : z) {
    for (int iter = 0; iter < 3; ++iter) {
      Complex f, df;
      eval(r, f, df);
      if (std::abs(df) == 0.0) break;
      const Complex next = r - f / df;
      Complex fn, dfn;
      eval(next, fn, dfn);
      if (std::abs(fn) >= std::abs(f)) break;
      r = next;
    }
    const double scale = std::max(1.0, std::abs(r));
    if (std::abs(r.imag()) < 1e-13 * scale) r.imag(0.0);
    if (std::abs(r.real()) < 1e-13 * scale) r.real(0.0);
  }
  return z;
}

double argument_key(Complex z) {
  double a = std::arg(z);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

double clipped_log_abs(Complex value) {
  const double m = std::abs(value);
  if (!(m > 0.0)) return -kFtleClip;
  return std::clamp(std::log(m), -kFtleClip, kFtleClip);
}

int captured_root(const std::vector<Complex>& roots, Complex z, double radius) {
  for (std::size_t k = 0; k < roots.size(); ++k)
    if (std::abs(z - roots[k]) < radius) return static_cast<int>(k);
  return -1;
}

}  // namespace

PolynomialMap::PolynomialMap(std::vector<Complex> coefficients)
    : coefficients_(std::move(coefficients)) {
  require(coefficients_.size() >= 3, ErrorCode::InvalidArgument,
          "polynomial degree must be at least 2");
  require(coefficients_.back() != Complex{}, ErrorCode::InvalidArgument,
          "leading coefficient must be nonzero");
  for (const auto& c : coefficients_)
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), ErrorCode::InvalidArgument,
            "coefficients must be finite");

  derivative_floor_ = 1e-14 * std::abs(coefficients_.back());
  double scale = 0.0;
  for (const auto& c : coefficients_) scale = std::max(scale, std::abs(c));
  root_tolerance_ = 1e-8 * scale;

  roots_ = aberth_roots(coefficients_);
  std::stable_sort(roots_.begin(), roots_.end(), [](Complex a, Complex b) {
    const double ka = argument_key(a), kb = argument_key(b);
    if (ka != kb) return ka < kb;
    return std::abs(a) < std::abs(b);
  });
  for (const auto& r : roots_)
    require(std::abs(value(r)) < root_tolerance_, ErrorCode::InvalidArgument,
            "root finder failed to converge");
}

PolynomialMap PolynomialMap::cubic_unity() { return PolynomialMap({-1.0, 0.0, 0.0, 1.0}); }

bool PolynomialMap::has_real_coefficients() const {
  return std::all_of(coefficients_.begin(), coefficients_.end(),
                     [](Complex c) { return c.imag() == 0.0; });
}

Complex PolynomialMap::value(Complex z) const {
  Complex f = coefficients_.back();
  for (int k = degree() - 1; k >= 0; --k) f = f * z + coefficients_[k];
  return f;
}

Complex PolynomialMap::derivative(Complex z) const { return jet(z).df; }

PolynomialMap::Jet PolynomialMap::jet(Complex z) const {
  Complex f = coefficients_.back(), df{}, d2f{};
  for (int k = degree() - 1; k >= 0; --k) {
    d2f = d2f * z + df;
    df = df * z + f;
    f = f * z + coefficients_[k];
  }
  return {f, df, 2.0 * d2f};
}

Complex newton_step(const PolynomialMap& map, Complex z) {
  const auto j = map.jet(z);
  require(std::abs(j.df) > map.derivative_floor(), ErrorCode::SingularDerivative,
          "|f'(z)| below derivative floor");
  return z - j.f / j.df;
}

Complex newton_map_derivative(const PolynomialMap& map, Complex z) {
  const auto j = map.jet(z);
  require(std::abs(j.df) > map.derivative_floor(), ErrorCode::SingularDerivative,
          "|f'(z)| below derivative floor");
  return j.f * j.d2f / (j.df * j.df);
}

Orbit iterate_orbit(const PolynomialMap& map, Complex z0, IterationLimits limits) {
  require(limits.max_iters >= 1, ErrorCode::InvalidArgument, "max_iters must be >= 1");
  Orbit orbit;
  orbit.points.push_back(z0);
  Complex z = z0;
  double log_sum = 0.0;
  int terms = 0;
  for (int n = 0;; ++n) {
    const auto j = map.jet(z);
    const bool regular = std::abs(j.df) > map.derivative_floor();
    if (regular) {
      log_sum += clipped_log_abs(j.f * j.d2f / (j.df * j.df));
      ++terms;
    }
    const int root = captured_root(map.roots(), z, limits.convergence_radius);
    if (root >= 0) {
      orbit.status = Termination::Converged;
      orbit.root_index = root;
      break;
    }
    if (n == limits.max_iters) {
      orbit.status = Termination::MaxItersExceeded;
      break;
    }
    if (!regular) {
      orbit.status = Termination::SingularDerivative;
      break;
    }
    z -= j.f / j.df;
    orbit.points.push_back(z);
  }
  orbit.ftle = terms > 0 ? log_sum / terms : 0.0;
  return orbit;
}

OrbitOutcome orbit_outcome(const PolynomialMap& map, Complex z0, IterationLimits limits) {
  OrbitOutcome out;
  Complex z = z0;
  const auto& roots = map.roots();
  for (int n = 0;; ++n) {
    const int root = captured_root(roots, z, limits.convergence_radius);
    if (root >= 0) {
      out = {Termination::Converged, root, n};
      return out;
    }
    if (n == limits.max_iters) return {Termination::MaxItersExceeded, -1, n};
    const auto j = map.jet(z);
    if (!(std::abs(j.df) > map.derivative_floor())) return {Termination::SingularDerivative, -1, n};
    z -= j.f / j.df;
  }
}

double transient_ftle(const PolynomialMap& map, Complex z0, int horizon, IterationLimits limits) {
  require(horizon >= 1, ErrorCode::InvalidArgument, "horizon must be >= 1");
  const auto orbit = iterate_orbit(map, z0, {std::min(horizon, limits.max_iters), limits.convergence_radius});
  // Steps actually taken, capped by the horizon.
  const int steps = std::max(1, std::min(horizon, orbit.steps()));
  double log_sum = 0.0;
  int terms = 0;
  for (int k = 0; k < steps && k < static_cast<int>(orbit.points.size()); ++k) {
    const auto j = map.jet(orbit.points[k]);
    if (!(std::abs(j.df) > map.derivative_floor())) {
      log_sum += kFtleClip;
    } else {
      log_sum += clipped_log_abs(j.f * j.d2f / (j.df * j.df));
    }
    ++terms;
  }
  return log_sum / terms;
}

double lyapunov_time(double ftle) {
  if (ftle > 0.0) return 1.0 / ftle;
  return std::numeric_limits<double>::infinity();
}

GridSpec GridSpec::window(double xmin, double xmax, double ymin, double ymax, int nx, int ny) {
  require(xmax > xmin && ymax > ymin, ErrorCode::InvalidArgument, "empty window");
  require(nx >= 1 && ny >= 1, ErrorCode::InvalidArgument, "resolution must be positive");
  return {Complex{xmin, ymin}, Complex{xmax - xmin, ymax - ymin}, nx, ny};
}

Disk Disk::inscribed(const GridSpec& spec) {
  return {spec.origin + 0.5 * spec.extent, 0.5 * std::min(spec.extent.real(), spec.extent.imag())};
}

double GridSpec::cell_diagonal() const { return std::hypot(cell_width(), cell_height()); }

Complex GridSpec::cell_center(int i, int j) const {
  return origin + Complex{(i + 0.5) / nx * extent.real(), (j + 0.5) / ny * extent.imag()};
}

std::optional<std::pair<int, int>> GridSpec::cell_of(Complex z) const {
  const double u = (z.real() - origin.real()) / extent.real();
  const double v = (z.imag() - origin.imag()) / extent.imag();
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) return std::nullopt;
  const int i = std::min(nx - 1, static_cast<int>(u * nx));
  const int j = std::min(ny - 1, static_cast<int>(v * ny));
  return std::make_pair(i, j);
}

ComplexGrid label_grid(const PolynomialMap& map, const GridSpec& spec, IterationLimits limits,
                       unsigned threads) {
  require(spec.nx >= 2 && spec.ny >= 2, ErrorCode::InvalidArgument, "resolution must be at least 2x2");
  require(limits.max_iters >= 1, ErrorCode::InvalidArgument, "max_iters must be >= 1");
  ComplexGrid grid;
  grid.spec = spec;
  grid.root_count = map.degree();
  grid.labels.assign(spec.cell_count(), kUnresolved);
  grid.iters.assign(spec.cell_count(), 0);
  parallel_for(static_cast<std::size_t>(spec.ny), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      for (int i = 0; i < spec.nx; ++i) {
        const auto out = orbit_outcome(map, spec.cell_center(i, static_cast<int>(j)), limits);
        const auto idx = spec.index(i, static_cast<int>(j));
        grid.labels[idx] = out.status == Termination::Converged ? out.root_index : kUnresolved;
        grid.iters[idx] = out.steps;
      }
    }
  });
  return grid;
}

}  // namespace bib
