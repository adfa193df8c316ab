#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bib {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs at least two
/// distinct x values.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> values);
double median(std::vector<double> values);

/// Hurwitz zeta(s, q) = sum_{k>=0} (k + q)^-s for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// Discrete power-law tail p(x) ~ x^-alpha for integer x >= x_min, fitted by
/// maximum likelihood with x_min chosen to minimize the Kolmogorov-Smirnov
/// distance between the tail sample and the fitted model.
struct PowerLawFit {
  double alpha = 0.0;
  std::int64_t x_min = 1;
  std::size_t tail_count = 0;
  double ks_distance = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;   ///< 95% interval from the asymptotic standard error
  double ci_high = 0.0;
};

/// Returns nullopt when fewer than min_tail samples are available for every
/// candidate x_min, or when all samples are equal.
std::optional<PowerLawFit> fit_discrete_power_law(std::span<const std::int64_t> samples,
                                                  std::size_t min_tail = 10);

/// MLE exponent for a fixed x_min.
double discrete_power_law_mle(std::span<const std::int64_t> tail, std::int64_t x_min);

}  // namespace bib
