#include "bibfractal/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bibfractal/error.hpp"

namespace bib {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::ShapeMismatch, "fit_line: x and y differ in length");
  require(x.size() >= 2, ErrorCode::InsufficientData, "fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  require(sxx > 0.0, ErrorCode::InvalidArgument, "fit_line: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

double mean(std::span<const double> values) {
  require(!values.empty(), ErrorCode::InsufficientData, "mean of empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  require(values.size() >= 2, ErrorCode::InsufficientData, "stddev needs two samples");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorCode::InsufficientData, "median of empty sample");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// Direct sum of the first N terms plus Euler-Maclaurin tail correction.
double hurwitz_zeta(double s, double q) {
  require(s > 1.0 && q > 0.0, ErrorCode::InvalidArgument, "hurwitz_zeta needs s > 1, q > 0");
  constexpr int kDirect = 12;
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(k + q, -s);
  const double a = kDirect + q;
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  // Bernoulli terms B_{2j}/(2j)! * s(s+1)...(s+2j-2) a^{-s-2j+1}
  static constexpr double kBernoulliOverFactorial[] = {
      1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0,
      -691.0 / 1307674368000.0};
  double rising = s;
  double power = std::pow(a, -s - 1.0);
  for (int j = 0; j < 6; ++j) {
    sum += kBernoulliOverFactorial[j] * rising * power;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    power /= a * a;
  }
  return sum;
}

namespace {

double power_law_log_likelihood(double alpha, std::size_t n, double sum_log, std::int64_t x_min) {
  return -static_cast<double>(n) * std::log(hurwitz_zeta(alpha, static_cast<double>(x_min))) -
         alpha * sum_log;
}

}  // namespace

double discrete_power_law_mle(std::span<const std::int64_t> tail, std::int64_t x_min) {
  require(!tail.empty(), ErrorCode::InsufficientData, "empty tail");
  require(x_min >= 1, ErrorCode::InvalidArgument, "x_min must be >= 1");
  double sum_log = 0.0;
  for (auto x : tail) sum_log += std::log(static_cast<double>(x));
  // Golden-section search; the log-likelihood is concave in alpha.
  double lo = 1.0001, hi = 8.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = power_law_log_likelihood(c, tail.size(), sum_log, x_min);
  double fd = power_law_log_likelihood(d, tail.size(), sum_log, x_min);
  while (hi - lo > 1e-7) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = power_law_log_likelihood(c, tail.size(), sum_log, x_min);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = power_law_log_likelihood(d, tail.size(), sum_log, x_min);
    }
  }
  return 0.5 * (lo + hi);
}

std::optional<PowerLawFit> fit_discrete_power_law(std::span<const std::int64_t> samples,
                                                  std::size_t min_tail) {
  std::vector<std::int64_t> sorted(samples.begin(), samples.end());
  sorted.erase(std::remove_if(sorted.begin(), sorted.end(), [](std::int64_t x) { return x < 1; }),
               sorted.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() < std::max<std::size_t>(min_tail, 2) || sorted.front() == sorted.back())
    return std::nullopt;

  std::vector<std::int64_t> candidates;
  std::unique_copy(sorted.begin(), sorted.end(), std::back_inserter(candidates));

  std::optional<PowerLawFit> best;
  for (auto x_min : candidates) {
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), x_min);
    const std::span<const std::int64_t> tail(&*first, static_cast<std::size_t>(sorted.end() - first));
    if (tail.size() < min_tail || tail.front() == tail.back()) break;
    const double alpha = discrete_power_law_mle(tail, x_min);
    const double z_min = hurwitz_zeta(alpha, static_cast<double>(x_min));
    // KS distance between empirical and model CDFs over the tail support.
    double ks = 0.0;
    const double n = static_cast<double>(tail.size());
    std::size_t pos = 0;
    while (pos < tail.size()) {
      const auto x = tail[pos];
      std::size_t next = pos;
      while (next < tail.size() && tail[next] == x) ++next;
      const double empirical = static_cast<double>(next) / n;
      const double model = 1.0 - hurwitz_zeta(alpha, static_cast<double>(x + 1)) / z_min;
      ks = std::max(ks, std::abs(empirical - model));
      pos = next;
    }
    if (!best || ks < best->ks_distance) {
      PowerLawFit fit;
      fit.alpha = alpha;
      fit.x_min = x_min;
      fit.tail_count = tail.size();
      fit.ks_distance = ks;
      fit.std_error = (alpha - 1.0) / std::sqrt(n);
      fit.ci_low = alpha - 1.96 * fit.std_error;
      fit.ci_high = alpha + 1.96 * fit.std_error;
      best = fit;
    }
  }
  return best;
}

}  // namespace bib
