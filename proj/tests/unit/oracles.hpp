#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance suite. Written directly from the definitions, without calling
// the library routine under test.

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "bibfractal/bayes.hpp"

namespace oracle {

inline std::vector<bib::Label> labels(char prefix, std::size_t n) {
  std::vector<bib::Label> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(std::string(1, prefix) + std::to_string(k + 1));
  return out;
}

/// Random probability vector; with zero_chance > 0 some entries are exactly 0
/// (at least one stays positive).
inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng, double zero_chance = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = u(rng) < zero_chance ? 0.0 : -std::log(1.0 - u(rng));
    total += x;
  }
  if (total == 0.0) {
    w[rng() % n] = 1.0;
    total = 1.0;
  }
  for (auto& x : w) x /= total;
  return w;
}

inline bib::Distribution random_distribution(std::size_t n, std::mt19937_64& rng, double zero_chance = 0.0) {
  return bib::Distribution::normalized(labels('h', n), random_simplex(n, rng, zero_chance));
}

inline bib::LikelihoodTable random_likelihood(std::size_t nh, std::size_t nd, std::mt19937_64& rng,
                                              double zero_chance = 0.0) {
  std::vector<std::vector<double>> rows;
  for (std::size_t h = 0; h < nh; ++h) {
    auto row = random_simplex(nd, rng, zero_chance);
    double total = 0.0;
    for (double v : row) total += v;
    for (auto& v : row) v /= total;
    rows.push_back(row);
  }
  return bib::LikelihoodTable(labels('h', nh), labels('d', nd), rows);
}

/// Full P(d, h) table, sliced at column d and renormalized. Empty when the
/// column has no mass.
inline std::vector<double> joint_slice_posterior(const std::vector<double>& prior,
                                                 const std::vector<std::vector<double>>& likelihood, std::size_t d) {
  const std::size_t nh = prior.size();
  const std::size_t nd = likelihood.front().size();
  std::vector<std::vector<double>> joint(nd, std::vector<double>(nh));
  for (std::size_t dd = 0; dd < nd; ++dd)
    for (std::size_t h = 0; h < nh; ++h) joint[dd][h] = likelihood[h][dd] * prior[h];
  double mass = 0.0;
  for (double v : joint[d]) mass += v;
  if (mass == 0.0) return {};
  std::vector<double> out(joint[d]);
  for (auto& v : out) v /= mass;
  return out;
}

/// F(q) = sum_h q(h) ln(q(h) / P(d, h)), skipping q(h) = 0 terms.
inline double free_energy(const std::vector<double>& q, const std::vector<double>& prior,
                          const std::vector<std::vector<double>>& likelihood, std::size_t d) {
  double f = 0.0;
  for (std::size_t h = 0; h < q.size(); ++h)
    if (q[h] > 0.0) f += q[h] * std::log(q[h] / (likelihood[h][d] * prior[h]));
  return f;
}

}  // namespace oracle
