#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "bibfractal/bayes.hpp"
#include "bibfractal/error.hpp"
#include "oracles.hpp"

using namespace bib;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::InvalidArgument;
}

LikelihoodTable table2(std::vector<std::vector<double>> rows) {
  return LikelihoodTable({"h1", "h2"}, {"d1", "d2"}, std::move(rows));
}

}  // namespace

TEST_SUITE("bayes") {

TEST_CASE("distribution validation") {
  CHECK_NOTHROW(Distribution({"a", "b"}, {0.25, 0.75}));
  CHECK(code_of([] { Distribution({"a", "b"}, {0.5, 0.6}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Distribution({"a", "b"}, {-0.5, 1.5}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Distribution({"a", "a"}, {0.5, 0.5}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Distribution({"a"}, {0.5, 0.5}); }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([] { Distribution::normalized({"a", "b"}, {0.0, 0.0}); }) == ErrorCode::InvalidArgument);
  const auto d = Distribution::normalized({"a", "b", "c"}, {1.0, 3.0, 3.0});
  CHECK(d.argmax() == 1);
  CHECK(d.argmin() == 0);
  CHECK(d.prob("c") == doctest::Approx(3.0 / 7.0));
  CHECK_FALSE(d.index_of("z").has_value());
}

TEST_CASE("likelihood validation") {
  CHECK(code_of([] { table2({{0.5, 0.5}, {0.5, 0.6}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { table2({{0.5, 0.5}}); }) == ErrorCode::ShapeMismatch);
  const auto t = table2({{0.8, 0.2}, {0.2, 0.8}});
  CHECK(t.with_row(0, {0.1, 0.9}).at(0, 1) == 0.9);
  CHECK(t.with_hypothesis("h3", {1.0, 0.0}).h_size() == 3);
  CHECK(code_of([&] { t.with_hypothesis("h1", {1.0, 0.0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("uniform prior makes the posterior the likelihood column") {
  const auto post = bayes_update(Distribution::uniform({"h1", "h2"}), table2({{0.8, 0.2}, {0.2, 0.8}}), "d1");
  CHECK(post[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(post[1] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("degenerate prior is absorbing") {
  const Distribution prior({"h1", "h2"}, {1.0, 0.0});
  const auto post = bayes_update(prior, table2({{0.3, 0.7}, {0.9, 0.1}}), "d2");
  CHECK(post.probs() == std::vector<double>{1.0, 0.0});
}

TEST_CASE("random 4x4 tables match the joint-slice oracle") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const auto prior = oracle::random_distribution(4, rng, 0.2);
    const auto lik = oracle::random_likelihood(4, 4, rng, 0.2);
    for (std::size_t d = 0; d < 4; ++d) {
      const auto expected = oracle::joint_slice_posterior(prior.probs(), lik.rows(), d);
      if (expected.empty()) {
        CHECK(code_of([&] { bayes_update(prior, lik, d); }) == ErrorCode::ZeroEvidence);
        continue;
      }
      const auto post = bayes_update(prior, lik, d);
      for (std::size_t h = 0; h < 4; ++h) CHECK(std::abs(post[h] - expected[h]) < 1e-12);
    }
  }
}

TEST_CASE("bayes_update errors") {
  const auto lik = table2({{1.0, 0.0}, {1.0, 0.0}});
  const auto prior = Distribution::uniform({"h1", "h2"});
  CHECK(code_of([&] { bayes_update(prior, lik, "d2"); }) == ErrorCode::ZeroEvidence);
  CHECK(code_of([&] { bayes_update(prior, lik, "d9"); }) == ErrorCode::UnknownDatum);
  CHECK(code_of([&] { bayes_update(prior, lik, std::size_t{5}); }) == ErrorCode::UnknownDatum);
  CHECK(code_of([&] { bayes_update(Distribution::uniform({"h1", "h3"}), lik, "d1"); }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([&] { bayes_update(Distribution::uniform({"h1", "h2", "h3"}), lik, "d1"); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("repeated B concentrates on the true hypothesis") {
  std::mt19937_64 rng(7);
  const LikelihoodTable lik({"h1", "h2", "h3"}, {"d1", "d2", "d3"},
                            {{0.6, 0.2, 0.2}, {0.2, 0.6, 0.2}, {0.2, 0.2, 0.6}});
  auto prior = Distribution::uniform({"h1", "h2", "h3"});
  std::discrete_distribution<std::size_t> truth({0.2, 0.6, 0.2});
  int reached = -1;
  for (int t = 1; t <= 1000 && reached < 0; ++t) {
    prior = apply_B(prior, lik, truth(rng));
    if (prior[1] > 0.99) reached = t;
  }
  MESSAGE("posterior on h2 exceeded 0.99 after " << reached << " steps");
  CHECK(reached > 0);
}

TEST_CASE("apply_B is one bayes_update") {
  std::mt19937_64 rng(8);
  const auto prior = oracle::random_distribution(5, rng);
  const auto lik = oracle::random_likelihood(5, 3, rng);
  CHECK(apply_B(prior, lik, "d2") == bayes_update(prior, lik, "d2"));
  CHECK(apply_B(prior, lik, std::size_t{0}) == bayes_update(prior, lik, "d1"));
}

TEST_CASE("relabeling hypotheses permutes the posterior") {
  std::mt19937_64 rng(9);
  const auto prior = oracle::random_distribution(4, rng);
  const auto lik = oracle::random_likelihood(4, 3, rng);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  std::vector<Label> h;
  std::vector<double> p;
  std::vector<std::vector<double>> rows;
  for (auto k : perm) {
    h.push_back(prior.labels()[k]);
    p.push_back(prior[k]);
    rows.push_back(lik.row(k));
  }
  const auto a = bayes_update(prior, lik, "d3");
  const auto b = bayes_update(Distribution(h, p), LikelihoodTable(h, lik.d_labels(), rows), "d3");
  for (std::size_t k = 0; k < perm.size(); ++k) {
    CHECK(b.labels()[k] == a.labels()[perm[k]]);
    CHECK(b[k] == doctest::Approx(a[perm[k]]).epsilon(1e-15));
  }
}

TEST_CASE("free energy at the posterior is the surprise") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto prior = oracle::random_distribution(6, rng);
    const auto lik = oracle::random_likelihood(6, 4, rng);
    const auto post = bayes_update(prior, lik, "d2");
    const auto report = free_energy(post, lik, prior, "d2");
    CHECK(std::abs(report.free_energy + std::log(evidence(prior, lik, 1))) < 1e-12);
    CHECK(report.free_energy == doctest::Approx(report.energy - report.entropy));
  }
}

TEST_CASE("perturbing q away from the posterior raises free energy") {
  std::mt19937_64 rng(11);
  const auto prior = oracle::random_distribution(3, rng);
  const auto lik = oracle::random_likelihood(3, 3, rng);
  const auto post = bayes_update(prior, lik, "d1");
  const double at_post = free_energy(post, lik, prior, "d1").free_energy;
  for (double e1 : {-0.05, -0.01, -1e-3, 1e-3, 0.01, 0.05})
    for (double e2 : {-0.05, -1e-3, 0.0, 1e-3, 0.05}) {
      std::vector<double> q = post.probs();
      q[0] += e1;
      q[1] += e2;
      q[2] -= e1 + e2;
      if (*std::min_element(q.begin(), q.end()) <= 0.0) continue;
      const double f = free_energy(Distribution::normalized(post.labels(), q), lik, prior, "d1").free_energy;
      CHECK(f > at_post);
      CHECK(f == doctest::Approx(oracle::free_energy(q, prior.probs(), lik.rows(), 0)).epsilon(1e-12));
    }
}

TEST_CASE("symmetric two-hypothesis model") {
  const auto uniform = Distribution::uniform({"h1", "h2"});
  const GenerativeModel model{"eta0", uniform, table2({{0.5, 0.5}, {0.5, 0.5}})};
  CHECK(free_energy(uniform, model, "d1").free_energy == doctest::Approx(-std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("free energy support rules") {
  const auto lik = table2({{0.5, 0.5}, {1.0, 0.0}});
  const auto prior = Distribution::uniform({"h1", "h2"});
  // joint column d2 is (0.25, 0): q must vanish exactly on h2
  CHECK_NOTHROW(free_energy(Distribution({"h1", "h2"}, {1.0, 0.0}), lik, prior, "d2"));
  CHECK(code_of([&] { free_energy(prior, lik, prior, "d2"); }) == ErrorCode::SupportMismatch);
  CHECK(code_of([&] { free_energy(Distribution({"h1", "h2"}, {1.0, 0.0}), lik, prior, "d1"); }) ==
        ErrorCode::SupportMismatch);
}

TEST_CASE("joint tables") {
  const auto uniform = Distribution::uniform({"h1", "h2"});
  const auto j = joint_from(uniform, table2({{0.5, 0.5}, {0.5, 0.5}}));
  for (const auto& row : j.entries)
    for (double v : row) CHECK(v == 0.25);
  const auto k = joint_from(Distribution({"h1", "h2"}, {1.0, 0.0}), table2({{0.3, 0.7}, {0.6, 0.4}}));
  CHECK(k.entries[1] == std::vector<double>{0.0, 0.0});
  CHECK(code_of([&] { joint_from(Distribution::uniform({"x", "y"}), table2({{0.3, 0.7}, {0.6, 0.4}})); }) ==
        ErrorCode::ShapeMismatch);

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto prior = oracle::random_distribution(5, rng, 0.2);
    const auto lik = oracle::random_likelihood(5, 6, rng, 0.2);
    const auto marginal = joint_from(prior, lik).data_marginal();
    for (std::size_t d = 0; d < 6; ++d) {
      double direct = 0.0;
      for (std::size_t h = 0; h < 5; ++h) direct += lik.rows()[h][d] * prior.probs()[h];
      CHECK(std::abs(marginal[d] - direct) < 1e-12);
    }
  }
}

}  // TEST_SUITE
