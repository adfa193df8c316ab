#include "bibfractal/inverse_bayes.hpp"

#include <algorithm>
#include <cmath>

#include "bibfractal/error.hpp"
#include "bibfractal/rough_partition.hpp"

namespace bib {

bool BinaryRelation::empty() const { return size() == 0; }

std::size_t BinaryRelation::size() const {
  return static_cast<std::size_t>(std::count(related.begin(), related.end(), std::uint8_t{1}));
}

std::vector<std::size_t> BinaryRelation::data_of(std::size_t h) const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < d_labels.size(); ++d)
    if (contains(h, d)) out.push_back(d);
  return out;
}

std::vector<std::size_t> BinaryRelation::hypotheses_of(std::size_t d) const {
  std::vector<std::size_t> out;
  for (std::size_t h = 0; h < h_labels.size(); ++h)
    if (contains(h, d)) out.push_back(h);
  return out;
}

std::vector<std::pair<Label, Label>> BinaryRelation::pairs() const {
  std::vector<std::pair<Label, Label>> out;
  for (std::size_t h = 0; h < h_labels.size(); ++h)
    for (std::size_t d = 0; d < d_labels.size(); ++d)
      if (contains(h, d)) out.emplace_back(h_labels[h], d_labels[d]);
  return out;
}

BinaryRelation build_relation(const JointTable& joint, double theta) {
  require(theta >= 0.0 && theta < 1.0, ErrorCode::InvalidArgument, "theta must lie in [0, 1)");
  BinaryRelation rel{joint.h_labels, joint.d_labels, theta, {}};
  rel.related.assign(joint.h_labels.size() * joint.d_labels.size(), 0);
  for (std::size_t h = 0; h < joint.h_labels.size(); ++h)
    for (std::size_t d = 0; d < joint.d_labels.size(); ++d)
      rel.related[h * joint.d_labels.size() + d] = joint.at(h, d) > theta ? 1 : 0;
  return rel;
}

RoughApproximation rough_approximation(const BinaryRelation& relation) {
  const std::size_t nh = relation.h_labels.size(), nd = relation.d_labels.size();
  // witness[d][h] = (h, d) in R
  std::vector<std::vector<bool>> witness(nd, std::vector<bool>(nh));
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t h = 0; h < nh; ++h) witness[d][h] = relation.contains(h, d);

  auto superset = [&](std::size_t a, std::size_t b) {  // R^-1(a) contains R^-1(b)
    for (std::size_t h = 0; h < nh; ++h)
      if (witness[b][h] && !witness[a][h]) return false;
    return true;
  };

  RoughApproximation approx;
  for (std::size_t h = 0; h < nh; ++h) {
    auto& up = approx.upper[relation.h_labels[h]];
    for (std::size_t d : relation.data_of(h)) up.insert(relation.d_labels[d]);
  }
  for (std::size_t d = 0; d < nd; ++d) {
    std::vector<bool> closure(nd);
    for (std::size_t e = 0; e < nd; ++e) closure[e] = superset(e, d);
    auto& low = approx.lower[relation.d_labels[d]];
    for (std::size_t h = 0; h < nh; ++h) {
      const auto data = relation.data_of(h);
      if (data.empty()) continue;
      if (std::all_of(data.begin(), data.end(), [&](std::size_t e) { return closure[e]; }))
        low.insert(relation.h_labels[h]);
    }
  }
  return approx;
}

ThetaSource ThetaSource::fixed(double theta) {
  require(theta >= 0.0 && theta < 1.0, ErrorCode::InvalidArgument, "theta must lie in [0, 1)");
  return {Kind::Fixed, theta};
}

ThetaSource ThetaSource::from_partition(const Partition& partition) {
  require(partition.theta > 0.0 && partition.theta < 1.0, ErrorCode::InvalidArgument,
          "partition theta must lie in (0, 1)");
  return {Kind::FromPartition, partition.theta};
}

void IBConfig::validate() const {
  require(gamma >= 0.0 && gamma <= 1.0, ErrorCode::InvalidArgument, "gamma must lie in [0, 1]");
  require(window >= 1, ErrorCode::InvalidArgument, "window must be >= 1");
  require(smoothing_floor > 0.0, ErrorCode::InvalidArgument, "smoothing floor must be positive");
  require(theta.value >= 0.0 && theta.value < 1.0, ErrorCode::InvalidArgument, "theta must lie in [0, 1)");
  require(max_hypotheses >= 1, ErrorCode::InvalidArgument, "max_hypotheses must be >= 1");
}

Distribution empirical_distribution(const std::vector<Label>& d_labels, std::span<const std::size_t> window) {
  require(!window.empty(), ErrorCode::InsufficientData, "empty data window");
  std::vector<double> counts(d_labels.size(), 0.0);
  for (auto d : window) {
    require(d < d_labels.size(), ErrorCode::UnknownDatum, "datum index out of range");
    counts[d] += 1.0;
  }
  return Distribution::normalized(d_labels, std::move(counts));
}

LikelihoodTable apply_IB(const LikelihoodTable& likelihood, const Distribution& recent,
                         const Label& focus_h, const IBConfig& config) {
  config.validate();
  const auto h = likelihood.h_index(focus_h);
  require(h.has_value(), ErrorCode::UnknownHypothesis, "unknown hypothesis " + focus_h);
  require(recent.labels() == likelihood.d_labels(), ErrorCode::ShapeMismatch,
          "recent data must be a distribution over the table's data labels");
  if (config.gamma == 0.0) return likelihood;
  if (config.gamma == 1.0) return likelihood.with_row(*h, recent.probs());

  const auto& old_row = likelihood.row(*h);
  std::vector<double> row(old_row.size());
  double total = 0.0;
  for (std::size_t d = 0; d < row.size(); ++d) {
    row[d] = (1.0 - config.gamma) * old_row[d] + config.gamma * recent[d];
    total += row[d];
  }
  for (auto& v : row) v /= total;
  return likelihood.with_row(*h, std::move(row));
}

ExploreOutcome explore(const HypothesisSpace& space, const BinaryRelation& relation,
                       const Distribution& recent, ExploreTrigger trigger, const IBConfig& config,
                       std::mt19937_64& rng) {
  config.validate();
  if (trigger == ExploreTrigger::EmptyRelation)
    require(relation.empty(), ErrorCode::PreconditionViolated, "explore called with a nonempty relation");
  const auto& lik = space.likelihood;
  require(recent.labels() == lik.d_labels(), ErrorCode::ShapeMismatch,
          "recent data must be a distribution over the table's data labels");

  const double eps = config.smoothing_floor;
  const double dn = static_cast<double>(lik.d_size());
  std::vector<double> seeded(lik.d_size());
  for (std::size_t d = 0; d < seeded.size(); ++d) seeded[d] = (recent[d] + eps) / (1.0 + eps * dn);

  ExploreOutcome out{space, 0, false};
  std::vector<double> prior = space.prior.probs();
  std::vector<Label> labels = space.prior.labels();

  const bool add = config.policy == ExplorationPolicy::AddHypothesis && lik.h_size() < config.max_hypotheses;
  if (add) {
    Label name = "h" + std::to_string(lik.h_size() + 1);
    while (lik.h_index(name)) name += "'";
    out.space.likelihood = lik.with_hypothesis(name, seeded);
    labels.push_back(name);
    prior.push_back(1.0 / static_cast<double>(labels.size()));
    out.reseeded = labels.size() - 1;
    out.added = true;
  } else {
    const double lowest = *std::min_element(prior.begin(), prior.end());
    std::vector<std::size_t> ties;
    for (std::size_t h = 0; h < prior.size(); ++h)
      if (prior[h] == lowest) ties.push_back(h);
    std::size_t target = ties.front();
    if (ties.size() > 1) target = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
    out.space.likelihood = lik.with_row(target, seeded);
    prior[target] = 1.0 / static_cast<double>(prior.size());
    out.reseeded = target;
  }
  out.space.prior = Distribution::normalized(std::move(labels), std::move(prior));
  return out;
}

}  // namespace bib
