#include "bibfractal/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "bibfractal/error.hpp"

namespace bib {
namespace {

void check_unique(const std::vector<Label>& labels, const char* what) {
  require(std::set<Label>(labels.begin(), labels.end()).size() == labels.size(),
          ErrorCode::InvalidArgument, std::string(what) + " labels must be unique");
}

void check_probability_vector(const std::vector<double>& probs, const char* what) {
  double sum = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0, ErrorCode::InvalidArgument,
            std::string(what) + ": probabilities must be finite and nonnegative");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= kNormTolerance, ErrorCode::InvalidArgument,
          std::string(what) + ": probabilities must sum to 1");
}

std::optional<std::size_t> find_label(const std::vector<Label>& labels, const Label& label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels.begin());
}

std::vector<double> divide_by_sum(std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (auto& w : weights) w /= total;
  return weights;
}

}  // namespace

Distribution::Distribution(std::vector<Label> labels, std::vector<double> probs)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
  require(!probs_.empty(), ErrorCode::InvalidArgument, "distribution must be nonempty");
  require(labels_.size() == probs_.size(), ErrorCode::ShapeMismatch, "labels and probs differ in length");
  check_unique(labels_, "distribution");
  check_probability_vector(probs_, "distribution");
}

Distribution Distribution::normalized(std::vector<Label> labels, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, ErrorCode::InvalidArgument, "weights must be nonnegative");
    total += w;
  }
  require(total > 0.0, ErrorCode::InvalidArgument, "weights sum to zero");
  return Distribution(std::move(labels), divide_by_sum(std::move(weights)));
}

Distribution Distribution::uniform(std::vector<Label> labels) {
  const auto n = labels.size();
  return normalized(std::move(labels), std::vector<double>(n, 1.0));
}

double Distribution::prob(const Label& label) const {
  const auto k = index_of(label);
  require(k.has_value(), ErrorCode::InvalidArgument, "unknown label " + label);
  return probs_[*k];
}

std::optional<std::size_t> Distribution::index_of(const Label& label) const {
  return find_label(labels_, label);
}

std::size_t Distribution::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

std::size_t Distribution::argmin() const {
  return static_cast<std::size_t>(std::min_element(probs_.begin(), probs_.end()) - probs_.begin());
}

LikelihoodTable::LikelihoodTable(std::vector<Label> h_labels, std::vector<Label> d_labels,
                                 std::vector<std::vector<double>> rows)
    : h_labels_(std::move(h_labels)), d_labels_(std::move(d_labels)), rows_(std::move(rows)) {
  require(!h_labels_.empty() && !d_labels_.empty(), ErrorCode::InvalidArgument,
          "likelihood table needs hypotheses and data");
  check_unique(h_labels_, "hypothesis");
  check_unique(d_labels_, "data");
  require(rows_.size() == h_labels_.size(), ErrorCode::ShapeMismatch, "one row per hypothesis required");
  for (const auto& row : rows_) {
    require(row.size() == d_labels_.size(), ErrorCode::ShapeMismatch, "row length must equal |D|");
    check_probability_vector(row, "likelihood row");
  }
}

std::optional<std::size_t> LikelihoodTable::h_index(const Label& label) const {
  return find_label(h_labels_, label);
}

std::optional<std::size_t> LikelihoodTable::d_index(const Label& label) const {
  return find_label(d_labels_, label);
}

LikelihoodTable LikelihoodTable::with_row(std::size_t h, std::vector<double> row) const {
  require(h < rows_.size(), ErrorCode::UnknownHypothesis, "hypothesis index out of range");
  auto rows = rows_;
  rows[h] = std::move(row);
  return LikelihoodTable(h_labels_, d_labels_, std::move(rows));
}

LikelihoodTable LikelihoodTable::with_hypothesis(Label h_label, std::vector<double> row) const {
  auto h_labels = h_labels_;
  auto rows = rows_;
  h_labels.push_back(std::move(h_label));
  rows.push_back(std::move(row));
  return LikelihoodTable(std::move(h_labels), d_labels_, std::move(rows));
}

std::vector<double> JointTable::data_marginal() const {
  std::vector<double> marginal(d_labels.size(), 0.0);
  for (const auto& row : entries)
    for (std::size_t d = 0; d < row.size(); ++d) marginal[d] += row[d];
  return marginal;
}

double evidence(const Distribution& prior, const LikelihoodTable& likelihood, std::size_t observed) {
  require(prior.labels() == likelihood.h_labels(), ErrorCode::ShapeMismatch,
          "prior and likelihood disagree on the hypotheses");
  require(observed < likelihood.d_size(), ErrorCode::UnknownDatum, "datum index out of range");
  double total = 0.0;
  for (std::size_t h = 0; h < prior.size(); ++h) total += likelihood.at(h, observed) * prior[h];
  return total;
}

Distribution bayes_update(const Distribution& prior, const LikelihoodTable& likelihood,
                          std::size_t observed) {
  const double z = evidence(prior, likelihood, observed);
  require(z > 0.0, ErrorCode::ZeroEvidence, "observed datum has zero probability under the prior");
  std::vector<double> weights(prior.size());
  for (std::size_t h = 0; h < prior.size(); ++h) weights[h] = likelihood.at(h, observed) * prior[h];
  // Dividing by the recomputed sum keeps the output normalized to round-off.
  return Distribution(prior.labels(), divide_by_sum(std::move(weights)));
}

Distribution bayes_update(const Distribution& prior, const LikelihoodTable& likelihood,
                          const Label& observed) {
  const auto d = likelihood.d_index(observed);
  require(d.has_value(), ErrorCode::UnknownDatum, "unknown datum " + observed);
  return bayes_update(prior, likelihood, *d);
}

Distribution apply_B(const Distribution& prior, const LikelihoodTable& likelihood, const Label& observed) {
  return bayes_update(prior, likelihood, observed);
}

Distribution apply_B(const Distribution& prior, const LikelihoodTable& likelihood, std::size_t observed) {
  return bayes_update(prior, likelihood, observed);
}

FreeEnergyReport free_energy(const Distribution& q, const LikelihoodTable& likelihood,
                             const Distribution& prior, const Label& observed) {
  require(q.labels() == prior.labels(), ErrorCode::ShapeMismatch, "q and prior must share labels");
  require(prior.labels() == likelihood.h_labels(), ErrorCode::ShapeMismatch,
          "prior and likelihood must share hypothesis labels");
  const auto d = likelihood.d_index(observed);
  require(d.has_value(), ErrorCode::UnknownDatum, "unknown datum " + observed);

  FreeEnergyReport report;
  for (std::size_t h = 0; h < q.size(); ++h) {
    const double joint = likelihood.at(h, *d) * prior[h];
    require((q[h] > 0.0) == (joint > 0.0), ErrorCode::SupportMismatch,
            "q must be positive exactly on the support of the joint");
    if (q[h] == 0.0) continue;
    report.energy -= q[h] * std::log(joint);
    report.entropy -= q[h] * std::log(q[h]);
  }
  report.free_energy = report.energy - report.entropy;
  return report;
}

FreeEnergyReport free_energy(const Distribution& q, const GenerativeModel& model, const Label& observed) {
  return free_energy(q, model.likelihood, model.prior, observed);
}

JointTable joint_from(const Distribution& prior, const LikelihoodTable& likelihood) {
  require(prior.labels() == likelihood.h_labels(), ErrorCode::ShapeMismatch,
          "prior and likelihood must share hypothesis labels");
  JointTable joint{likelihood.h_labels(), likelihood.d_labels(), {}};
  joint.entries.resize(prior.size());
  for (std::size_t h = 0; h < prior.size(); ++h) {
    joint.entries[h].resize(likelihood.d_size());
    for (std::size_t d = 0; d < likelihood.d_size(); ++d)
      joint.entries[h][d] = likelihood.at(h, d) * prior[h];
  }
  return joint;
}

}  // namespace bib
