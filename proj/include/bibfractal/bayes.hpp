#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace bib {

using Label = std::string;

/// Tolerance on sum-to-one for every distribution the library accepts or
/// returns.
inline constexpr double kNormTolerance = 1e-12;

/// Finite probability vector over unique labels.
class Distribution {
 public:
  Distribution() = default;
  /// Validates nonnegativity, label uniqueness and sum = 1 within kNormTolerance.
  Distribution(std::vector<Label> labels, std::vector<double> probs);

  /// Divides nonnegative weights by their sum. Throws InvalidArgument on a
  /// zero total.
  static Distribution normalized(std::vector<Label> labels, std::vector<double> weights);
  static Distribution uniform(std::vector<Label> labels);

  std::size_t size() const { return probs_.size(); }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t k) const { return probs_[k]; }
  double prob(const Label& label) const;
  std::optional<std::size_t> index_of(const Label& label) const;
  /// Lowest index among the maxima.
  std::size_t argmax() const;
  /// Lowest index among the minima.
  std::size_t argmin() const;

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<Label> labels_;
  std::vector<double> probs_;
};

/// P(d|h): one row per hypothesis, each a distribution over the data labels.
class LikelihoodTable {
 public:
  LikelihoodTable() = default;
  LikelihoodTable(std::vector<Label> h_labels, std::vector<Label> d_labels,
                  std::vector<std::vector<double>> rows);

  const std::vector<Label>& h_labels() const { return h_labels_; }
  const std::vector<Label>& d_labels() const { return d_labels_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& row(std::size_t h) const { return rows_[h]; }
  double at(std::size_t h, std::size_t d) const { return rows_[h][d]; }
  std::size_t h_size() const { return h_labels_.size(); }
  std::size_t d_size() const { return d_labels_.size(); }
  std::optional<std::size_t> h_index(const Label& label) const;
  std::optional<std::size_t> d_index(const Label& label) const;

  /// Copy with one row replaced; the row is validated.
  LikelihoodTable with_row(std::size_t h, std::vector<double> row) const;
  /// Copy with a hypothesis appended.
  LikelihoodTable with_hypothesis(Label h_label, std::vector<double> row) const;

  bool operator==(const LikelihoodTable&) const = default;

 private:
  std::vector<Label> h_labels_;
  std::vector<Label> d_labels_;
  std::vector<std::vector<double>> rows_;
};

/// P(d, h) with entries[h][d]; total mass 1.
struct JointTable {
  std::vector<Label> h_labels;
  std::vector<Label> d_labels;
  std::vector<std::vector<double>> entries;

  double at(std::size_t h, std::size_t d) const { return entries[h][d]; }
  /// P(d) = sum_h P(d, h).
  std::vector<double> data_marginal() const;
};

struct FreeEnergyReport {
  double energy = 0.0;       ///< -<ln P(d, h)>_q, nats
  double entropy = 0.0;      ///< -<ln q>_q, nats
  double free_energy = 0.0;  ///< energy - entropy
};

/// A generative model variant selected by the external-state tag eta.
struct GenerativeModel {
  std::string eta;
  Distribution prior;
  LikelihoodTable likelihood;
};

/// P(h|d) = P(d|h) P(h) / sum_k P(d|h_k) P(h_k), renormalized on output.
/// Throws UnknownDatum, ShapeMismatch, or ZeroEvidence.
Distribution bayes_update(const Distribution& prior, const LikelihoodTable& likelihood,
                          const Label& observed);
Distribution bayes_update(const Distribution& prior, const LikelihoodTable& likelihood,
                          std::size_t observed);

/// The B operator: the next prior is the current posterior.
Distribution apply_B(const Distribution& prior, const LikelihoodTable& likelihood, const Label& observed);
Distribution apply_B(const Distribution& prior, const LikelihoodTable& likelihood, std::size_t observed);

/// Evidence sum_k P(d|h_k) P(h_k) for one datum.
double evidence(const Distribution& prior, const LikelihoodTable& likelihood, std::size_t observed);

/// Variational free energy of q against the joint P(observed, h). Equals
/// -ln(evidence) exactly when q is the posterior and exceeds it otherwise.
/// Throws SupportMismatch unless q > 0 exactly where the joint is > 0.
FreeEnergyReport free_energy(const Distribution& q, const LikelihoodTable& likelihood,
                             const Distribution& prior, const Label& observed);
FreeEnergyReport free_energy(const Distribution& q, const GenerativeModel& model, const Label& observed);

/// P(d, h) = P(d|h) P(h). Throws ShapeMismatch when the hypothesis labels differ.
JointTable joint_from(const Distribution& prior, const LikelihoodTable& likelihood);

}  // namespace bib
