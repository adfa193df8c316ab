#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "bibfractal/bayes.hpp"

namespace bib {

struct Partition;

/// R subset of H x D with (h, d) in R iff P(d, h) > theta (strict).
struct BinaryRelation {
  std::vector<Label> h_labels;
  std::vector<Label> d_labels;
  double theta = 0.0;
  std::vector<std::uint8_t> related;  ///< |H| x |D|, row-major by hypothesis

  bool contains(std::size_t h, std::size_t d) const { return related[h * d_labels.size() + d] != 0; }
  bool empty() const;
  std::size_t size() const;
  /// R(h) as data indices.
  std::vector<std::size_t> data_of(std::size_t h) const;
  /// R^-1(d) as hypothesis indices.
  std::vector<std::size_t> hypotheses_of(std::size_t d) const;
  std::vector<std::pair<Label, Label>> pairs() const;

  bool operator==(const BinaryRelation&) const = default;
};

/// Throws InvalidArgument unless theta is in [0, 1).
BinaryRelation build_relation(const JointTable& joint, double theta);

/// Rough-set approximations induced by a relation.
///
/// With R(h) = {d : (h,d) in R} and R^-1(d) = {h : (h,d) in R}, let
/// C(d) = {d' : R^-1(d') contains R^-1(d)} be the data that every witness of
/// d also supports. Then
///   lower(d) = {h : R(h) nonempty and R(h) subset of C(d)}
///   upper(h) = R(h)
/// The pair satisfies upper(lower(d)) subset of C(d), and lower is antitone:
/// R^-1(d1) subset of R^-1(d2) implies lower(d2) subset of lower(d1).
struct RoughApproximation {
  std::map<Label, std::set<Label>> lower;  ///< data label -> hypotheses
  std::map<Label, std::set<Label>> upper;  ///< hypothesis label -> data

  bool operator==(const RoughApproximation&) const = default;
};

RoughApproximation rough_approximation(const BinaryRelation& relation);

enum class ExplorationPolicy { ReplaceWeakest, AddHypothesis };

/// Where the relation threshold comes from.
struct ThetaSource {
  enum class Kind { FromPartition, Fixed };
  Kind kind = Kind::Fixed;
  double value = 0.0;

  static ThetaSource fixed(double theta);
  static ThetaSource from_partition(const Partition& partition);
};

struct IBConfig {
  double gamma = 0.2;  ///< likelihood learning rate, in [0, 1]
  ExplorationPolicy policy = ExplorationPolicy::ReplaceWeakest;
  ThetaSource theta = ThetaSource::fixed(0.2);
  std::size_t window = 16;          ///< recent-data window length
  double smoothing_floor = 1e-6;    ///< uniform floor on re-seeded rows
  std::size_t max_hypotheses = 32;  ///< AddHypothesis falls back to ReplaceWeakest beyond this

  void validate() const;
};

/// Empirical distribution of the data indices in `window`.
Distribution empirical_distribution(const std::vector<Label>& d_labels, std::span<const std::size_t> window);

/// Replaces the focus row by (1 - gamma) row + gamma recent; other rows are
/// untouched. gamma = 0 returns the table unchanged bit for bit.
/// Throws UnknownHypothesis.
LikelihoodTable apply_IB(const LikelihoodTable& likelihood, const Distribution& recent,
                         const Label& focus_h, const IBConfig& config);

struct HypothesisSpace {
  Distribution prior;
  LikelihoodTable likelihood;
};

enum class ExploreTrigger { EmptyRelation, ZeroEvidence };

struct ExploreOutcome {
  HypothesisSpace space;
  std::size_t reseeded = 0;  ///< index of the re-seeded or added hypothesis
  bool added = false;
};

/// Expands the hypothesis space. The re-seeded row is
/// (recent + eps) / (1 + eps |D|); the re-seeded hypothesis gets prior mass
/// 1/|H| before renormalization. ReplaceWeakest targets the minimum-prior
/// hypothesis (ties broken uniformly with rng); AddHypothesis appends one.
/// With trigger EmptyRelation, throws PreconditionViolated if the relation
/// is nonempty.
ExploreOutcome explore(const HypothesisSpace& space, const BinaryRelation& relation,
                       const Distribution& recent, ExploreTrigger trigger, const IBConfig& config,
                       std::mt19937_64& rng);

}  // namespace bib
