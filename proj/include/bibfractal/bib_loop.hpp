#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <string_view>
#include <vector>

#include "bibfractal/bayes.hpp"
#include "bibfractal/inverse_bayes.hpp"

namespace bib {

/// Event flags; one step may raise several.
enum class Event : std::uint8_t { B = 1, IB = 2, EXPLORE = 4, SWITCH = 8 };

std::string_view to_string(Event e);
Event parse_event(std::string_view text);

/// Most significant flag of a step: EXPLORE > SWITCH > IB > B.
Event primary_event(std::uint8_t flags);

inline bool has(std::uint8_t flags, Event e) { return (flags & static_cast<std::uint8_t>(e)) != 0; }

struct TrajectoryRecord {
  std::int64_t t = 0;
  int percept = -1;     ///< percept or MAP hypothesis index
  double x = 0.0;       ///< walker position, position logs only
  double y = 0.0;
  Event tag = Event::B;
  std::uint8_t flags = 0;

  bool operator==(const TrajectoryRecord&) const = default;
};

/// Time-stamped per-step record. Timestamps are strictly increasing.
class TrajectoryLog {
 public:
  enum class Kind { Percept, Position };

  explicit TrajectoryLog(Kind kind = Kind::Percept) : kind_(kind) {}

  Kind kind() const { return kind_; }
  /// Throws InvalidArgument if t does not exceed the previous timestamp.
  void append(const TrajectoryRecord& record);
  const std::vector<TrajectoryRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  void reserve(std::size_t n) { records_.reserve(n); }

  /// Number of records whose flags include e.
  std::size_t count(Event e) const;

  bool operator==(const TrajectoryLog&) const = default;

 private:
  Kind kind_;
  std::vector<TrajectoryRecord> records_;
};

struct BIBConfig {
  IBConfig ib{};
  /// IB is flagged as an event only when it moves the likelihood by more
  /// than this in max norm.
  double ib_event_tolerance = 1e-6;
  std::uint64_t seed = 1;
};

/// Full state of the B-diamond-IB loop.
class BIBState {
 public:
  BIBState(HypothesisSpace model, BIBConfig config);

  /// One composed step on datum index d:
  ///   B (bayes_update; ZeroEvidence becomes EXPLORE then B again),
  ///   joint + relation at the configured theta,
  ///   IB on the MAP hypothesis at rate gamma,
  ///   EXPLORE iff the relation is empty.
  /// Returns the event flags. t increments by exactly one.
  std::uint8_t step(std::size_t datum);
  std::uint8_t step(const Label& datum);

  const Distribution& prior() const { return space_.prior; }
  const Distribution& posterior() const { return posterior_; }
  const LikelihoodTable& likelihood() const { return space_.likelihood; }
  const BinaryRelation& relation() const { return relation_; }
  RoughApproximation rough() const { return rough_approximation(relation_); }
  const std::deque<std::size_t>& window() const { return window_; }
  const BIBConfig& config() const { return config_; }
  std::int64_t t() const { return t_; }
  std::size_t map_hypothesis() const { return space_.prior.argmax(); }
  Distribution recent_data() const;

 private:
  void explore_now(ExploreTrigger trigger);
  void rebuild_relation();

  HypothesisSpace space_;
  Distribution posterior_;
  BinaryRelation relation_;
  std::deque<std::size_t> window_;
  BIBConfig config_;
  std::mt19937_64 rng_;
  std::int64_t t_ = 0;
};

/// Functional form of BIBState::step.
BIBState step(BIBState state, std::size_t datum);

enum class StreamKind {
  TrueHypothesis,  ///< i.i.d. draws from the true hypothesis's likelihood row
  Constant,        ///< the true hypothesis's most likely datum, every step
  Ambiguous,       ///< uniform over all data labels
};

/// Deterministic data source for simulations.
class DataStream {
 public:
  DataStream(StreamKind kind, const LikelihoodTable& likelihood, std::size_t true_hypothesis,
             std::uint64_t seed);
  std::size_t next();

 private:
  StreamKind kind_;
  std::vector<double> row_;
  std::size_t constant_ = 0;
  std::mt19937_64 rng_;
};

StreamKind parse_stream_kind(std::string_view text);

/// |K| hypotheses and data whose likelihood columns are cyclic shifts:
/// P(d_j | h_i) = peak if i == j, (1 - peak)/(K - 1) otherwise.
HypothesisSpace cyclic_model(std::size_t k, double peak);

struct RunResult {
  TrajectoryLog log;
  std::vector<std::vector<double>> posteriors;  ///< filled when requested
};

/// B-only loop: prior <- bayes_update(prior, likelihood, datum). Stops early on
/// ZeroEvidence.
RunResult run_bayes(HypothesisSpace model, DataStream& stream, std::int64_t steps,
                    bool keep_posteriors = false);

/// B-diamond-IB loop. Record value is the MAP hypothesis after each step.
RunResult run_bib(BIBState& state, DataStream& stream, std::int64_t steps, bool keep_posteriors = false);

}  // namespace bib
