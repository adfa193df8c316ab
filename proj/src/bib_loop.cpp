#include "bibfractal/bib_loop.hpp"

#include <algorithm>
#include <cmath>

#include "bibfractal/error.hpp"
#include "bibfractal/parallel.hpp"

namespace bib {

std::string_view to_string(Event e) {
  switch (e) {
    case Event::B: return "B";
    case Event::IB: return "IB";
    case Event::EXPLORE: return "EXPLORE";
    case Event::SWITCH: return "SWITCH";
  }
  return "B";
}

Event parse_event(std::string_view text) {
  if (text == "B") return Event::B;
  if (text == "IB") return Event::IB;
  if (text == "EXPLORE") return Event::EXPLORE;
  if (text == "SWITCH") return Event::SWITCH;
  fail(ErrorCode::ParseError, "unknown event tag " + std::string(text));
}

Event primary_event(std::uint8_t flags) {
  if (has(flags, Event::EXPLORE)) return Event::EXPLORE;
  if (has(flags, Event::SWITCH)) return Event::SWITCH;
  if (has(flags, Event::IB)) return Event::IB;
  return Event::B;
}

void TrajectoryLog::append(const TrajectoryRecord& record) {
  require(records_.empty() || record.t > records_.back().t, ErrorCode::InvalidArgument,
          "trajectory timestamps must be strictly increasing");
  records_.push_back(record);
}

std::size_t TrajectoryLog::count(Event e) const {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [e](const auto& r) { return has(r.flags, e); }));
}

BIBState::BIBState(HypothesisSpace model, BIBConfig config)
    : space_(std::move(model)), posterior_(space_.prior), config_(config), rng_(config.seed) {
  config_.ib.validate();
  require(space_.prior.labels() == space_.likelihood.h_labels(), ErrorCode::ShapeMismatch,
          "prior and likelihood must share hypothesis labels");
  rebuild_relation();
}

Distribution BIBState::recent_data() const {
  const std::vector<std::size_t> data(window_.begin(), window_.end());
  return empirical_distribution(space_.likelihood.d_labels(), data);
}

void BIBState::rebuild_relation() {
  relation_ = build_relation(joint_from(space_.prior, space_.likelihood), config_.ib.theta.value);
}

void BIBState::explore_now(ExploreTrigger trigger) {
  auto out = explore(space_, relation_, recent_data(), trigger, config_.ib, rng_);
  space_ = std::move(out.space);
}

std::uint8_t BIBState::step(std::size_t datum) {
  require(datum < space_.likelihood.d_size(), ErrorCode::UnknownDatum, "datum index out of range");
  std::uint8_t flags = static_cast<std::uint8_t>(Event::B);
  const std::size_t map_before = map_hypothesis();

  window_.push_back(datum);
  while (window_.size() > config_.ib.window) window_.pop_front();

  // B
  try {
    posterior_ = bayes_update(space_.prior, space_.likelihood, datum);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroEvidence) throw;
    explore_now(ExploreTrigger::ZeroEvidence);
    flags |= static_cast<std::uint8_t>(Event::EXPLORE);
    posterior_ = bayes_update(space_.prior, space_.likelihood, datum);
  }
  space_.prior = posterior_;
  rebuild_relation();

  // IB on the MAP row
  if (config_.ib.gamma > 0.0) {
    const std::size_t focus = map_hypothesis();
    auto updated = apply_IB(space_.likelihood, recent_data(), space_.likelihood.h_labels()[focus], config_.ib);
    double change = 0.0;
    const auto& before = space_.likelihood.row(focus);
    const auto& after = updated.row(focus);
    for (std::size_t d = 0; d < before.size(); ++d) change = std::max(change, std::abs(after[d] - before[d]));
    if (change > config_.ib_event_tolerance) flags |= static_cast<std::uint8_t>(Event::IB);
    space_.likelihood = std::move(updated);
    rebuild_relation();
  }

  if (relation_.empty()) {
    explore_now(ExploreTrigger::EmptyRelation);
    flags |= static_cast<std::uint8_t>(Event::EXPLORE);
    rebuild_relation();
  }

  if (map_hypothesis() != map_before) flags |= static_cast<std::uint8_t>(Event::SWITCH);
  ++t_;
  return flags;
}

std::uint8_t BIBState::step(const Label& datum) {
  const auto d = space_.likelihood.d_index(datum);
  require(d.has_value(), ErrorCode::UnknownDatum, "unknown datum " + datum);
  return step(*d);
}

BIBState step(BIBState state, std::size_t datum) {
  state.step(datum);
  return state;
}

DataStream::DataStream(StreamKind kind, const LikelihoodTable& likelihood, std::size_t true_hypothesis,
                       std::uint64_t seed)
    : kind_(kind), rng_(stream_seed(seed, 0x5157)) {
  require(true_hypothesis < likelihood.h_size(), ErrorCode::UnknownHypothesis,
          "true hypothesis index out of range");
  row_ = likelihood.row(true_hypothesis);
  constant_ = static_cast<std::size_t>(std::max_element(row_.begin(), row_.end()) - row_.begin());
  if (kind_ == StreamKind::Ambiguous) row_.assign(row_.size(), 1.0 / static_cast<double>(row_.size()));
}

std::size_t DataStream::next() {
  if (kind_ == StreamKind::Constant) return constant_;
  if (kind_ == StreamKind::Ambiguous) return std::uniform_int_distribution<std::size_t>(0, row_.size() - 1)(rng_);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  double acc = 0.0;
  for (std::size_t d = 0; d < row_.size(); ++d) {
    acc += row_[d];
    if (u < acc) return d;
  }
  return row_.size() - 1;
}

StreamKind parse_stream_kind(std::string_view text) {
  if (text == "true" || text == "true_hypothesis") return StreamKind::TrueHypothesis;
  if (text == "constant" || text == "unambiguous") return StreamKind::Constant;
  if (text == "ambiguous") return StreamKind::Ambiguous;
  fail(ErrorCode::ParseError, "unknown stream kind " + std::string(text));
}

HypothesisSpace cyclic_model(std::size_t k, double peak) {
  require(k >= 2, ErrorCode::InvalidArgument, "cyclic model needs at least two hypotheses");
  require(peak > 0.0 && peak < 1.0, ErrorCode::InvalidArgument, "peak must lie in (0, 1)");
  std::vector<Label> hs, ds;
  for (std::size_t i = 0; i < k; ++i) {
    hs.push_back("h" + std::to_string(i + 1));
    ds.push_back("d" + std::to_string(i + 1));
  }
  const double off = (1.0 - peak) / static_cast<double>(k - 1);
  std::vector<std::vector<double>> rows(k, std::vector<double>(k, off));
  for (std::size_t i = 0; i < k; ++i) rows[i][i] = peak;
  return {Distribution::uniform(hs), LikelihoodTable(hs, ds, std::move(rows))};
}

RunResult run_bayes(HypothesisSpace model, DataStream& stream, std::int64_t steps, bool keep_posteriors) {
  require(steps >= 1, ErrorCode::InvalidArgument, "steps must be >= 1");
  RunResult result;
  result.log.reserve(static_cast<std::size_t>(steps));
  Distribution prior = model.prior;
  std::size_t map = prior.argmax();
  for (std::int64_t t = 1; t <= steps; ++t) {
    const auto d = stream.next();
    try {
      prior = apply_B(prior, model.likelihood, d);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ZeroEvidence) break;
      throw;
    }
    std::uint8_t flags = static_cast<std::uint8_t>(Event::B);
    const auto now = prior.argmax();
    if (now != map) flags |= static_cast<std::uint8_t>(Event::SWITCH);
    map = now;
    result.log.append({t, static_cast<int>(now), 0.0, 0.0, primary_event(flags), flags});
    if (keep_posteriors) result.posteriors.push_back(prior.probs());
  }
  return result;
}

RunResult run_bib(BIBState& state, DataStream& stream, std::int64_t steps, bool keep_posteriors) {
  require(steps >= 1, ErrorCode::InvalidArgument, "steps must be >= 1");
  RunResult result;
  result.log.reserve(static_cast<std::size_t>(steps));
  for (std::int64_t k = 0; k < steps; ++k) {
    const auto flags = state.step(stream.next());
    result.log.append({state.t(), static_cast<int>(state.map_hypothesis()), 0.0, 0.0, primary_event(flags), flags});
    if (keep_posteriors) result.posteriors.push_back(state.posterior().probs());
  }
  return result;
}

}  // namespace bib
