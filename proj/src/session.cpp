#include "overload/session.hpp"

#include <algorithm>
#include <utility>

#include "overload/error.hpp"

namespace overload {

Session::Session(SessionConfig cfg, bool keep_log)
    : cfg_(std::move(cfg)),
      keep_log_(keep_log),
      rng_(cfg_.rng_seed),
      condition_(cfg_.strategy),
      models_(cfg_.initial_models),
      threshold_(adapt::initial_state(cfg_, cfg_.strategy)) {
  validate(cfg_);
}

void Session::start_block(int block, Condition condition, model::ModelPair models) {
  if (open_) throw Error(Errc::TrialAlreadyOpen, "cannot start a block inside a trial");
  block_ = block;
  condition_ = condition;
  models_ = std::move(models);
  threshold_ = adapt::initial_state(cfg_, condition.value_or(cfg_.strategy));
}

features::PointerParams Session::pointer_params() const {
  return {cfg_.flip_threshold_px, cfg_.hover_threshold_ms, cfg_.hover_tolerance_px};
}

TrialHandle Session::begin_trial(TrialSpec spec, TimeMs t_start_ms) {
  if (open_) {
    throw Error(Errc::TrialAlreadyOpen,
                "trial " + std::to_string(open_->spec.global_index) + " is still open");
  }
  if (spec.difficulty != 0 && spec.difficulty != 1) {
    throw Error(Errc::InvalidArgument, "difficulty must be 0 or 1");
  }
  if (spec.n_options != kOptionsPerQuestion || spec.correct_option < 0 ||
      spec.correct_option >= spec.n_options) {
    throw Error(Errc::InvalidArgument, "trial needs 5 options and a correct option in [0,5)");
  }
  spec.global_index = next_global_index_++;
  open_.emplace();
  open_->spec = spec;
  open_->t_start_ms = t_start_ms;
  open_->acc = features::TrialAccumulator(pointer_params());
  log(ingest::TrialStartEntry{ingest::kSchemaVersion, cfg_.session_id, t_start_ms, block_,
                              condition_, spec},
      true);
  return {spec.trial_index, spec.global_index, t_start_ms};
}

std::optional<TrialHandle> Session::open_trial() const {
  if (!open_) return std::nullopt;
  return TrialHandle{open_->spec.trial_index, open_->spec.global_index, open_->t_start_ms};
}

void Session::push_eda(SignalSample sample) {
  if (last_eda_t_ && sample.t_ms < *last_eda_t_) {
    ++counters_.eda_rejected;
    throw Error(Errc::NonMonotonicTimestamp, "eda sample at " + std::to_string(sample.t_ms) +
                                                 " ms precedes " + std::to_string(*last_eda_t_));
  }
  last_eda_t_ = sample.t_ms;
  ++counters_.eda_accepted;
  if (open_) {
    sample.trial_index = open_->spec.trial_index;
    sample.global_index = open_->spec.global_index;
    open_->acc.update_eda(sample);
    log(sample, true);
  } else {
    sample.trial_index = kNoTrial;
    sample.global_index = kNoTrial;
    ++counters_.eda_out_of_trial;
    log(sample, false);
  }
}

void Session::push_pointer(PointerEvent event) {
  if (last_pointer_t_ && event.t_ms < *last_pointer_t_) {
    ++counters_.pointer_rejected;
    throw Error(Errc::NonMonotonicTimestamp, "pointer event at " + std::to_string(event.t_ms) +
                                                 " ms precedes " +
                                                 std::to_string(*last_pointer_t_));
  }
  last_pointer_t_ = event.t_ms;
  if (!open_) {
    ++counters_.pointer_dropped;
    return;
  }
  ++counters_.pointer_accepted;
  event.trial_index = open_->spec.trial_index;
  event.global_index = open_->spec.global_index;
  open_->acc.update_pointer(event);
  log(event, true);
}

void Session::push(const ingest::IngestMessage& msg) {
  if (const auto* s = std::get_if<SignalSample>(&msg)) {
    push_eda(*s);
  } else {
    push_pointer(std::get<PointerEvent>(msg));
  }
}

TrialFeatures Session::snapshot(TimeMs now_ms) const {
  if (!open_) throw Error(Errc::NoOpenTrial, "snapshot needs an open trial");
  return open_->acc.snapshot(open_->spec.difficulty, now_ms);
}

Evaluation Session::evaluate(TimeMs now_ms) {
  if (!open_) throw Error(Errc::NoOpenTrial, "evaluate needs an open trial");
  Evaluation ev;
  ev.t_ms = now_ms;
  ev.features = snapshot(now_ms);
  ev.y_eda = model::predict_eda(models_.eda, ev.features);
  ev.y_mouse = model::predict_mouse(models_.mouse, ev.features);
  ev.y_final = model::fuse(ev.y_eda, ev.y_mouse);
  ev.theta = threshold_.theta;
  ev.overload = condition_.has_value() && adapt::should_trigger(ev.y_final, ev.theta);
  if (ev.overload && !open_->triggered) {
    open_->triggered = true;
    open_->t_trigger_ms = now_ms;
    ev.first_trigger = true;
  }
  return ev;
}

TrialRecord Session::end_trial(const TrialOutcome& outcome) {
  if (!open_) throw Error(Errc::NoOpenTrial, "end_trial without an open trial");
  if (outcome.help_accepted && !outcome.help_offered) {
    throw Error(Errc::InvalidArgument, "help_accepted requires help_offered");
  }
  if (outcome.duration_ms < 0) throw Error(Errc::InvalidArgument, "negative trial duration");

  const TimeMs t_end = open_->t_start_ms + outcome.duration_ms;
  TrialRecord rec;
  rec.session_id = cfg_.session_id;
  rec.block = block_;
  rec.condition = condition_;
  rec.spec = open_->spec;
  rec.features = open_->acc.snapshot(open_->spec.difficulty, t_end);
  rec.y_eda = model::predict_eda(models_.eda, rec.features);
  rec.y_mouse = model::predict_mouse(models_.mouse, rec.features);
  rec.y_final = model::fuse(rec.y_eda, rec.y_mouse);
  rec.triggered = open_->triggered;
  rec.t_trigger_ms = open_->t_trigger_ms;
  rec.theta_before = threshold_.theta;
  if (condition_) {
    threshold_ = adapt::apply_update(std::move(threshold_), adapt::rule_outcome(outcome), rng_,
                                     rec.spec.global_index);
  }
  rec.theta_after = threshold_.theta;
  rec.low_eda_coverage = open_->acc.eda().count() == 0 ||
                         open_->acc.eda().coverage_ms() < kMinEdaCoverageMs;
  rec.outcome = outcome;

  log(ingest::TrialEndEntry{t_end, rec.spec.global_index, outcome}, true);
  if (keep_log_) {
    segments_.push_back({rec.spec.global_index, open_->t_start_ms, std::move(open_->lines)});
  }
  open_.reset();
  records_.push_back(rec);
  return rec;
}

void Session::log(const ingest::LogEntry& entry, bool in_trial) {
  if (!keep_log_) return;
  std::string line = ingest::encode(entry);
  if (in_trial && open_) open_->lines.push_back(line);
  session_lines_.push_back(std::move(line));
}

ingest::LogSnapshot Session::log_snapshot(std::size_t session_from,
                                          std::size_t segments_from) const {
  ingest::LogSnapshot snap;
  snap.session_id = cfg_.session_id;
  snap.session_offset = std::min(session_from, session_lines_.size());
  snap.session_lines.assign(session_lines_.begin() + static_cast<std::ptrdiff_t>(snap.session_offset),
                            session_lines_.end());
  snap.segment_offset = std::min(segments_from, segments_.size());
  snap.segments.assign(segments_.begin() + static_cast<std::ptrdiff_t>(snap.segment_offset),
                       segments_.end());
  return snap;
}

ingest::BackupReport flush_backup(const Session& session, ingest::BackupWriter& writer) {
  return writer.flush(session.log_snapshot(writer.session_lines_written(), writer.segments_written()));
}

}  // namespace overload
