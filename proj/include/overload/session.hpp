#pragma once

// Session and trial state machine. A Session owns the configuration, the
// per-block threshold and model state, the open trial's feature
// accumulators, the closed-trial records and the raw stream log.
//
// All mutating calls on one Session must be serialized by the caller
// (see ingest::IngestQueue for multi-producer ingestion).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "overload/adapt.hpp"
#include "overload/config.hpp"
#include "overload/features.hpp"
#include "overload/ingest.hpp"
#include "overload/model.hpp"
#include "overload/types.hpp"

namespace overload {

struct TrialHandle {
  int trial_index = 0;
  int global_index = 0;
  TimeMs t_start_ms = 0;
};

struct Evaluation {
  TimeMs t_ms = 0;
  TrialFeatures features;
  double y_eda = 0.0;
  double y_mouse = 0.0;
  double y_final = 0.0;
  double theta = 0.0;
  bool overload = false;       // y_final > theta in a strategy block
  bool first_trigger = false;  // this evaluation latched the trial's trigger
};

struct IngestCounters {
  std::int64_t eda_accepted = 0;
  std::int64_t eda_rejected = 0;
  std::int64_t eda_out_of_trial = 0;
  std::int64_t pointer_accepted = 0;
  std::int64_t pointer_rejected = 0;
  std::int64_t pointer_dropped = 0;
};

// EDA spanning less than this is flagged on the trial record.
inline constexpr TimeMs kMinEdaCoverageMs = 1000;

class Session {
 public:
  explicit Session(SessionConfig cfg, bool keep_log = true);

  const SessionConfig& config() const { return cfg_; }
  const std::string& id() const { return cfg_.session_id; }

  // Resets threshold and models for a new block. A calibration block
  // (condition == nullopt) freezes theta and never triggers.
  void start_block(int block, Condition condition, model::ModelPair models);
  int block() const { return block_; }
  const Condition& condition() const { return condition_; }
  const model::ModelPair& models() const { return models_; }
  const adapt::ThresholdState& threshold() const { return threshold_; }

  TrialHandle begin_trial(TrialSpec spec, TimeMs t_start_ms);
  bool trial_open() const { return open_.has_value(); }
  std::optional<TrialHandle> open_trial() const;

  void push_eda(SignalSample sample);
  void push_pointer(PointerEvent event);
  void push(const ingest::IngestMessage& msg);

  // Features-so-far, model outputs and the trigger decision at `now_ms`.
  // The first overload in a trial latches `triggered` for that trial.
  Evaluation evaluate(TimeMs now_ms);
  TrialFeatures snapshot(TimeMs now_ms) const;

  // Closes the trial at t_start + outcome.duration_ms, updates the
  // threshold and appends the record.
  TrialRecord end_trial(const TrialOutcome& outcome);

  const std::vector<TrialRecord>& records() const { return records_; }
  const IngestCounters& counters() const { return counters_; }

  // Log entries from the given offsets onwards.
  ingest::LogSnapshot log_snapshot(std::size_t session_from = 0,
                                   std::size_t segments_from = 0) const;
  std::size_t session_log_size() const { return session_lines_.size(); }

 private:
  struct OpenTrial {
    TrialSpec spec;
    TimeMs t_start_ms = 0;
    features::TrialAccumulator acc;
    bool triggered = false;
    std::optional<TimeMs> t_trigger_ms;
    std::vector<std::string> lines;
  };

  void log(const ingest::LogEntry& entry, bool in_trial);
  features::PointerParams pointer_params() const;

  SessionConfig cfg_;
  bool keep_log_;
  adapt::Rng rng_;
  int block_ = 0;
  Condition condition_;
  model::ModelPair models_;
  adapt::ThresholdState threshold_;
  int next_global_index_ = 0;
  std::optional<OpenTrial> open_;
  std::optional<TimeMs> last_eda_t_;
  std::optional<TimeMs> last_pointer_t_;
  IngestCounters counters_;
  std::vector<TrialRecord> records_;
  std::vector<std::string> session_lines_;
  std::vector<ingest::Segment> segments_;
};

// Persists everything the writer has not seen yet.
ingest::BackupReport flush_backup(const Session& session, ingest::BackupWriter& writer);

}  // namespace overload
