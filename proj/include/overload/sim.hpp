#pragma once

// Synthetic respondents, signal-trace synthesis and the closed-loop session
// runner (calibration block followed by strategy blocks).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "overload/adapt.hpp"
#include "overload/assist.hpp"
#include "overload/config.hpp"
#include "overload/eval.hpp"
#include "overload/ingest.hpp"
#include "overload/model.hpp"
#include "overload/session.hpp"
#include "overload/types.hpp"

namespace overload::sim {

using Rng = std::mt19937_64;

// Behavioural stand-in for a participant. Latent load lives on the same
// 1..7 scale as the self-report.
struct RespondentProfile {
  double p_correct_easy = 0.70;
  double p_correct_hard = 0.30;
  double load_mu_easy = 4.5;
  double load_mu_hard = 5.5;
  double load_sigma = 1.0;
  double need_threshold = 4.5;
  double p_accept_given_need = 0.8;
  double p_accept_given_no_need = 0.2;
  double help_boost = 0.35;
  std::uint64_t rng_seed = 1;

  bool operator==(const RespondentProfile&) const = default;
};

void validate(const RespondentProfile& p);
RespondentProfile parse_profile(const std::string& json_text);
RespondentProfile load_profile(const std::filesystem::path& path);
std::string to_json_string(const RespondentProfile& p);

// Unassisted probability of a correct answer: linear in latent load,
// equal to p_correct_easy at load_mu_easy and p_correct_hard at
// load_mu_hard, clamped to [0,1].
double correct_probability(const RespondentProfile& p, double latent_load);

// 1..7 self-report for a latent load: round, then clamp.
int self_report(double latent_load);

inline constexpr int kTrialsPerBlock = 20;

struct BlockPlan {
  Condition condition;  // nullopt = calibration
  int n_trials = kTrialsPerBlock;
  std::vector<int> difficulty_sequence;
};

// Shuffled sequence with exactly n/2 easy and n/2 hard trials.
BlockPlan make_block(Condition condition, Rng& rng);
// Calibration block followed by the three strategies in shuffled order.
std::vector<BlockPlan> default_plan(Rng& rng);
// Throws Error(InvalidPlan).
void validate(std::span<const BlockPlan> plan);

struct TraceContext {
  TimeMs t_start_ms = 0;
  double tonic_level = 5.0;
};

struct TrialTrace {
  std::vector<SignalSample> eda;
  std::vector<PointerEvent> pointer;
  double latent_load = 0.0;
  TimeMs duration_ms = 0;
};

// EDA at 100 Hz whose tonic drift grows with the latent load, and a pointer
// trace whose flip and hover counts grow with it. Deterministic in `rng`.
TrialTrace synth_trial_trace(const RespondentProfile& profile, const TrialSpec& spec, Rng& rng,
                             TraceContext ctx = {});

// Samples and events merged into push order: by time, EDA before pointer
// on ties.
std::vector<ingest::IngestMessage> merge_streams(const TrialTrace& trace);

// Feeds `events` into the open trial of `session`, evaluating every
// eval_period_ms from the trial start until the first trigger or t_end.
// `on_trigger` runs on the evaluation that latched the trigger and returns
// how long the task is suspended; later events are shifted by that pause.
// Returns the pause (0 when nothing triggered).
TimeMs drive_trial(Session& session, std::span<const ingest::IngestMessage> events, TimeMs t_end_ms,
                   const std::function<TimeMs(const Evaluation&)>& on_trigger);

// One-shot (or configured multi-step) personalization from the calibration
// block's records.
model::ModelPair calibrate_models(const SessionConfig& cfg,
                                  std::span<const TrialRecord> calibration_records);

std::string question_text(const TrialSpec& spec);
// The concept phrase inside question_text() that a respondent selects.
std::string question_concept(const TrialSpec& spec);

struct BlockMetrics {
  eval::ConfusionCounts confusion;
  std::optional<double> detection_accuracy;
  std::optional<double> false_negative_rate;
  std::optional<double> acceptance_rate;
  double accuracy = 0.0;
  int offers = 0;
  int accepts = 0;
};

BlockMetrics block_metrics(std::span<const TrialRecord> records);

struct InterventionLog {
  int global_index = 0;
  std::vector<assist::Transition> transitions;
  bool client_timed_out = false;
};

struct BlockReport {
  int block = 0;
  Condition condition;
  std::vector<TrialRecord> records;
  std::vector<InterventionLog> interventions;
  std::vector<adapt::HistoryEntry> theta_history;
  BlockMetrics metrics;
};

struct SessionReport {
  std::string session_id;
  std::uint64_t config_seed = 0;
  std::uint64_t profile_seed = 0;
  model::ModelPair calibrated_models;
  std::vector<BlockReport> blocks;
  std::vector<ingest::BackupReport> backups;

  std::vector<TrialRecord> all_records() const;
};

struct SimOptions {
  // When set, session logs and trial segments are written here with the
  // backup cadence from the config (virtual clock).
  std::optional<std::filesystem::path> persist_dir;
  // Defaults to a MockClient.
  assist::ExplanationClient* client = nullptr;
  TimeMs inter_trial_gap_ms = 2000;
};

SessionReport run_session(const SessionConfig& config, const RespondentProfile& profile,
                          std::span<const BlockPlan> plan, const SimOptions& options = {});

// The n-th session of a batch: seeds offset by `ordinal`, id suffixed.
SessionConfig session_config_for(const SessionConfig& base, int ordinal);
RespondentProfile profile_for(const RespondentProfile& base, int ordinal);
// Inverse of session_config_for: the config a simulated session `id` ran
// with, or `base` unchanged when `id` is not "<base id>-<k>".
SessionConfig config_for_session(const SessionConfig& base, const std::string& id);

// Runs sessions 0..n-1 of a batch (session_config_for / profile_for, plan
// drawn from the profile seed) on up to `jobs` threads. With `persist_dir`
// each session's logs are written there.
std::vector<SessionReport> run_batch(const SessionConfig& base, const RespondentProfile& profile,
                                     int n_sessions, int jobs = 1,
                                     std::optional<std::filesystem::path> persist_dir = {});

struct StrategySummary {
  std::string condition;
  int sessions = 0;
  std::optional<double> mean_fnr;
  int fnr_sessions = 0;
  std::optional<double> mean_acceptance;
  int acceptance_sessions = 0;
  double mean_accuracy = 0.0;
  double mean_offers = 0.0;
  eval::ConfusionCounts pooled;
};

struct SimulationSummary {
  int sessions = 0;
  double baseline_accuracy = 0.0;  // calibration blocks, no assistance
  std::vector<StrategySummary> strategies;  // aligned, misaligned, random

  const StrategySummary& of(Strategy s) const;
};

SimulationSummary summarize(std::span<const SessionReport> reports);

std::string to_json_string(const SessionReport& report);
std::string to_json_string(const SimulationSummary& summary);

}  // namespace overload::sim
