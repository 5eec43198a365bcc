#pragma once

// Domain types shared by every module: trial identities, raw stream
// samples, the per-trial feature vector and the closed-trial record.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace overload {

using TimeMs = std::int64_t;

enum class Strategy { Aligned, Misaligned, Random };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

// A block is either the calibration block or runs one adaptation strategy.
using Condition = std::optional<Strategy>;

std::string condition_name(const Condition& c);
Condition parse_condition(std::string_view name);

inline constexpr int kOptionsPerQuestion = 5;
inline constexpr int kNoTrial = -1;

struct TrialSpec {
  int trial_index = 0;   // within block
  int global_index = 0;  // within session; assigned by the session
  int difficulty = 0;    // 0 = easy, 1 = difficult
  int correct_option = 0;
  int n_options = kOptionsPerQuestion;

  bool operator==(const TrialSpec&) const = default;
};

struct TrialOutcome {
  bool help_offered = false;
  bool help_accepted = false;
  bool answer_correct = false;
  bool self_reported_need = false;
  int chosen_option = 0;
  TimeMs duration_ms = 0;
  // 1..7 self-report, present on calibration trials only.
  std::optional<int> reported_load;

  bool operator==(const TrialOutcome&) const = default;
};

struct SignalSample {
  TimeMs t_ms = 0;
  double value = 0.0;
  int trial_index = kNoTrial;
  int global_index = kNoTrial;
};

struct PointerEvent {
  TimeMs t_ms = 0;
  double x = 0.0;
  double y = 0.0;  // screen coordinates, grows downward
  int trial_index = kNoTrial;
  int global_index = kNoTrial;
};

struct TrialFeatures {
  std::int64_t ypos_flips = 0;
  std::int64_t hovers = 0;
  TimeMs hover_time_ms = 0;
  double tonic_difference = 0.0;
  int task_difficulty = 0;

  bool operator==(const TrialFeatures&) const = default;
};

struct TrialRecord {
  std::string session_id;
  int block = 0;
  Condition condition;
  TrialSpec spec;
  TrialFeatures features;
  double y_eda = 0.0;
  double y_mouse = 0.0;
  double y_final = 0.0;
  bool triggered = false;
  std::optional<TimeMs> t_trigger_ms;
  double theta_before = 0.0;
  double theta_after = 0.0;
  // Set when the trial saw less than one second of EDA.
  bool low_eda_coverage = false;
  TrialOutcome outcome;

  bool operator==(const TrialRecord&) const = default;
};

}  // namespace overload
