#pragma once

// Trigger decision and rule-based threshold adaptation.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "overload/config.hpp"
#include "overload/types.hpp"

namespace overload::adapt {

using Rng = std::mt19937_64;

struct RuleOutcome {
  bool help_offered = false;
  bool help_accepted = false;
  bool answer_correct = false;
};

RuleOutcome rule_outcome(const TrialOutcome& o);

struct HistoryEntry {
  int global_index = 0;
  double theta_before = 0.0;
  double delta_applied = 0.0;
  double theta_after = 0.0;

  bool operator==(const HistoryEntry&) const = default;
};

struct ThresholdState {
  double theta = 12.0;
  double step_delta = 1.0;
  Strategy strategy = Strategy::Aligned;
  std::optional<ThetaClamp> clamp;
  std::vector<HistoryEntry> history;
};

ThresholdState initial_state(const SessionConfig& cfg, Strategy strategy);

// Overload is declared only when y_final strictly exceeds theta.
bool should_trigger(double y_final, double theta);

// Multiple of step_delta from the rule table:
//   not offered: correct +1, incorrect -4
//   accepted:    correct -1, incorrect -2
//   declined:    correct +4, incorrect +2
double aligned_delta(const RuleOutcome& outcome, double step_delta);

// Largest magnitude any single update may have: 4 * step_delta.
double max_step(double step_delta);

// Draws from Uniform[-4*step_delta, +4*step_delta] (closed interval).
double random_delta(double step_delta, Rng& rng);

// Applies one end-of-trial update. The random strategy consumes exactly one
// draw from `rng`; the other strategies never touch it.
ThresholdState apply_update(ThresholdState state, const RuleOutcome& outcome, Rng& rng,
                            int global_index = 0);

// CSV with header "global_index,theta_before,delta,theta_after,strategy".
std::string trajectory_csv(const ThresholdState& state);

}  // namespace overload::adapt
