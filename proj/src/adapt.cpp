#include "overload/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "overload/error.hpp"

namespace overload::adapt {

RuleOutcome rule_outcome(const TrialOutcome& o) {
  return {o.help_offered, o.help_accepted, o.answer_correct};
}

ThresholdState initial_state(const SessionConfig& cfg, Strategy strategy) {
  ThresholdState s;
  s.theta = cfg.theta_init;
  s.step_delta = cfg.step_delta;
  s.strategy = strategy;
  s.clamp = cfg.theta_clamp;
  return s;
}

bool should_trigger(double y_final, double theta) { return y_final > theta; }

double aligned_delta(const RuleOutcome& outcome, double step_delta) {
  if (outcome.help_accepted && !outcome.help_offered) {
    throw Error(Errc::InvalidArgument, "help accepted without an offer");
  }
  double k = 0.0;
  if (!outcome.help_offered) {
    k = outcome.answer_correct ? 1.0 : -4.0;
  } else if (outcome.help_accepted) {
    k = outcome.answer_correct ? -1.0 : -2.0;
  } else {
    k = outcome.answer_correct ? 4.0 : 2.0;
  }
  return k * step_delta;
}

double max_step(double step_delta) { return 4.0 * step_delta; }

double random_delta(double step_delta, Rng& rng) {
  const double x = max_step(step_delta);
  std::uniform_real_distribution<double> dist(-x, std::nextafter(x, std::numeric_limits<double>::max()));
  return std::min(dist(rng), x);
}

ThresholdState apply_update(ThresholdState state, const RuleOutcome& outcome, Rng& rng,
                            int global_index) {
  double delta = 0.0;
  switch (state.strategy) {
    case Strategy::Aligned:
      delta = aligned_delta(outcome, state.step_delta);
      break;
    case Strategy::Misaligned:
      delta = -aligned_delta(outcome, state.step_delta);
      break;
    case Strategy::Random:
      delta = random_delta(state.step_delta, rng);
      break;
  }
  const double before = state.theta;
  double after = before + delta;
  if (state.clamp) after = std::clamp(after, state.clamp->min, state.clamp->max);
  state.theta = after;
  state.history.push_back({global_index, before, delta, after});
  return state;
}

std::string trajectory_csv(const ThresholdState& state) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "global_index,theta_before,delta,theta_after,strategy\n";
  for (const auto& h : state.history) {
    out << h.global_index << ',' << h.theta_before << ',' << h.delta_applied << ','
        << h.theta_after << ',' << to_string(state.strategy) << '\n';
  }
  return out.str();
}

}  // namespace overload::adapt
