#include "overload/features.hpp"

#include <cmath>

namespace overload::features {

PointerAccumulator::PointerAccumulator(PointerParams params) : params_(params) {}

void PointerAccumulator::update(const PointerEvent& ev) {
  if (!last_t_) {
    last_y_ = ev.y;
    last_t_ = ev.t_ms;
    anchor_x_ = ev.x;
    anchor_y_ = ev.y;
    anchor_t_ = ev.t_ms;
    return;
  }

  const double dy = ev.y - *last_y_;
  if (dy != 0.0) {
    const int dir = dy > 0.0 ? 1 : -1;
    if (dir != run_dir_) {
      run_dir_ = dir;
      run_start_y_ = *last_y_;
      run_qualified_ = false;
    }
    if (!run_qualified_ && std::abs(ev.y - run_start_y_) >= params_.flip_threshold_px) {
      run_qualified_ = true;
      if (last_qualified_dir_ == -dir) ++flips_;
      last_qualified_dir_ = dir;
    }
  }

  if (std::hypot(ev.x - anchor_x_, ev.y - anchor_y_) > params_.hover_tolerance_px) {
    const TimeMs stationary = ev.t_ms - anchor_t_;
    if (stationary >= params_.hover_threshold_ms) {
      ++hovers_;
      hover_time_ += stationary;
    }
    anchor_x_ = ev.x;
    anchor_y_ = ev.y;
    anchor_t_ = ev.t_ms;
  }
  last_y_ = ev.y;
  last_t_ = ev.t_ms;
}

TimeMs PointerAccumulator::open_stationary_ms(TimeMs now_ms) const {
  if (!last_t_ || now_ms < anchor_t_) return 0;
  const TimeMs stationary = now_ms - anchor_t_;
  return stationary >= params_.hover_threshold_ms ? stationary : 0;
}

std::int64_t PointerAccumulator::hovers(TimeMs now_ms) const {
  return hovers_ + (open_stationary_ms(now_ms) > 0 ? 1 : 0);
}

TimeMs PointerAccumulator::hover_time_ms(TimeMs now_ms) const {
  return hover_time_ + open_stationary_ms(now_ms);
}

void EdaAccumulator::update(const SignalSample& s) {
  if (!baseline_) baseline_ = s.value;
  if (!first_t_) first_t_ = s.t_ms;
  last_t_ = s.t_ms;
  ++count_;
  sum_ += s.value;
}

double EdaAccumulator::mean() const {
  return count_ > 0 ? sum_ / static_cast<double>(count_) : baseline();
}

double EdaAccumulator::tonic_difference() const {
  if (count_ == 0) return 0.0;
  return mean() - baseline();
}

TimeMs EdaAccumulator::coverage_ms() const { return first_t_ ? last_t_ - *first_t_ : 0; }

TrialFeatures TrialAccumulator::snapshot(int difficulty, TimeMs now_ms) const {
  TrialFeatures f;
  f.ypos_flips = pointer_.flips();
  f.hovers = pointer_.hovers(now_ms);
  f.hover_time_ms = pointer_.hover_time_ms(now_ms);
  f.tonic_difference = eda_.tonic_difference();
  f.task_difficulty = difficulty;
  return f;
}

TrialFeatures TrialAccumulator::snapshot(int difficulty) const {
  return snapshot(difficulty, pointer_.last_event_ms().value_or(0));
}

}  // namespace overload::features
