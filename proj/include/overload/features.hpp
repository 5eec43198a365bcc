#pragma once

// Streaming per-trial feature extraction. Accumulators consume events in
// timestamp order and can be snapshotted at any time without resetting.

#include <cstdint>
#include <optional>

#include "overload/types.hpp"

namespace overload::features {

struct PointerParams {
  double flip_threshold_px = 100.0;
  TimeMs hover_threshold_ms = 500;
  double hover_tolerance_px = 0.0;
};

// Vertical direction flips and hovers.
//
// A direction run is a maximal stretch of steps whose vertical component
// has the same sign; zero vertical steps neither extend nor break a run.
// A run qualifies once |y - y_at_run_start| >= flip_threshold_px, and a
// flip is counted when a qualifying run follows a qualifying run of the
// opposite direction.
//
// A hover is a stretch during which the cursor stays within
// hover_tolerance_px of the position where it came to rest, lasting at
// least hover_threshold_ms. hover_time accumulates the full duration.
class PointerAccumulator {
 public:
  explicit PointerAccumulator(PointerParams params = {});

  void update(const PointerEvent& ev);

  std::int64_t flips() const { return flips_; }
  // Completed hovers plus the in-progress one measured up to `now_ms`.
  std::int64_t hovers(TimeMs now_ms) const;
  TimeMs hover_time_ms(TimeMs now_ms) const;
  std::optional<TimeMs> last_event_ms() const { return last_t_; }

 private:
  TimeMs open_stationary_ms(TimeMs now_ms) const;

  PointerParams params_;
  std::optional<double> last_y_;
  std::optional<TimeMs> last_t_;
  int run_dir_ = 0;
  double run_start_y_ = 0.0;
  bool run_qualified_ = false;
  int last_qualified_dir_ = 0;
  std::int64_t flips_ = 0;

  double anchor_x_ = 0.0;
  double anchor_y_ = 0.0;
  TimeMs anchor_t_ = 0;
  std::int64_t hovers_ = 0;
  TimeMs hover_time_ = 0;
};

// Tonic level relative to the trial-onset baseline: running mean of the
// raw samples minus the first sample (or an explicitly armed baseline).
class EdaAccumulator {
 public:
  void arm_baseline(double baseline) { baseline_ = baseline; }
  void update(const SignalSample& s);

  bool has_baseline() const { return baseline_.has_value(); }
  double baseline() const { return baseline_.value_or(0.0); }
  std::int64_t count() const { return count_; }
  double mean() const;
  double tonic_difference() const;
  // Time spanned by the samples seen so far.
  TimeMs coverage_ms() const;

 private:
  std::optional<double> baseline_;
  std::int64_t count_ = 0;
  double sum_ = 0.0;
  std::optional<TimeMs> first_t_;
  TimeMs last_t_ = 0;
};

class TrialAccumulator {
 public:
  explicit TrialAccumulator(PointerParams params = {}) : pointer_(params) {}

  void update_pointer(const PointerEvent& ev) { pointer_.update(ev); }
  void update_eda(const SignalSample& s) { eda_.update(s); }

  // Current feature values; an in-progress hover counts when it has lasted
  // at least the hover threshold by `now_ms`.
  TrialFeatures snapshot(int difficulty, TimeMs now_ms) const;
  // As above, measured at the latest pointer event.
  TrialFeatures snapshot(int difficulty) const;

  const PointerAccumulator& pointer() const { return pointer_; }
  const EdaAccumulator& eda() const { return eda_; }
  EdaAccumulator& eda() { return eda_; }

 private:
  PointerAccumulator pointer_;
  EdaAccumulator eda_;
};

}  // namespace overload::features
