#pragma once

// System-performance metrics and univariate F-regression feature scoring.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "overload/types.hpp"

namespace overload::eval {

// Positive class is "help wanted" (self-reported need); the prediction is
// whether help was offered.
struct ConfusionCounts {
  std::int64_t shown_wanted = 0;
  std::int64_t shown_not_wanted = 0;
  std::int64_t not_shown_wanted = 0;
  std::int64_t not_shown_not_wanted = 0;

  std::int64_t total() const {
    return shown_wanted + shown_not_wanted + not_shown_wanted + not_shown_not_wanted;
  }
  std::int64_t wanted() const { return shown_wanted + not_shown_wanted; }

  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(std::span<const TrialRecord> records);

double detection_accuracy(const ConfusionCounts& c);
double false_negative_rate(const ConfusionCounts& c);
double acceptance_rate(std::span<const TrialRecord> records);
double block_accuracy(std::span<const TrialRecord> records);

// Records grouped by condition name ("calibration", "aligned", ...).
std::map<std::string, std::vector<TrialRecord>> by_condition(std::span<const TrialRecord> records);
// FNR per session id; sessions without any wanted trial are left out.
std::map<std::string, double> per_session_fnr(std::span<const TrialRecord> records);

struct FeatureScore {
  double f_statistic = 0.0;  // +inf for a perfectly correlated column
  double p_value = 1.0;
};

struct FeatureScores {
  std::vector<FeatureScore> scores;  // input order
  std::vector<std::size_t> rank;     // column indices by descending F
};

// Pearson r per column against `target`, F = r^2 (n-2) / (1 - r^2) and p
// from the F(1, n-2) survival function.
FeatureScores score_features(std::span<const std::vector<double>> columns,
                             std::span<const double> target);

// Feature columns of the five-feature vector in a fixed order.
inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = {"ypos_flips", "hover_time", "hovers",
                                                 "tonic_difference", "task_difficulty"};
  return names;
}
std::vector<std::vector<double>> feature_columns(std::span<const TrialRecord> records);

}  // namespace overload::eval
