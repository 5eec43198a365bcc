#pragma once

// Per-strategy metric tables rendered as text, JSON and CSV.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "overload/eval.hpp"
#include "overload/types.hpp"

namespace overload::eval {

inline constexpr int kReportSchemaVersion = 1;

struct ConditionReport {
  std::string condition;
  std::int64_t trials = 0;
  ConfusionCounts confusion;
  std::optional<double> detection_accuracy;
  std::optional<double> false_negative_rate;
  std::optional<double> acceptance_rate;
  std::optional<double> answer_accuracy;
  std::map<std::string, double> per_session_fnr;
};

// One row per strategy (aligned, misaligned, random), present even when
// the records contain no trials for it.
std::vector<ConditionReport> build_report(std::span<const TrialRecord> records);

std::string render_text(const std::vector<ConditionReport>& rows);
std::string render_json(const std::vector<ConditionReport>& rows);
std::string render_csv(const std::vector<ConditionReport>& rows);

}  // namespace overload::eval
