#include "overload/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace overload::eval {

std::vector<ConditionReport> build_report(std::span<const TrialRecord> records) {
  const auto groups = by_condition(records);
  std::vector<ConditionReport> rows;
  for (Strategy s : {Strategy::Aligned, Strategy::Misaligned, Strategy::Random}) {
    ConditionReport row;
    row.condition = std::string(to_string(s));
    if (auto it = groups.find(row.condition); it != groups.end()) {
      const auto& rs = it->second;
      row.trials = static_cast<std::int64_t>(rs.size());
      row.confusion = confusion(rs);
      if (row.confusion.total() > 0) row.detection_accuracy = detection_accuracy(row.confusion);
      if (row.confusion.wanted() > 0) row.false_negative_rate = false_negative_rate(row.confusion);
      const bool any_offer = std::any_of(rs.begin(), rs.end(), [](const TrialRecord& r) {
        return r.outcome.help_offered;
      });
      if (any_offer) row.acceptance_rate = acceptance_rate(rs);
      if (!rs.empty()) row.answer_accuracy = block_accuracy(rs);
      row.per_session_fnr = per_session_fnr(rs);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string rate(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f (%d%%)", *v, static_cast<int>(std::lround(*v * 100.0)));
  return buf;
}

}  // namespace

std::string render_text(const std::vector<ConditionReport>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-11s %6s %6s %6s %6s %6s  %-13s %-13s %s\n", "condition",
                "trials", "sh_w", "sh_nw", "nsh_w", "nsh_nw", "accuracy", "fnr", "acceptance");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-11s %6lld %6lld %6lld %6lld %6lld  %-13s %-13s %s\n",
                  r.condition.c_str(), static_cast<long long>(r.trials),
                  static_cast<long long>(r.confusion.shown_wanted),
                  static_cast<long long>(r.confusion.shown_not_wanted),
                  static_cast<long long>(r.confusion.not_shown_wanted),
                  static_cast<long long>(r.confusion.not_shown_not_wanted),
                  rate(r.detection_accuracy).c_str(), rate(r.false_negative_rate).c_str(),
                  rate(r.acceptance_rate).c_str());
    out += buf;
  }
  return out;
}

std::string render_json(const std::vector<ConditionReport>& rows) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json conditions = json::array();
  for (const auto& r : rows) {
    conditions.push_back(
        {{"condition", r.condition},
         {"trials", r.trials},
         {"confusion",
          {{"shown_wanted", r.confusion.shown_wanted},
           {"shown_not_wanted", r.confusion.shown_not_wanted},
           {"not_shown_wanted", r.confusion.not_shown_wanted},
           {"not_shown_not_wanted", r.confusion.not_shown_not_wanted}}},
         {"detection_accuracy", opt(r.detection_accuracy)},
         {"false_negative_rate", opt(r.false_negative_rate)},
         {"acceptance_rate", opt(r.acceptance_rate)},
         {"answer_accuracy", opt(r.answer_accuracy)},
         {"per_session_fnr", r.per_session_fnr}});
  }
  return json{{"schema_version", kReportSchemaVersion}, {"conditions", conditions}}.dump(2) + "\n";
}

std::string render_csv(const std::vector<ConditionReport>& rows) {
  std::string out = "condition,shown_wanted,shown_not_wanted,not_shown_wanted,not_shown_not_wanted\n";
  for (const auto& r : rows) {
    out += r.condition + "," + std::to_string(r.confusion.shown_wanted) + "," +
           std::to_string(r.confusion.shown_not_wanted) + "," +
           std::to_string(r.confusion.not_shown_wanted) + "," +
           std::to_string(r.confusion.not_shown_not_wanted) + "\n";
  }
  return out;
}

}  // namespace overload::eval
