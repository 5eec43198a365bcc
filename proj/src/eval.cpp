#include "overload/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>

#include "overload/error.hpp"

namespace overload::eval {

ConfusionCounts confusion(std::span<const TrialRecord> records) {
  ConfusionCounts c;
  for (const auto& r : records) {
    const bool shown = r.outcome.help_offered;
    const bool wanted = r.outcome.self_reported_need;
    if (shown && wanted) ++c.shown_wanted;
    if (shown && !wanted) ++c.shown_not_wanted;
    if (!shown && wanted) ++c.not_shown_wanted;
    if (!shown && !wanted) ++c.not_shown_not_wanted;
  }
  return c;
}

double detection_accuracy(const ConfusionCounts& c) {
  if (c.total() <= 0) throw Error(Errc::EmptyCounts, "no trials to score");
  return static_cast<double>(c.shown_wanted + c.not_shown_not_wanted) /
         static_cast<double>(c.total());
}

double false_negative_rate(const ConfusionCounts& c) {
  if (c.wanted() <= 0) throw Error(Errc::NoPositives, "no trials where help was wanted");
  return static_cast<double>(c.not_shown_wanted) / static_cast<double>(c.wanted());
}

double acceptance_rate(std::span<const TrialRecord> records) {
  std::int64_t offered = 0;
  std::int64_t accepted = 0;
  for (const auto& r : records) {
    if (!r.outcome.help_offered) continue;
    ++offered;
    if (r.outcome.help_accepted) ++accepted;
  }
  if (offered == 0) throw Error(Errc::NoOffers, "no help was offered");
  return static_cast<double>(accepted) / static_cast<double>(offered);
}

double block_accuracy(std::span<const TrialRecord> records) {
  if (records.empty()) throw Error(Errc::EmptyCounts, "no trials");
  const auto correct = std::count_if(records.begin(), records.end(),
                                     [](const TrialRecord& r) { return r.outcome.answer_correct; });
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

std::map<std::string, std::vector<TrialRecord>> by_condition(std::span<const TrialRecord> records) {
  std::map<std::string, std::vector<TrialRecord>> out;
  for (const auto& r : records) out[condition_name(r.condition)].push_back(r);
  return out;
}

std::map<std::string, double> per_session_fnr(std::span<const TrialRecord> records) {
  std::map<std::string, std::vector<TrialRecord>> sessions;
  for (const auto& r : records) sessions[r.session_id].push_back(r);
  std::map<std::string, double> out;
  for (const auto& [id, rs] : sessions) {
    const auto c = confusion(rs);
    if (c.wanted() > 0) out[id] = false_negative_rate(c);
  }
  return out;
}

FeatureScores score_features(std::span<const std::vector<double>> columns,
                             std::span<const double> target) {
  const std::size_t n = target.size();
  if (n < 3) throw Error(Errc::InsufficientData, "score_features needs at least 3 observations");
  const double n_d = static_cast<double>(n);
  const double target_mean = std::accumulate(target.begin(), target.end(), 0.0) / n_d;
  double syy = 0.0;
  for (double t : target) syy += (t - target_mean) * (t - target_mean);
  if (!(syy > 0.0)) throw Error(Errc::ConstantColumn, "target is constant");

  const boost::math::fisher_f dist(1.0, n_d - 2.0);
  FeatureScores out;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const auto& col = columns[k];
    if (col.size() != n) throw Error(Errc::InvalidArgument, "column length differs from target");
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / n_d;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (col[i] - mean) * (col[i] - mean);
      sxy += (col[i] - mean) * (target[i] - target_mean);
    }
    if (!(sxx > 0.0)) {
      throw Error(Errc::ConstantColumn, "column " + std::to_string(k) + " is constant");
    }
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double r2 = r * r;
    FeatureScore s;
    if (r2 >= 1.0) {
      s.f_statistic = std::numeric_limits<double>::infinity();
      s.p_value = 0.0;
    } else {
      s.f_statistic = r2 * (n_d - 2.0) / (1.0 - r2);
      s.p_value = boost::math::cdf(boost::math::complement(dist, s.f_statistic));
    }
    out.scores.push_back(s);
  }
  out.rank.resize(columns.size());
  std::iota(out.rank.begin(), out.rank.end(), std::size_t{0});
  std::stable_sort(out.rank.begin(), out.rank.end(), [&](std::size_t a, std::size_t b) {
    return out.scores[a].f_statistic > out.scores[b].f_statistic;
  });
  return out;
}

std::vector<std::vector<double>> feature_columns(std::span<const TrialRecord> records) {
  std::vector<std::vector<double>> cols(5);
  for (const auto& r : records) {
    const auto& f = r.features;
    cols[0].push_back(static_cast<double>(f.ypos_flips));
    cols[1].push_back(static_cast<double>(f.hover_time_ms));
    cols[2].push_back(static_cast<double>(f.hovers));
    cols[3].push_back(f.tonic_difference);
    cols[4].push_back(static_cast<double>(f.task_difficulty));
  }
  return cols;
}

}  // namespace overload::eval
