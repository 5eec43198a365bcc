#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "doctest.h"
#include "overload/error.hpp"
#include "overload/eval.hpp"
#include "overload/report.hpp"
#include "overload/serialize.hpp"
#include "support/oracles.hpp"

using namespace overload;
using namespace overload::eval;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::IoError;
}

TrialRecord rec(bool offered, bool need, bool accepted = false, const std::string& sid = "s") {
  TrialRecord r;
  r.session_id = sid;
  r.condition = Strategy::Aligned;
  r.outcome.help_offered = offered;
  r.outcome.help_accepted = accepted;
  r.outcome.self_reported_need = need;
  return r;
}

std::vector<TrialRecord> from_counts(std::int64_t sw, std::int64_t snw, std::int64_t nsnw,
                                     std::int64_t nsw) {
  std::vector<TrialRecord> out;
  for (int i = 0; i < sw; ++i) out.push_back(rec(true, true));
  for (int i = 0; i < snw; ++i) out.push_back(rec(true, false));
  for (int i = 0; i < nsnw; ++i) out.push_back(rec(false, false));
  for (int i = 0; i < nsw; ++i) out.push_back(rec(false, true));
  return out;
}

}  // namespace

TEST_CASE("confusion examples") {
  CHECK(confusion(std::vector<TrialRecord>{}) == ConfusionCounts{});
  const std::vector<TrialRecord> one{rec(true, true)};
  CHECK(confusion(one).shown_wanted == 1);
  CHECK(confusion(one).total() == 1);
  const auto aligned = from_counts(313, 156, 78, 93);
  CHECK(confusion(aligned) == ConfusionCounts{313, 156, 93, 78});
}

TEST_CASE("detection accuracy and FNR on the reference counts") {
  const ConfusionCounts aligned{313, 156, 93, 78};
  const ConfusionCounts misaligned{199, 161, 206, 74};
  const ConfusionCounts random{214, 140, 194, 91};
  CHECK(detection_accuracy(aligned) == doctest::Approx(391.0 / 640));
  CHECK(detection_accuracy(aligned) == doctest::Approx(0.6109).epsilon(1e-4));
  CHECK(detection_accuracy(misaligned) == doctest::Approx(273.0 / 640));
  CHECK(detection_accuracy(random) == doctest::Approx(305.0 / 639));
  CHECK(false_negative_rate(aligned) == doctest::Approx(93.0 / 406));
  CHECK(false_negative_rate(misaligned) == doctest::Approx(206.0 / 405));
  CHECK(code_of([] { false_negative_rate(ConfusionCounts{0, 3, 0, 4}); }) == Errc::NoPositives);
  CHECK(code_of([] { detection_accuracy(ConfusionCounts{}); }) == Errc::EmptyCounts);
}

TEST_CASE("FNR and recall sum to one") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> d(0, 50);
  for (int i = 0; i < 200; ++i) {
    ConfusionCounts c{d(rng) + 1, d(rng), d(rng), d(rng)};
    const double recall = static_cast<double>(c.shown_wanted) / c.wanted();
    CHECK(false_negative_rate(c) + recall == doctest::Approx(1.0));
  }
}

TEST_CASE("metrics are permutation invariant") {
  auto rs = from_counts(20, 7, 11, 5);
  for (std::size_t i = 0; i < rs.size(); i += 3) rs[i].outcome.help_accepted = rs[i].outcome.help_offered;
  const auto c0 = confusion(rs);
  const double a0 = acceptance_rate(rs);
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(rs.begin(), rs.end(), rng);
    const auto c = confusion(rs);
    CHECK(c == c0);
    CHECK(detection_accuracy(c) == detection_accuracy(c0));
    CHECK(false_negative_rate(c) == false_negative_rate(c0));
    CHECK(acceptance_rate(rs) == a0);
  }
}

TEST_CASE("acceptance rate examples") {
  std::vector<TrialRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(rec(true, true, i < 7));
  rs.push_back(rec(false, true));
  CHECK(acceptance_rate(rs) == doctest::Approx(0.7));
  CHECK(code_of([] { acceptance_rate(std::vector<TrialRecord>{rec(false, true)}); }) == Errc::NoOffers);
  std::vector<TrialRecord> all{rec(true, false, true), rec(true, true, true)};
  CHECK(acceptance_rate(all) == 1.0);
}

TEST_CASE("per-session FNR skips sessions without wanted trials") {
  std::vector<TrialRecord> rs{rec(true, true, false, "a"), rec(false, true, false, "a"),
                              rec(true, false, false, "b")};
  const auto m = per_session_fnr(rs);
  CHECK(m.size() == 1);
  CHECK(m.at("a") == 0.5);
}

TEST_CASE("F for an exact affine copy is infinite") {
  std::vector<double> target, col;
  for (int i = 1; i <= 10; ++i) {
    target.push_back(i);
    col.push_back(2.0 * i + 3.0);
  }
  const std::vector<std::vector<double>> cols{col};
  const auto s = score_features(cols, target);
  CHECK(std::isinf(s.scores[0].f_statistic));
  CHECK(s.scores[0].p_value == 0.0);
}

TEST_CASE("F for an orthogonal column is zero") {
  const std::vector<double> target{1, 2, 3, 4, 5, 6};
  const std::vector<std::vector<double>> cols{{1, -1, -1, -1, -1, 1}};
  // centered target is -2.5..2.5; dot product with the column is 0
  const auto s = score_features(cols, target);
  CHECK(s.scores[0].f_statistic == doctest::Approx(0.0));
  CHECK(s.scores[0].p_value == doctest::Approx(1.0));
}

TEST_CASE("F matches the sum-of-squares oracle and p the beta identity") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> target, col;
    for (int i = 0; i < 50; ++i) {
      const double t = z(rng);
      target.push_back(t);
      col.push_back(0.3 * t + z(rng));
    }
    const std::vector<std::vector<double>> cols{col};
    const auto s = score_features(cols, target).scores[0];
    const double want = static_cast<double>(oracle::f_regression(col, target));
    CHECK(std::abs(s.f_statistic - want) <= 1e-9 * want);
    const double dfd = 48.0;
    const double p = boost::math::ibeta(dfd / 2, 0.5, dfd / (dfd + s.f_statistic));
    CHECK(s.p_value == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("F is invariant under affine maps of a column") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> target, col;
  for (int i = 0; i < 40; ++i) {
    target.push_back(z(rng));
    col.push_back(target.back() + 2 * z(rng));
  }
  std::vector<double> mapped;
  for (double v : col) mapped.push_back(-3.5 * v + 100.0);
  const std::vector<std::vector<double>> cols{col, mapped};
  const auto s = score_features(cols, target);
  CHECK(s.scores[1].f_statistic == doctest::Approx(s.scores[0].f_statistic).epsilon(1e-9));
}

TEST_CASE("ranking and preconditions") {
  const std::vector<double> target{1, 2, 3, 4, 5, 6};
  const std::vector<std::vector<double>> cols{{1, 3, 2, 5, 4, 6}, {6, 5, 4, 3, 2, 1.5}, {0, 1, 0, 1, 0, 1}};
  const auto s = score_features(cols, target);
  REQUIRE(s.rank.size() == 3);
  for (std::size_t i = 1; i < s.rank.size(); ++i) {
    CHECK(s.scores[s.rank[i - 1]].f_statistic >= s.scores[s.rank[i]].f_statistic);
  }
  const std::vector<std::vector<double>> constant{{2, 2, 2, 2, 2, 2}};
  CHECK(code_of([&] { score_features(constant, target); }) == Errc::ConstantColumn);
  const std::vector<double> two{1, 2};
  const std::vector<std::vector<double>> short_cols{{1, 2}};
  CHECK(code_of([&] { score_features(short_cols, two); }) == Errc::InsufficientData);
}

TEST_CASE("report rows for the fixture records") {
  const auto rs = records_from_jsonl(read_text_file(std::string(OVERLOAD_DATA_DIR) + "/reference_records.jsonl"),
                                     "reference_records.jsonl");
  const auto rows = build_report(rs);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].condition == "aligned");
  CHECK(rows[0].trials == 640);
  CHECK(*rows[0].detection_accuracy == doctest::Approx(0.6109).epsilon(1e-4));
  CHECK(rows[2].trials == 639);
  CHECK(render_text(rows).find("0.4773 (48%)") != std::string::npos);
}

TEST_CASE("report of no records") {
  const auto rows = build_report(std::vector<TrialRecord>{});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.trials == 0);
    CHECK_FALSE(r.detection_accuracy.has_value());
  }
  CHECK(render_csv(rows).find("aligned") != std::string::npos);
}
