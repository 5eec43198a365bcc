#include <algorithm>

#include "doctest.h"
#include "overload/error.hpp"
#include "overload/session.hpp"

using namespace overload;

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

TrialSpec spec(int i, int difficulty = 0) { return {i, 0, difficulty, 2, kOptionsPerQuestion}; }

TrialOutcome outcome(bool offered, bool accepted, bool correct, TimeMs duration = 5000) {
  TrialOutcome o;
  o.help_offered = offered;
  o.help_accepted = accepted;
  o.answer_correct = correct;
  o.duration_ms = duration;
  return o;
}

}  // namespace

TEST_CASE("begin_trial numbering") {
  Session s(SessionConfig{});
  const auto h0 = s.begin_trial(spec(0), 0);
  CHECK(h0.global_index == 0);
  CHECK(code_of([&] { s.begin_trial(spec(1), 10); }) == Errc::TrialAlreadyOpen);
  s.end_trial(outcome(false, false, true));
  const auto h1 = s.begin_trial(spec(1), 6000);
  CHECK(h1.global_index == h0.global_index + 1);
}

TEST_CASE("begin_trial validates the spec") {
  Session s(SessionConfig{});
  CHECK(code_of([&] { s.begin_trial(spec(0, 2), 0); }) == Errc::InvalidArgument);
  auto bad = spec(0);
  bad.correct_option = 5;
  CHECK(code_of([&] { s.begin_trial(bad, 0); }) == Errc::InvalidArgument);
  CHECK_FALSE(s.trial_open());
}

TEST_CASE("end_trial threshold examples") {
  SUBCASE("missed help, wrong answer: 12 -> 8") {
    Session s(SessionConfig{});
    s.begin_trial(spec(0), 0);
    CHECK(s.end_trial(outcome(false, false, false)).theta_after == 8.0);
  }
  SUBCASE("accepted and correct: 12 -> 11") {
    Session s(SessionConfig{});
    s.begin_trial(spec(0), 0);
    const auto r = s.end_trial(outcome(true, true, true));
    CHECK(r.theta_before == 12.0);
    CHECK(r.theta_after == 11.0);
  }
  SUBCASE("no open trial") {
    Session s(SessionConfig{});
    CHECK(code_of([&] { s.end_trial(outcome(false, false, true)); }) == Errc::NoOpenTrial);
  }
}

TEST_CASE("every closed trial applies the rule exactly") {
  for (auto strat : {Strategy::Aligned, Strategy::Misaligned, Strategy::Random}) {
    SessionConfig cfg;
    cfg.strategy = strat;
    cfg.rng_seed = 17;
    Session s(cfg);
    int i = 0;
    for (bool offered : {false, true}) {
      for (bool accepted : {false, true}) {
        if (accepted && !offered) continue;
        for (bool correct : {false, true}) {
          s.begin_trial(spec(i), i * 10000);
          const auto r = s.end_trial(outcome(offered, accepted, correct));
          const double d = r.theta_after - r.theta_before;
          const double a = adapt::aligned_delta({offered, accepted, correct}, 1.0);
          if (strat == Strategy::Aligned) CHECK(d == a);
          if (strat == Strategy::Misaligned) CHECK(d == -a);
          if (strat == Strategy::Random) CHECK(std::abs(d) <= 4.0);
          CHECK(r.spec.global_index == i);
          ++i;
        }
      }
    }
  }
}

TEST_CASE("calibration block freezes theta and never triggers") {
  Session s(SessionConfig{});
  model::ModelPair hot;
  hot.eda.intercept = 100.0;
  s.start_block(0, std::nullopt, hot);
  s.begin_trial(spec(0), 0);
  const auto ev = s.evaluate(500);
  CHECK(ev.y_final > ev.theta);
  CHECK_FALSE(ev.overload);
  const auto r = s.end_trial(outcome(false, false, false));
  CHECK_FALSE(r.triggered);
  CHECK(r.theta_after == r.theta_before);
  CHECK_FALSE(r.condition.has_value());
}

TEST_CASE("first overload latches the trigger") {
  Session s(SessionConfig{});
  model::ModelPair hot;
  hot.eda.intercept = 100.0;
  s.start_block(1, Strategy::Aligned, hot);
  s.begin_trial(spec(0), 1000);
  CHECK(s.evaluate(2000).first_trigger);
  const auto again = s.evaluate(3000);
  CHECK(again.overload);
  CHECK_FALSE(again.first_trigger);
  const auto r = s.end_trial(outcome(true, false, true));
  CHECK(r.triggered);
  CHECK(r.t_trigger_ms == 2000);
}

TEST_CASE("eda ingest") {
  Session s(SessionConfig{});
  s.begin_trial(spec(0), 0);
  s.push_eda({0, 2.00});
  CHECK(s.snapshot(0).tonic_difference == 0.0);
  s.push_eda({10, 3.00});
  CHECK(s.snapshot(10).tonic_difference == doctest::Approx(0.5));
  CHECK(code_of([&] { s.push_eda({5, 1.0}); }) == Errc::NonMonotonicTimestamp);
  CHECK(s.counters().eda_rejected == 1);
  s.end_trial(outcome(false, false, true, 100));
  s.push_eda({200, 7.0});
  CHECK(s.counters().eda_out_of_trial == 1);

  const auto snap = s.log_snapshot();
  CHECK(snap.session_lines.back().find("\"trial_index\":-1") != std::string::npos);
  REQUIRE(snap.segments.size() == 1);
  for (const auto& line : snap.segments[0].lines) {
    CHECK(line.find("\"trial_index\":-1") == std::string::npos);
  }
  // the segment is a subsequence of the session log
  auto it = snap.session_lines.begin();
  for (const auto& line : snap.segments[0].lines) {
    it = std::find(it, snap.session_lines.end(), line);
    REQUIRE(it != snap.session_lines.end());
  }
}

TEST_CASE("pointer ingest") {
  Session s(SessionConfig{});
  s.push_pointer({0, 1, 1});
  CHECK(s.counters().pointer_dropped == 1);
  s.begin_trial(spec(0), 100);
  s.push_pointer({100, 50, 50});
  s.push_pointer({400, 50, 50});
  s.push_pointer({800, 50, 50});
  const auto f = s.snapshot(800);
  CHECK(f.hovers == 1);
  CHECK(f.hover_time_ms == 700);
  CHECK(code_of([&] { s.push_pointer({700, 0, 0}); }) == Errc::NonMonotonicTimestamp);
  CHECK(s.counters().pointer_accepted == 3);
}

TEST_CASE("snapshot right after begin_trial") {
  Session s(SessionConfig{});
  s.begin_trial(spec(0, 1), 0);
  CHECK(s.snapshot(0) == TrialFeatures{0, 0, 0, 0.0, 1});
  CHECK(s.snapshot(0) == s.snapshot(0));
}

TEST_CASE("low eda coverage is flagged") {
  Session s(SessionConfig{});
  s.begin_trial(spec(0), 0);
  for (TimeMs t = 0; t < 500; t += 10) s.push_eda({t, 1.0});
  CHECK(s.end_trial(outcome(false, false, true, 600)).low_eda_coverage);
  s.begin_trial(spec(1), 1000);
  for (TimeMs t = 1000; t <= 2000; t += 10) s.push_eda({t, 1.0});
  CHECK_FALSE(s.end_trial(outcome(false, false, true, 1500)).low_eda_coverage);
}

TEST_CASE("end_trial validates the outcome") {
  Session s(SessionConfig{});
  s.begin_trial(spec(0), 0);
  CHECK(code_of([&] { s.end_trial(outcome(false, true, true)); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { s.end_trial(outcome(false, false, true, -1)); }) == Errc::InvalidArgument);
  CHECK(s.trial_open());
}

TEST_CASE("start_block inside a trial is rejected") {
  Session s(SessionConfig{});
  s.begin_trial(spec(0), 0);
  CHECK(code_of([&] { s.start_block(1, Strategy::Random, {}); }) == Errc::TrialAlreadyOpen);
}
