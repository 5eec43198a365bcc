#include "doctest.h"
#include "overload/config.hpp"
#include "overload/error.hpp"
#include "overload/serialize.hpp"

using namespace overload;

namespace {

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error thrown");
  return Error(Errc::IoError, "");
}

}  // namespace

TEST_CASE("defaults and the shipped config") {
  const SessionConfig d;
  CHECK(d.theta_init == 12.0);
  CHECK(d.step_delta == 1.0);
  CHECK(d.flip_threshold_px == 100.0);
  CHECK(d.hover_threshold_ms == 500);
  const auto shipped = load_session_config(std::string(OVERLOAD_DATA_DIR) + "/default_config.json");
  CHECK(shipped.theta_init == 12.0);
  CHECK(shipped.rng_seed == 1000);
}

TEST_CASE("config round-trips through JSON") {
  SessionConfig c;
  c.session_id = "p01";
  c.strategy = Strategy::Random;
  c.theta_clamp = ThetaClamp{4.0, 20.0};
  c.rng_seed = 99;
  c.initial_models.mouse.weights[1] = 0.002;
  CHECK(parse_session_config(to_json_string(c)) == c);
}

TEST_CASE("malformed JSON names line and column") {
  const auto e = error_of([] { parse_session_config("{\n  \"theta_init\": 12,\n  oops\n}"); });
  CHECK(e.code() == Errc::ConfigError);
  const std::string msg = e.what();
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("unknown keys and invalid values are config errors") {
  CHECK(error_of([] { parse_session_config(R"({"theta": 3})"); }).code() == Errc::ConfigError);
  CHECK(error_of([] { parse_session_config(R"({"step_delta": 0})"); }).code() == Errc::ConfigError);
  CHECK(error_of([] { parse_session_config(R"({"strategy": "greedy"})"); }).code() == Errc::ConfigError);
  CHECK(error_of([] { parse_session_config(R"({"theta_clamp": [20, 30]})"); }).code() == Errc::ConfigError);
  CHECK(error_of([] { parse_session_config(R"({"eval_period_ms": "1s"})"); }).code() == Errc::ConfigError);
  CHECK(error_of([] { parse_session_config("[1, 2]"); }).code() == Errc::ConfigError);
}

TEST_CASE("model weights must match the modality") {
  const auto e = error_of([] {
    parse_session_config(R"({"initial_models": {"eda": {"modality": "eda", "weights": [1], "intercept": 0},
                                                "mouse": {"modality": "mouse", "weights": [1,2,3,4], "intercept": 0}}})");
  });
  CHECK((e.code() == Errc::ArityMismatch || e.code() == Errc::ConfigError));
}

TEST_CASE("trial records round-trip and require ground truth") {
  TrialRecord r;
  r.session_id = "s-1";
  r.block = 2;
  r.condition = Strategy::Misaligned;
  r.spec = {4, 24, 1, 3, 5};
  r.features = {3, 2, 1500, 0.25, 1};
  r.y_eda = 11.5;
  r.y_mouse = 12.25;
  r.y_final = 12.25;
  r.triggered = true;
  r.t_trigger_ms = 123000;
  r.theta_before = 12;
  r.theta_after = 10;
  r.outcome.help_offered = true;
  r.outcome.self_reported_need = true;
  r.outcome.duration_ms = 8000;
  const auto text = records_to_jsonl({r, r});
  const auto back = records_from_jsonl(text, "mem");
  REQUIRE(back.size() == 2);
  CHECK(back[0] == r);

  auto j = to_json(r);
  j["outcome"].erase("self_reported_need");
  CHECK(error_of([&] { trial_record_from_json(j); }).code() == Errc::MissingGroundTruth);
  j["outcome"]["self_reported_need"] = nullptr;
  CHECK(error_of([&] { trial_record_from_json(j); }).code() == Errc::MissingGroundTruth);
}

TEST_CASE("strategy and condition names") {
  for (auto s : {Strategy::Aligned, Strategy::Misaligned, Strategy::Random}) {
    CHECK(parse_strategy(to_string(s)) == s);
    CHECK(parse_condition(condition_name(s)) == Condition(s));
  }
  CHECK(condition_name(std::nullopt) == "calibration");
  CHECK_FALSE(parse_condition("calibration").has_value());
}
