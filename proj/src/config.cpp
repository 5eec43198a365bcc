#include "overload/config.hpp"

#include <cmath>

#include "overload/error.hpp"
#include "overload/serialize.hpp"

namespace overload {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Aligned: return "aligned";
    case Strategy::Misaligned: return "misaligned";
    case Strategy::Random: return "random";
  }
  return "aligned";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "aligned") return Strategy::Aligned;
  if (name == "misaligned") return Strategy::Misaligned;
  if (name == "random") return Strategy::Random;
  throw Error(Errc::ConfigError, "unknown strategy '" + std::string(name) + "'");
}

std::string condition_name(const Condition& c) {
  return c ? std::string(to_string(*c)) : std::string("calibration");
}

Condition parse_condition(std::string_view name) {
  if (name == "calibration") return std::nullopt;
  return parse_strategy(name);
}

void validate(const SessionConfig& cfg) {
  auto fail = [](const std::string& msg) { throw Error(Errc::ConfigError, msg); };
  if (!(cfg.theta_init > 0.0) || !std::isfinite(cfg.theta_init)) fail("theta_init must be > 0");
  if (!(cfg.step_delta > 0.0) || !std::isfinite(cfg.step_delta)) fail("step_delta must be > 0");
  if (cfg.eval_period_ms <= 0) fail("eval_period_ms must be > 0");
  if (!(cfg.flip_threshold_px > 0.0)) fail("flip_threshold_px must be > 0");
  if (cfg.hover_threshold_ms <= 0) fail("hover_threshold_ms must be > 0");
  if (!(cfg.hover_tolerance_px >= 0.0)) fail("hover_tolerance_px must be >= 0");
  if (!(cfg.target_scale > 0.0)) fail("target_scale must be > 0");
  if (!(cfg.learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(cfg.l2_lambda >= 0.0)) fail("l2_lambda must be >= 0");
  if (cfg.calibration_steps < 1) fail("calibration_steps must be >= 1");
  if (cfg.backup_period_ms <= 0) fail("backup_period_ms must be > 0");
  if (cfg.theta_clamp) {
    const auto& c = *cfg.theta_clamp;
    if (!(c.min <= cfg.theta_init && cfg.theta_init <= c.max)) {
      fail("theta_clamp must satisfy min <= theta_init <= max");
    }
  }
}

model::CalibrationOptions calibration_options(const SessionConfig& cfg) {
  return {cfg.learning_rate, cfg.l2_lambda, cfg.target_scale, cfg.calibration_steps,
          cfg.preconditioned_calibration};
}

SessionConfig parse_session_config(const std::string& json_text) {
  return session_config_from_json(parse_json(json_text, "config"));
}

SessionConfig load_session_config(const std::filesystem::path& path) {
  return session_config_from_json(read_json_file(path));
}

std::string to_json_string(const SessionConfig& cfg) { return to_json(cfg).dump(2); }

}  // namespace overload
