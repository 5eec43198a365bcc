#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "overload/model.hpp"
#include "overload/types.hpp"

namespace overload {

struct ThetaClamp {
  double min = 0.0;
  double max = 0.0;

  bool operator==(const ThetaClamp&) const = default;
};

// Session-wide configuration. Loads from JSON with snake_case field names
// identical to the member names; every field is optional and falls back to
// the defaults below.
struct SessionConfig {
  std::string session_id = "session";
  double theta_init = 12.0;
  double step_delta = 1.0;
  Strategy strategy = Strategy::Aligned;
  TimeMs eval_period_ms = 1000;
  double flip_threshold_px = 100.0;
  TimeMs hover_threshold_ms = 500;
  double hover_tolerance_px = 0.0;
  double target_scale = 2.0;
  double learning_rate = 0.2;
  double l2_lambda = 0.01;
  int calibration_steps = 1;
  bool preconditioned_calibration = true;
  std::optional<ThetaClamp> theta_clamp;
  std::uint64_t rng_seed = 0;
  TimeMs backup_period_ms = 60'000;
  model::ModelPair initial_models;

  bool operator==(const SessionConfig&) const = default;
};

// Throws Error(ConfigError) when an invariant does not hold.
void validate(const SessionConfig& cfg);

model::CalibrationOptions calibration_options(const SessionConfig& cfg);

// Parse errors carry "line L, column C" in the message.
SessionConfig parse_session_config(const std::string& json_text);
SessionConfig load_session_config(const std::filesystem::path& path);

std::string to_json_string(const SessionConfig& cfg);

}  // namespace overload
