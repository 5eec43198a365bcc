#include "overload/serialize.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "overload/error.hpp"

namespace overload {

namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw Error(Errc::ConfigError, std::string(what) + ": " + e.what());
  }
}

Json optional_int(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(text, at);
    throw Error(Errc::ConfigError, origin + ": line " + std::to_string(line) + ", column " +
                                       std::to_string(col) + ": malformed JSON");
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoError, "cannot read " + path.string());
  return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

Json to_json(const TrialSpec& s) {
  return Json{{"trial_index", s.trial_index},
              {"global_index", s.global_index},
              {"difficulty", s.difficulty},
              {"correct_option", s.correct_option},
              {"n_options", s.n_options}};
}

Json to_json(const TrialOutcome& o) {
  return Json{{"help_offered", o.help_offered},
              {"help_accepted", o.help_accepted},
              {"answer_correct", o.answer_correct},
              {"self_reported_need", o.self_reported_need},
              {"chosen_option", o.chosen_option},
              {"duration_ms", o.duration_ms},
              {"reported_load", optional_int(o.reported_load)}};
}

Json to_json(const TrialFeatures& f) {
  return Json{{"ypos_flips", f.ypos_flips},
              {"hovers", f.hovers},
              {"hover_time_ms", f.hover_time_ms},
              {"tonic_difference", f.tonic_difference},
              {"task_difficulty", f.task_difficulty}};
}

Json to_json(const TrialRecord& r) {
  return Json{{"session_id", r.session_id},
              {"block", r.block},
              {"condition", condition_name(r.condition)},
              {"spec", to_json(r.spec)},
              {"features", to_json(r.features)},
              {"y_eda", r.y_eda},
              {"y_mouse", r.y_mouse},
              {"y_final", r.y_final},
              {"triggered", r.triggered},
              {"t_trigger_ms", r.t_trigger_ms ? Json(*r.t_trigger_ms) : Json(nullptr)},
              {"theta_before", r.theta_before},
              {"theta_after", r.theta_after},
              {"low_eda_coverage", r.low_eda_coverage},
              {"outcome", to_json(r.outcome)}};
}

Json to_json(const model::ModelState& m) {
  return Json{{"modality", model::to_string(m.modality)},
              {"weights", m.weights},
              {"intercept", m.intercept}};
}

Json to_json(const model::ModelPair& p) {
  return Json{{"eda", to_json(p.eda)}, {"mouse", to_json(p.mouse)}};
}

Json to_json(const SessionConfig& c) {
  Json j{{"session_id", c.session_id},
         {"theta_init", c.theta_init},
         {"step_delta", c.step_delta},
         {"strategy", to_string(c.strategy)},
         {"eval_period_ms", c.eval_period_ms},
         {"flip_threshold_px", c.flip_threshold_px},
         {"hover_threshold_ms", c.hover_threshold_ms},
         {"hover_tolerance_px", c.hover_tolerance_px},
         {"target_scale", c.target_scale},
         {"learning_rate", c.learning_rate},
         {"l2_lambda", c.l2_lambda},
         {"calibration_steps", c.calibration_steps},
         {"preconditioned_calibration", c.preconditioned_calibration},
         {"theta_clamp", nullptr},
         {"rng_seed", c.rng_seed},
         {"backup_period_ms", c.backup_period_ms},
         {"eda_model", to_json(c.initial_models.eda)},
         {"mouse_model", to_json(c.initial_models.mouse)}};
  if (c.theta_clamp) j["theta_clamp"] = Json::array({c.theta_clamp->min, c.theta_clamp->max});
  return j;
}

TrialSpec trial_spec_from_json(const Json& j) {
  return guarded("trial spec", [&] {
    TrialSpec s;
    s.trial_index = j.at("trial_index").get<int>();
    s.global_index = j.at("global_index").get<int>();
    s.difficulty = j.at("difficulty").get<int>();
    s.correct_option = j.at("correct_option").get<int>();
    s.n_options = j.at("n_options").get<int>();
    return s;
  });
}

TrialOutcome trial_outcome_from_json(const Json& j) {
  return guarded("trial outcome", [&] {
    TrialOutcome o;
    o.help_offered = j.at("help_offered").get<bool>();
    o.help_accepted = j.at("help_accepted").get<bool>();
    o.answer_correct = j.at("answer_correct").get<bool>();
    const auto need = j.find("self_reported_need");
    if (need == j.end() || need->is_null()) {
      throw Error(Errc::MissingGroundTruth, "trial outcome lacks self_reported_need");
    }
    o.self_reported_need = need->get<bool>();
    o.chosen_option = j.at("chosen_option").get<int>();
    o.duration_ms = j.at("duration_ms").get<TimeMs>();
    const auto load = j.find("reported_load");
    if (load != j.end() && !load->is_null()) o.reported_load = load->get<int>();
    return o;
  });
}

TrialFeatures trial_features_from_json(const Json& j) {
  return guarded("trial features", [&] {
    TrialFeatures f;
    f.ypos_flips = j.at("ypos_flips").get<std::int64_t>();
    f.hovers = j.at("hovers").get<std::int64_t>();
    f.hover_time_ms = j.at("hover_time_ms").get<TimeMs>();
    f.tonic_difference = j.at("tonic_difference").get<double>();
    f.task_difficulty = j.at("task_difficulty").get<int>();
    return f;
  });
}

TrialRecord trial_record_from_json(const Json& j) {
  return guarded("trial record", [&] {
    TrialRecord r;
    r.session_id = j.at("session_id").get<std::string>();
    r.block = j.at("block").get<int>();
    r.condition = parse_condition(j.at("condition").get<std::string>());
    r.spec = trial_spec_from_json(j.at("spec"));
    r.features = trial_features_from_json(j.at("features"));
    r.y_eda = j.at("y_eda").get<double>();
    r.y_mouse = j.at("y_mouse").get<double>();
    r.y_final = j.at("y_final").get<double>();
    r.triggered = j.at("triggered").get<bool>();
    const auto& t = j.at("t_trigger_ms");
    if (!t.is_null()) r.t_trigger_ms = t.get<TimeMs>();
    r.theta_before = j.at("theta_before").get<double>();
    r.theta_after = j.at("theta_after").get<double>();
    r.low_eda_coverage = j.at("low_eda_coverage").get<bool>();
    r.outcome = trial_outcome_from_json(j.at("outcome"));
    return r;
  });
}

model::ModelState model_state_from_json(const Json& j) {
  return guarded("model state", [&] {
    model::ModelState m;
    m.modality = model::parse_modality(j.at("modality").get<std::string>());
    m.weights = j.at("weights").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    if (m.weights.size() != model::arity(m.modality)) {
      throw Error(Errc::ArityMismatch, "model weights do not match modality arity");
    }
    return m;
  });
}

model::ModelPair model_pair_from_json(const Json& j) {
  return guarded("model pair", [&] {
    return model::ModelPair{model_state_from_json(j.at("eda")),
                            model_state_from_json(j.at("mouse"))};
  });
}

SessionConfig session_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::ConfigError, "session config must be a JSON object");
  static const std::set<std::string> known = {
      "session_id",       "theta_init",         "step_delta",        "strategy",
      "eval_period_ms",   "flip_threshold_px",  "hover_threshold_ms", "hover_tolerance_px",
      "target_scale",     "learning_rate",      "l2_lambda",         "calibration_steps",
      "preconditioned_calibration", "theta_clamp", "rng_seed",       "backup_period_ms",
      "eda_model",        "mouse_model"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(Errc::ConfigError, "unknown config field '" + key + "'");
  }
  return guarded("session config", [&] {
    SessionConfig c;
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("session_id", c.session_id);
    get("theta_init", c.theta_init);
    get("step_delta", c.step_delta);
    if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
    get("eval_period_ms", c.eval_period_ms);
    get("flip_threshold_px", c.flip_threshold_px);
    get("hover_threshold_ms", c.hover_threshold_ms);
    get("hover_tolerance_px", c.hover_tolerance_px);
    get("target_scale", c.target_scale);
    get("learning_rate", c.learning_rate);
    get("l2_lambda", c.l2_lambda);
    get("calibration_steps", c.calibration_steps);
    get("preconditioned_calibration", c.preconditioned_calibration);
    if (j.contains("theta_clamp") && !j.at("theta_clamp").is_null()) {
      const auto pair = j.at("theta_clamp").get<std::vector<double>>();
      if (pair.size() != 2) throw Error(Errc::ConfigError, "theta_clamp must be [min, max]");
      c.theta_clamp = ThetaClamp{pair[0], pair[1]};
    }
    get("rng_seed", c.rng_seed);
    get("backup_period_ms", c.backup_period_ms);
    if (j.contains("eda_model")) c.initial_models.eda = model_state_from_json(j.at("eda_model"));
    if (j.contains("mouse_model")) {
      c.initial_models.mouse = model_state_from_json(j.at("mouse_model"));
    }
    if (c.initial_models.eda.modality != model::Modality::Eda ||
        c.initial_models.mouse.modality != model::Modality::Mouse) {
      throw Error(Errc::ConfigError, "eda_model/mouse_model modality mismatch");
    }
    validate(c);
    return c;
  });
}

std::string records_to_jsonl(const std::vector<TrialRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<TrialRecord> records_from_jsonl(const std::string& text, const std::string& origin) {
  std::vector<TrialRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(trial_record_from_json(parse_json(line, origin)));
    } catch (const Error& e) {
      throw Error(Errc::ConfigError, origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace overload
