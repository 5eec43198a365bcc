#include "overload/replay.hpp"

#include <algorithm>
#include <sstream>

#include "overload/error.hpp"
#include "overload/serialize.hpp"
#include "overload/session.hpp"
#include "overload/sim.hpp"

namespace overload::replay {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSessionSuffix = "_session.jsonl";

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string read_required(const fs::path& path) {
  if (!fs::exists(path)) throw Error(Errc::IoError, "missing file " + path.string());
  return read_text_file(path);
}

}  // namespace

std::vector<std::string> list_sessions(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(Errc::IoError, "not a directory: " + dir.string());
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > kSessionSuffix.size() && name.ends_with(kSessionSuffix)) {
      ids.push_back(name.substr(0, name.size() - kSessionSuffix.size()));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

SessionTrace load_session_trace(const fs::path& dir, const std::string& session_id) {
  SessionTrace trace;
  trace.session_id = session_id;

  // The session log defines which trials exist and in which order.
  std::vector<ingest::TrialStartEntry> starts;
  for (const auto& line : lines_of(read_required(dir / ingest::session_file_name(session_id)))) {
    auto entry = ingest::decode(line);
    if (auto* s = std::get_if<ingest::TrialStartEntry>(&entry)) starts.push_back(std::move(*s));
  }

  for (const auto& start : starts) {
    const fs::path seg =
        dir / ingest::segment_file_name(session_id, start.spec.global_index, start.t_ms);
    TrialTrace t;
    bool have_start = false;
    bool have_end = false;
    for (const auto& line : lines_of(read_required(seg))) {
      auto entry = ingest::decode(line);
      if (auto* s = std::get_if<ingest::TrialStartEntry>(&entry)) {
        t.start = std::move(*s);
        have_start = true;
      } else if (auto* e = std::get_if<ingest::TrialEndEntry>(&entry)) {
        t.end = *e;
        have_end = true;
      } else if (auto* sample = std::get_if<SignalSample>(&entry)) {
        t.events.emplace_back(*sample);
      } else {
        t.events.emplace_back(std::get<PointerEvent>(entry));
      }
    }
    if (!have_start || !have_end) {
      throw Error(Errc::ConfigError, seg.string() + ": segment lacks trial_start or trial_end");
    }
    trace.trials.push_back(std::move(t));
  }
  return trace;
}

namespace {

template <typename OnCalibrated>
std::vector<TrialRecord> run(const SessionConfig& config, const SessionTrace& trace,
                             OnCalibrated&& on_calibrated) {
  SessionConfig cfg = config;
  cfg.session_id = trace.session_id;
  Session session(cfg, false);

  std::optional<int> current_block;
  model::ModelPair calibrated = cfg.initial_models;
  std::vector<TrialRecord> calibration_records;
  bool calibrated_ready = false;

  for (const auto& t : trace.trials) {
    if (current_block != t.start.block) {
      if (!calibration_records.empty() && !calibrated_ready) {
        calibrated = sim::calibrate_models(cfg, calibration_records);
        calibrated_ready = true;
        on_calibrated(calibrated);
      }
      const bool calibration = !t.start.condition.has_value();
      session.start_block(t.start.block, t.start.condition,
                          calibration ? cfg.initial_models : calibrated);
      current_block = t.start.block;
    }
    TrialSpec spec = t.start.spec;
    session.begin_trial(spec, t.start.t_ms);
    sim::drive_trial(session, t.events, t.end.t_ms, nullptr);
    const auto rec = session.end_trial(t.end.outcome);
    if (!rec.condition) calibration_records.push_back(rec);
  }
  if (!calibration_records.empty() && !calibrated_ready) {
    calibrated = sim::calibrate_models(cfg, calibration_records);
    on_calibrated(calibrated);
  }
  return session.records();
}

}  // namespace

std::vector<TrialRecord> replay_session(const SessionConfig& config, const SessionTrace& trace) {
  return run(config, trace, [](const model::ModelPair&) {});
}

model::ModelPair calibrate_from_trace(const SessionConfig& config, const SessionTrace& trace) {
  std::optional<model::ModelPair> out;
  run(config, trace, [&](const model::ModelPair& m) { out = m; });
  if (!out) throw Error(Errc::EmptyCalibrationSet, "trace has no calibration trials");
  return *out;
}

}  // namespace overload::replay
