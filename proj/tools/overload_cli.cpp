// overload: simulate, replay, calibrate and report on adaptive-assistance
// sessions.
//
// Exit codes: 0 success, 2 config/schema parse error, 3 I/O error,
// 4 log schema-version mismatch.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "overload/config.hpp"
#include "overload/error.hpp"
#include "overload/eval.hpp"
#include "overload/replay.hpp"
#include "overload/report.hpp"
#include "overload/serialize.hpp"
#include "overload/sim.hpp"

namespace fs = std::filesystem;
using namespace overload;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitIo = 3;
constexpr int kExitSchema = 4;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::InvalidPlan:
    case Errc::ArityMismatch:
    case Errc::MissingGroundTruth:
      return kExitParse;
    case Errc::IoError:
    case Errc::StorageFailure:
      return kExitIo;
    case Errc::SchemaMismatch:
      return kExitSchema;
    default:
      return kExitFailure;
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string());
}

std::string fmt_rate(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

struct SimulateArgs {
  std::string config;
  std::string profile;
  int sessions = 1;
  std::string out;
  int jobs = 1;
  bool traces = true;
};

int simulate(const SimulateArgs& a) {
  const SessionConfig base = load_session_config(a.config);
  const sim::RespondentProfile profile = sim::load_profile(a.profile);
  if (a.sessions < 1) throw Error(Errc::ConfigError, "--sessions must be >= 1");
  const fs::path out = a.out;
  ensure_dir(out);
  const fs::path trace_dir = out / "traces";
  if (a.traces) ensure_dir(trace_dir);

  const auto reports =
      sim::run_batch(base, profile, a.sessions, a.jobs,
                     a.traces ? std::optional<fs::path>(trace_dir) : std::nullopt);

  std::string all_records;
  for (const auto& rep : reports) {
    write_file(out / (rep.session_id + "_report.json"), sim::to_json_string(rep) + "\n");
    const std::string records = records_to_jsonl(rep.all_records());
    write_file(out / (rep.session_id + "_records.jsonl"), records);
    all_records += records;
  }
  write_file(out / "records.jsonl", all_records);
  const auto summary = sim::summarize(reports);
  write_file(out / "summary.json", sim::to_json_string(summary) + "\n");

  std::printf("sessions %d\n", summary.sessions);
  std::printf("baseline_accuracy %.4f\n", summary.baseline_accuracy);
  std::printf("%-11s %8s %8s %10s %8s\n", "condition", "fnr", "accept", "accuracy", "offers");
  for (const auto& s : summary.strategies) {
    std::printf("%-11s %8s %8s %10.4f %8.2f\n", s.condition.c_str(), fmt_rate(s.mean_fnr).c_str(),
                fmt_rate(s.mean_acceptance).c_str(), s.mean_accuracy, s.mean_offers);
  }
  return kExitOk;
}

int replay_cmd(const std::string& trace_dir, const std::string& config_path, const std::string& out_dir) {
  const SessionConfig cfg = load_session_config(config_path);
  const auto ids = replay::list_sessions(trace_dir);
  ensure_dir(out_dir);
  std::printf("%-24s %6s %9s\n", "session", "trials", "triggers");
  for (const auto& id : ids) {
    const auto trace = replay::load_session_trace(trace_dir, id);
    const auto records = replay::replay_session(sim::config_for_session(cfg, id), trace);
    write_file(fs::path(out_dir) / (id + "_records.jsonl"), records_to_jsonl(records));
    const auto triggers = std::count_if(records.begin(), records.end(),
                                        [](const TrialRecord& r) { return r.triggered; });
    std::printf("%-24s %6zu %9ld\n", id.c_str(), records.size(), static_cast<long>(triggers));
  }
  return kExitOk;
}

int calibrate_cmd(const std::string& trace_dir, const std::string& config_path, const std::string& out_path) {
  const SessionConfig cfg = load_session_config(config_path);
  Json out = Json::object();
  for (const auto& id : replay::list_sessions(trace_dir)) {
    out[id] = to_json(replay::calibrate_from_trace(sim::config_for_session(cfg, id),
                                                   replay::load_session_trace(trace_dir, id)));
  }
  write_file(out_path, out.dump(2) + "\n");
  std::printf("calibrated %zu session(s) -> %s\n", out.size(), out_path.c_str());
  return kExitOk;
}

int report_cmd(const std::string& records_path, const std::string& format) {
  const auto records = records_from_jsonl(read_text_file(records_path), records_path);
  const auto rows = eval::build_report(records);
  if (format == "json") {
    std::cout << eval::render_json(rows);
  } else if (format == "csv") {
    std::cout << eval::render_csv(rows);
  } else {
    std::cout << eval::render_text(rows);
  }
  return kExitOk;
}

int score_cmd(const std::string& records_path) {
  const auto all = records_from_jsonl(read_text_file(records_path), records_path);
  std::vector<TrialRecord> rows;
  std::vector<double> target;
  for (const auto& r : all) {
    if (!r.outcome.reported_load) continue;
    rows.push_back(r);
    target.push_back(*r.outcome.reported_load);
  }
  if (rows.size() < 3) {
    throw Error(Errc::InsufficientData, "need at least 3 records with a reported load");
  }
  const auto cols = eval::feature_columns(rows);
  const auto& names = eval::feature_names();
  std::vector<std::vector<double>> usable;
  std::vector<std::string> usable_names;
  std::vector<std::string> constant;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const bool is_constant = std::all_of(cols[k].begin(), cols[k].end(),
                                         [&](double v) { return v == cols[k].front(); });
    if (is_constant) {
      constant.push_back(names[k]);
    } else {
      usable.push_back(cols[k]);
      usable_names.push_back(names[k]);
    }
  }
  std::printf("n %zu\n", rows.size());
  std::printf("%-4s %-18s %12s %12s\n", "rank", "feature", "f_statistic", "p_value");
  if (!usable.empty()) {
    const auto scores = eval::score_features(usable, target);
    for (std::size_t i = 0; i < scores.rank.size(); ++i) {
      const auto k = scores.rank[i];
      std::printf("%-4zu %-18s %12.4f %12.4g\n", i + 1, usable_names[k].c_str(),
                  scores.scores[k].f_statistic, scores.scores[k].p_value);
    }
  }
  for (const auto& name : constant) std::printf("%-4s %-18s %12s %12s\n", "-", name.c_str(), "constant", "-");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive cognitive-overload assistance: simulation, replay and reporting"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run seeded simulated sessions");
  simulate_cmd->add_option("--config", sim_args.config, "Session config JSON")->required();
  simulate_cmd->add_option("--profile", sim_args.profile, "Respondent profile JSON")->required();
  simulate_cmd->add_option("--sessions", sim_args.sessions, "Number of sessions")->default_val(1);
  simulate_cmd->add_option("--out", sim_args.out, "Output directory")->required();
  simulate_cmd->add_option("--jobs", sim_args.jobs, "Parallel workers")->default_val(1);
  simulate_cmd->add_flag("!--no-traces", sim_args.traces, "Do not persist session logs");

  std::string trace_dir;
  std::string config_path;
  std::string out_path;
  auto* replay_sub = app.add_subcommand("replay", "Re-run detection over persisted session logs");
  replay_sub->add_option("--traces", trace_dir, "Directory with session logs")->required();
  replay_sub->add_option("--config", config_path, "Session config JSON")->required();
  replay_sub->add_option("--out", out_path, "Output directory")->required();

  auto* calibrate_sub = app.add_subcommand("calibrate", "Personalize models from calibration trials");
  calibrate_sub->add_option("--traces", trace_dir, "Directory with session logs")->required();
  calibrate_sub->add_option("--config", config_path, "Session config JSON")->required();
  calibrate_sub->add_option("--out", out_path, "Output model JSON")->required();

  std::string records_path;
  std::string format = "text";
  auto* report_sub = app.add_subcommand("report", "Print detection metrics per strategy");
  report_sub->add_option("--records", records_path, "TrialRecord JSON-lines file")->required();
  report_sub->add_option("--format", format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->default_val("text");

  auto* score_sub = app.add_subcommand("score-features", "F-regression scores against self-reported load");
  score_sub->add_option("--records", records_path, "TrialRecord JSON-lines file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*simulate_cmd) return simulate(sim_args);
    if (*replay_sub) return replay_cmd(trace_dir, config_path, out_path);
    if (*calibrate_sub) return calibrate_cmd(trace_dir, config_path, out_path);
    if (*report_sub) return report_cmd(records_path, format);
    if (*score_sub) return score_cmd(records_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
