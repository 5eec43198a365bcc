#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "overload/error.hpp"
#include "overload/replay.hpp"
#include "overload/serialize.hpp"
#include "overload/sim.hpp"

using namespace overload;
namespace fs = std::filesystem;

namespace {

struct Simulated {
  fs::path dir;
  SessionConfig cfg;
  sim::SessionReport report;

  Simulated(const std::string& tag, std::uint64_t seed) {
    dir = fs::temp_directory_path() / ("overload_replay_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    cfg.session_id = "rp";
    cfg.rng_seed = seed;
    sim::RespondentProfile p;
    p.rng_seed = seed + 1;
    sim::Rng rng(seed + 2);
    const auto plan = sim::default_plan(rng);
    sim::SimOptions o;
    o.persist_dir = dir;
    report = sim::run_session(cfg, p, plan, o);
  }
  ~Simulated() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
};

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

TEST_CASE("replay of a simulated session reproduces its records") {
  Simulated s("same", 41);
  CHECK(replay::list_sessions(s.dir) == std::vector<std::string>{"rp"});
  const auto trace = replay::load_session_trace(s.dir, "rp");
  CHECK(trace.trials.size() == 80);
  const auto records = replay::replay_session(s.cfg, trace);
  CHECK(records_to_jsonl(records) == records_to_jsonl(s.report.all_records()));
  CHECK(replay::calibrate_from_trace(s.cfg, trace) == s.report.calibrated_models);
}

TEST_CASE("a higher initial threshold never adds triggers") {
  Simulated s("mono", 43);
  const auto trace = replay::load_session_trace(s.dir, "rp");
  const auto base = replay::replay_session(s.cfg, trace);
  for (double bump : {0.5, 2.0, 6.0}) {
    auto cfg = s.cfg;
    cfg.theta_init += bump;
    const auto higher = replay::replay_session(cfg, trace);
    REQUIRE(higher.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) CHECK((!higher[i].triggered || base[i].triggered));
  }
}

TEST_CASE("missing segment is an I/O error naming the file") {
  Simulated s("missing", 45);
  fs::path victim;
  for (const auto& e : fs::directory_iterator(s.dir)) {
    if (e.path().filename().string().rfind("rp_q5_", 0) == 0) victim = e.path();
  }
  REQUIRE_FALSE(victim.empty());
  fs::remove(victim);
  const auto e = error_of([&] { replay::load_session_trace(s.dir, "rp"); });
  CHECK(e.code() == Errc::IoError);
  CHECK(std::string(e.what()).find(victim.filename().string()) != std::string::npos);
}

TEST_CASE("foreign schema version in a log") {
  Simulated s("schema", 47);
  const fs::path log = s.dir / ingest::session_file_name("rp");
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  in.close();
  std::string text = ss.str();
  const auto pos = text.find("\"schema_version\":1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 18, "\"schema_version\":9");
  std::ofstream(log, std::ios::trunc) << text;
  CHECK(error_of([&] { replay::load_session_trace(s.dir, "rp"); }).code() == Errc::SchemaMismatch);
}

TEST_CASE("missing trace directory") {
  CHECK(error_of([] { replay::list_sessions("/nonexistent/overload"); }).code() == Errc::IoError);
}
