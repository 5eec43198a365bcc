#pragma once

// Re-running the detection loop over persisted session logs.
//
// Replay is open-loop: the recorded outcome of every trial (offer,
// acceptance, correctness, self-report) drives the threshold updates, and
// the replayed detection decision is reported in TrialRecord::triggered.
// With the original configuration the records are identical to the ones
// produced live.

#include <filesystem>
#include <string>
#include <vector>

#include "overload/config.hpp"
#include "overload/ingest.hpp"
#include "overload/model.hpp"
#include "overload/types.hpp"

namespace overload::replay {

struct TrialTrace {
  ingest::TrialStartEntry start;
  std::vector<ingest::IngestMessage> events;
  ingest::TrialEndEntry end;
};

struct SessionTrace {
  std::string session_id;
  std::vector<TrialTrace> trials;
};

// Session ids with a `<id>_session.jsonl` file in `dir`, sorted.
std::vector<std::string> list_sessions(const std::filesystem::path& dir);

// Reads the trial list from the session log and each trial's events from
// its segment file. Throws Error(IoError) naming a missing file and
// Error(SchemaMismatch) on a foreign schema version.
SessionTrace load_session_trace(const std::filesystem::path& dir, const std::string& session_id);

std::vector<TrialRecord> replay_session(const SessionConfig& config, const SessionTrace& trace);

// Models personalized from the trace's calibration trials.
model::ModelPair calibrate_from_trace(const SessionConfig& config, const SessionTrace& trace);

}  // namespace overload::replay
