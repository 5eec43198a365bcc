#pragma once

// Session-level and trial-level persistence of the raw streams.
//
// Session log:   <session_id>_session.jsonl
// Trial segment: <session_id>_q<global_index>_<t_start_ms>.jsonl
//
// Every line is one JSON object with a "kind" field in
// {"eda", "pointer", "trial_start", "trial_end"}. A trial segment holds the
// trial_start line, the in-trial samples and events, and the trial_end line.

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "overload/types.hpp"

namespace overload::ingest {

inline constexpr int kSchemaVersion = 1;

struct TrialStartEntry {
  int schema_version = kSchemaVersion;
  std::string session_id;
  TimeMs t_ms = 0;
  int block = 0;
  Condition condition;
  TrialSpec spec;
};

struct TrialEndEntry {
  TimeMs t_ms = 0;
  int global_index = 0;
  TrialOutcome outcome;
};

using LogEntry = std::variant<SignalSample, PointerEvent, TrialStartEntry, TrialEndEntry>;

std::string encode(const LogEntry& entry);
// Throws Error(SchemaMismatch) on a trial_start with another schema
// version and Error(ConfigError) on malformed lines.
LogEntry decode(std::string_view line);

std::string session_file_name(const std::string& session_id);
std::string segment_file_name(const std::string& session_id, int global_index, TimeMs t_start_ms);

struct Segment {
  int global_index = 0;
  TimeMs t_start_ms = 0;
  std::vector<std::string> lines;
};

// Copy of the not-yet-persisted part of a session's log.
struct LogSnapshot {
  std::string session_id;
  std::size_t session_offset = 0;  // index of session_lines[0] in the full log
  std::vector<std::string> session_lines;
  std::size_t segment_offset = 0;
  std::vector<Segment> segments;
};

class Storage {
 public:
  virtual ~Storage() = default;
  // Appends atomically: on failure the file is left as it was.
  virtual void append(const std::filesystem::path& path, std::string_view data) = 0;
  // Replaces the file content atomically.
  virtual void write(const std::filesystem::path& path, std::string_view data) = 0;
};

class FileStorage : public Storage {
 public:
  void append(const std::filesystem::path& path, std::string_view data) override;
  void write(const std::filesystem::path& path, std::string_view data) override;
};

struct PersistedFile {
  std::filesystem::path path;
  std::uintmax_t bytes = 0;
};

struct BackupReport {
  std::vector<PersistedFile> files;  // session file first, then segments
  std::size_t segment_count = 0;
};

// Writes session logs incrementally. Content already persisted is never
// rewritten; a failed flush leaves the writer's progress unchanged so the
// next flush writes the same bytes.
class BackupWriter {
 public:
  BackupWriter(std::filesystem::path dir, Storage& storage);

  std::size_t session_lines_written() const { return session_lines_written_; }
  std::size_t segments_written() const { return segments_written_; }

  BackupReport flush(const LogSnapshot& snapshot);

 private:
  std::filesystem::path dir_;
  Storage* storage_;
  bool session_started_ = false;
  std::size_t session_lines_written_ = 0;
  std::uintmax_t session_bytes_ = 0;
  std::size_t segments_written_ = 0;
  std::vector<PersistedFile> segment_files_;
};

// Fires every `period_ms` of (virtual or wall) session time.
class BackupScheduler {
 public:
  explicit BackupScheduler(TimeMs period_ms, TimeMs start_ms = 0)
      : period_(period_ms), next_(start_ms + period_ms) {}

  bool due(TimeMs now_ms);

 private:
  TimeMs period_;
  TimeMs next_;
};

using IngestMessage = std::variant<SignalSample, PointerEvent>;

// Multi-producer queue that hands messages to the single session writer in
// arrival order.
class IngestQueue {
 public:
  void post(IngestMessage msg);
  std::vector<IngestMessage> take_all();
  // Blocks until a message arrives or close() was called.
  bool wait_nonempty();
  void close();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<IngestMessage> pending_;
  bool closed_ = false;
};

}  // namespace overload::ingest
