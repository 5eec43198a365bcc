#include "overload/ingest.hpp"

#include <fstream>
#include <system_error>

#include "overload/error.hpp"
#include "overload/serialize.hpp"

namespace overload::ingest {

namespace fs = std::filesystem;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string encode(const LogEntry& entry) {
  const Json j = std::visit(
      Overloaded{
          [](const SignalSample& s) {
            return Json{{"kind", "eda"},
                        {"t_ms", s.t_ms},
                        {"value", s.value},
                        {"trial_index", s.trial_index},
                        {"global_index", s.global_index}};
          },
          [](const PointerEvent& e) {
            return Json{{"kind", "pointer"},
                        {"t_ms", e.t_ms},
                        {"x", e.x},
                        {"y", e.y},
                        {"trial_index", e.trial_index},
                        {"global_index", e.global_index}};
          },
          [](const TrialStartEntry& s) {
            return Json{{"kind", "trial_start"},
                        {"schema_version", s.schema_version},
                        {"session_id", s.session_id},
                        {"t_ms", s.t_ms},
                        {"block", s.block},
                        {"condition", condition_name(s.condition)},
                        {"spec", to_json(s.spec)}};
          },
          [](const TrialEndEntry& e) {
            return Json{{"kind", "trial_end"},
                        {"t_ms", e.t_ms},
                        {"global_index", e.global_index},
                        {"outcome", to_json(e.outcome)}};
          },
      },
      entry);
  return j.dump();
}

LogEntry decode(std::string_view line) {
  const Json j = parse_json(std::string(line), "log line");
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "eda") {
      return SignalSample{j.at("t_ms").get<TimeMs>(), j.at("value").get<double>(),
                          j.at("trial_index").get<int>(), j.at("global_index").get<int>()};
    }
    if (kind == "pointer") {
      return PointerEvent{j.at("t_ms").get<TimeMs>(), j.at("x").get<double>(),
                          j.at("y").get<double>(), j.at("trial_index").get<int>(),
                          j.at("global_index").get<int>()};
    }
    if (kind == "trial_start") {
      TrialStartEntry s;
      s.schema_version = j.at("schema_version").get<int>();
      if (s.schema_version != kSchemaVersion) {
        throw Error(Errc::SchemaMismatch, "log schema version " +
                                              std::to_string(s.schema_version) + ", expected " +
                                              std::to_string(kSchemaVersion));
      }
      s.session_id = j.at("session_id").get<std::string>();
      s.t_ms = j.at("t_ms").get<TimeMs>();
      s.block = j.at("block").get<int>();
      s.condition = parse_condition(j.at("condition").get<std::string>());
      s.spec = trial_spec_from_json(j.at("spec"));
      return s;
    }
    if (kind == "trial_end") {
      return TrialEndEntry{j.at("t_ms").get<TimeMs>(), j.at("global_index").get<int>(),
                           trial_outcome_from_json(j.at("outcome"))};
    }
    throw Error(Errc::ConfigError, "unknown log kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw Error(Errc::ConfigError, std::string("malformed log line: ") + e.what());
  }
}

std::string session_file_name(const std::string& session_id) {
  return session_id + "_session.jsonl";
}

std::string segment_file_name(const std::string& session_id, int global_index,
                              TimeMs t_start_ms) {
  return session_id + "_q" + std::to_string(global_index) + "_" + std::to_string(t_start_ms) +
         ".jsonl";
}

void FileStorage::append(const fs::path& path, std::string_view data) {
  std::error_code ec;
  const bool existed = fs::exists(path, ec);
  const std::uintmax_t before = existed ? fs::file_size(path, ec) : 0;
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (out) {
      out.write(data.data(), static_cast<std::streamsize>(data.size()));
      out.flush();
    }
    if (out) return;
  }
  if (existed) {
    fs::resize_file(path, before, ec);
  } else {
    fs::remove(path, ec);
  }
  throw Error(Errc::StorageFailure, "append to " + path.string() + " failed");
}

void FileStorage::write(const fs::path& path, std::string_view data) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) {
      out.write(data.data(), static_cast<std::streamsize>(data.size()));
      out.flush();
    }
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(Errc::StorageFailure, "write to " + path.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::StorageFailure, "rename to " + path.string() + " failed");
  }
}

BackupWriter::BackupWriter(fs::path dir, Storage& storage)
    : dir_(std::move(dir)), storage_(&storage) {}

BackupReport BackupWriter::flush(const LogSnapshot& snapshot) {
  if (snapshot.session_offset > session_lines_written_ ||
      snapshot.segment_offset > segments_written_) {
    throw Error(Errc::InvalidArgument, "log snapshot skips unpersisted entries");
  }
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(Errc::StorageFailure, "cannot create " + dir_.string());

  // Session log: append what this writer has not persisted yet.
  std::string chunk;
  const std::size_t skip = session_lines_written_ - snapshot.session_offset;
  for (std::size_t i = skip; i < snapshot.session_lines.size(); ++i) {
    chunk += snapshot.session_lines[i];
    chunk += '\n';
  }
  const fs::path session_path = dir_ / session_file_name(snapshot.session_id);
  if (!session_started_) {
    // First flush replaces any stale file from an earlier run.
    storage_->write(session_path, chunk);
    session_started_ = true;
    session_lines_written_ = snapshot.session_offset + snapshot.session_lines.size();
    session_bytes_ = chunk.size();
  } else if (!chunk.empty()) {
    storage_->append(session_path, chunk);
    session_lines_written_ = snapshot.session_offset + snapshot.session_lines.size();
    session_bytes_ += chunk.size();
  }

  for (std::size_t i = segments_written_ - snapshot.segment_offset; i < snapshot.segments.size();
       ++i) {
    const auto& seg = snapshot.segments[i];
    std::string body;
    for (const auto& line : seg.lines) {
      body += line;
      body += '\n';
    }
    const fs::path path =
        dir_ / segment_file_name(snapshot.session_id, seg.global_index, seg.t_start_ms);
    storage_->write(path, body);
    ++segments_written_;
    segment_files_.push_back({path, body.size()});
  }

  BackupReport report;
  report.files.push_back({session_path, session_bytes_});
  report.files.insert(report.files.end(), segment_files_.begin(), segment_files_.end());
  report.segment_count = segment_files_.size();
  return report;
}

bool BackupScheduler::due(TimeMs now_ms) {
  if (now_ms < next_) return false;
  while (next_ <= now_ms) next_ += period_;
  return true;
}

void IngestQueue::post(IngestMessage msg) {
  {
    std::lock_guard lock(mu_);
    pending_.push_back(std::move(msg));
  }
  cv_.notify_one();
}

std::vector<IngestMessage> IngestQueue::take_all() {
  std::lock_guard lock(mu_);
  std::vector<IngestMessage> out;
  out.swap(pending_);
  return out;
}

bool IngestQueue::wait_nonempty() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !pending_.empty() || closed_; });
  return !pending_.empty();
}

void IngestQueue::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

}  // namespace overload::ingest
