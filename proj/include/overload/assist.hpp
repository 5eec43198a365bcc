#pragma once

// Intervention lifecycle (offer -> accept/decline/ignore -> selection ->
// explanation) and the explanation clients.

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overload/types.hpp"

namespace overload::assist {

inline constexpr int kMaxExplanationTokens = 160;

inline constexpr std::string_view kSystemPrompt =
    "You are a helpful assistant who clearly explains concepts in English. "
    "Provide ONLY the context.";

enum class Phase { Idle, Offered, AwaitingSelection, Explaining, Delivered, Declined, Ignored };

std::string_view to_string(Phase p);

enum class Response { Accept, Decline, Timeout };

struct ExplanationRequest {
  std::string selected_text;
  int max_tokens = kMaxExplanationTokens;
};

// Full prompt text sent to the completion endpoint for `words`.
std::string build_prompt(std::string_view words);

// HTTP body: {"max_tokens":160,"prompt":"..."} (keys sorted, compact).
std::string serialize_request(const ExplanationRequest& req);

class ExplanationClient {
 public:
  virtual ~ExplanationClient() = default;
  // Returns the explanation text; throws Error(ClientTimeout) when the
  // backend does not answer in time.
  virtual std::string complete(const ExplanationRequest& req) = 0;
};

// Deterministic client: canned answers keyed by the exact selected text,
// otherwise a templated fallback.
class MockClient : public ExplanationClient {
 public:
  MockClient() = default;
  explicit MockClient(std::map<std::string, std::string> canned) : canned_(std::move(canned)) {}

  std::string complete(const ExplanationRequest& req) override;
  const std::vector<std::string>& prompts() const { return prompts_; }

 private:
  std::map<std::string, std::string> canned_;
  std::vector<std::string> prompts_;
};

// POSTs serialize_request() to a completion endpoint and reads
// {"text": "..."} back.
class HttpClient : public ExplanationClient {
 public:
  static constexpr std::chrono::milliseconds kDefaultTimeout{10'000};
  static constexpr const char* kUrlEnvVar = "OVERLOAD_LLM_URL";

  explicit HttpClient(std::string url, std::chrono::milliseconds timeout = kDefaultTimeout);
  // Reads the endpoint from OVERLOAD_LLM_URL; nullptr when unset.
  static std::unique_ptr<HttpClient> from_env(std::chrono::milliseconds timeout = kDefaultTimeout);

  std::string complete(const ExplanationRequest& req) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

struct Transition {
  TimeMs t_ms = 0;
  Phase phase = Phase::Idle;
};

// One trial's intervention. At most one offer per trial; Declined, Ignored
// and Delivered are terminal.
class Intervention {
 public:
  explicit Intervention(std::string question_text, TimeMs t_start_ms = 0);

  Phase phase() const { return phase_; }
  std::optional<TimeMs> offered_at() const { return offered_at_; }
  const std::vector<Transition>& log() const { return log_; }

  void offer(TimeMs t_ms);
  void respond(Response response, TimeMs t_ms);
  // Validates the selection, moves through Explaining and returns the
  // delivered text. A client timeout still delivers a fallback message.
  std::string explain(ExplanationClient& client, std::string_view selected_text, TimeMs t_ms);
  // Closes an unanswered offer as Ignored at trial end.
  void finish(TimeMs t_end_ms);

  bool help_offered() const { return offered_at_.has_value(); }
  bool help_accepted() const;
  bool delivered() const { return phase_ == Phase::Delivered; }
  bool timed_out() const { return timed_out_; }
  const std::optional<std::string>& explanation() const { return explanation_; }

  static std::string fallback_text(std::string_view selected_text);

 private:
  void move_to(Phase next, TimeMs t_ms);

  std::string question_;
  Phase phase_ = Phase::Idle;
  std::optional<TimeMs> offered_at_;
  std::optional<std::string> explanation_;
  bool accepted_ = false;
  bool timed_out_ = false;
  std::vector<Transition> log_;
};

// True when `from -> to` is one of the enumerated lifecycle transitions.
bool is_legal_transition(Phase from, Phase to);

}  // namespace overload::assist
