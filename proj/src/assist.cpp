#include "overload/assist.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "overload/error.hpp"

namespace overload::assist {

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "idle";
    case Phase::Offered: return "offered";
    case Phase::AwaitingSelection: return "awaiting_selection";
    case Phase::Explaining: return "explaining";
    case Phase::Delivered: return "delivered";
    case Phase::Declined: return "declined";
    case Phase::Ignored: return "ignored";
  }
  return "idle";
}

std::string build_prompt(std::string_view words) {
  std::string prompt = "<<SYS>>\n";
  prompt += kSystemPrompt;
  prompt += "\n<</SYS>>\nExplain the concept \"";
  prompt += words;
  prompt += "\" in English.";
  return prompt;
}

std::string serialize_request(const ExplanationRequest& req) {
  const nlohmann::json body{{"prompt", build_prompt(req.selected_text)},
                            {"max_tokens", req.max_tokens}};
  return body.dump();
}

std::string MockClient::complete(const ExplanationRequest& req) {
  prompts_.push_back(build_prompt(req.selected_text));
  if (auto it = canned_.find(req.selected_text); it != canned_.end()) return it->second;
  return "\"" + req.selected_text + "\" refers to the idea named in the question.";
}

HttpClient::HttpClient(std::string url, std::chrono::milliseconds timeout) : timeout_(timeout) {
  constexpr std::string_view scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw Error(Errc::InvalidArgument, "completion endpoint must be an http:// URL: " + url);
  }
  const auto slash = url.find('/', scheme.size());
  scheme_host_port_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

std::unique_ptr<HttpClient> HttpClient::from_env(std::chrono::milliseconds timeout) {
  const char* url = std::getenv(kUrlEnvVar);
  if (url == nullptr || *url == '\0') return nullptr;
  return std::make_unique<HttpClient>(url, timeout);
}

std::string HttpClient::complete(const ExplanationRequest& req) {
  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto res = client.Post(path_, serialize_request(req), "application/json");
  if (!res) {
    throw Error(Errc::ClientTimeout, "completion endpoint unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(Errc::ClientTimeout, "completion endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body).at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ClientTimeout, std::string("malformed completion response: ") + e.what());
  }
}

bool is_legal_transition(Phase from, Phase to) {
  switch (from) {
    case Phase::Idle: return to == Phase::Offered;
    case Phase::Offered:
      return to == Phase::AwaitingSelection || to == Phase::Declined || to == Phase::Ignored;
    case Phase::AwaitingSelection: return to == Phase::Explaining;
    case Phase::Explaining: return to == Phase::Delivered;
    case Phase::Delivered:
    case Phase::Declined:
    case Phase::Ignored: return false;
  }
  return false;
}

Intervention::Intervention(std::string question_text, TimeMs t_start_ms)
    : question_(std::move(question_text)) {
  log_.push_back({t_start_ms, Phase::Idle});
}

void Intervention::move_to(Phase next, TimeMs t_ms) {
  if (!is_legal_transition(phase_, next)) {
    throw Error(Errc::IllegalTransition, std::string(to_string(phase_)) + " -> " +
                                             std::string(to_string(next)));
  }
  phase_ = next;
  log_.push_back({t_ms, next});
}

void Intervention::offer(TimeMs t_ms) {
  if (phase_ != Phase::Idle) {
    throw Error(Errc::AlreadyOffered, "one offer per trial (state " +
                                          std::string(to_string(phase_)) + ")");
  }
  move_to(Phase::Offered, t_ms);
  offered_at_ = t_ms;
}

void Intervention::respond(Response response, TimeMs t_ms) {
  if (phase_ != Phase::Offered) {
    throw Error(Errc::IllegalTransition,
                "respond needs an open offer (state " + std::string(to_string(phase_)) + ")");
  }
  switch (response) {
    case Response::Accept:
      accepted_ = true;
      move_to(Phase::AwaitingSelection, t_ms);
      break;
    case Response::Decline: move_to(Phase::Declined, t_ms); break;
    case Response::Timeout: move_to(Phase::Ignored, t_ms); break;
  }
}

std::string Intervention::fallback_text(std::string_view selected_text) {
  return "No explanation is available for \"" + std::string(selected_text) +
         "\" right now. Please continue with the question.";
}

std::string Intervention::explain(ExplanationClient& client, std::string_view selected_text,
                                  TimeMs t_ms) {
  if (phase_ != Phase::AwaitingSelection) {
    throw Error(Errc::IllegalTransition,
                "explain needs a selection step (state " + std::string(to_string(phase_)) + ")");
  }
  if (selected_text.empty() || question_.find(selected_text) == std::string::npos) {
    throw Error(Errc::SelectionNotSubstring,
                "selection is not part of the question: '" + std::string(selected_text) + "'");
  }
  move_to(Phase::Explaining, t_ms);
  const ExplanationRequest req{std::string(selected_text), kMaxExplanationTokens};
  std::string text;
  try {
    text = client.complete(req);
  } catch (const Error& e) {
    if (e.code() != Errc::ClientTimeout) throw;
    timed_out_ = true;
    text = fallback_text(selected_text);
  }
  move_to(Phase::Delivered, t_ms);
  explanation_ = text;
  return text;
}

void Intervention::finish(TimeMs t_end_ms) {
  if (phase_ == Phase::Offered) move_to(Phase::Ignored, t_end_ms);
}

bool Intervention::help_accepted() const { return accepted_; }

}  // namespace overload::assist
