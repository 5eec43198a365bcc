#pragma once

// JSON mappings for the domain types. Field names are the snake_case
// member names.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "overload/config.hpp"
#include "overload/model.hpp"
#include "overload/types.hpp"

namespace overload {

using Json = nlohmann::json;

// Parses `text`; failures throw Error(ConfigError) naming line and column.
Json parse_json(const std::string& text, const std::string& origin);
Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

Json to_json(const TrialSpec& s);
Json to_json(const TrialOutcome& o);
Json to_json(const TrialFeatures& f);
Json to_json(const TrialRecord& r);
Json to_json(const model::ModelState& m);
Json to_json(const model::ModelPair& p);
Json to_json(const SessionConfig& c);

TrialSpec trial_spec_from_json(const Json& j);
TrialOutcome trial_outcome_from_json(const Json& j);
TrialFeatures trial_features_from_json(const Json& j);
TrialRecord trial_record_from_json(const Json& j);
model::ModelState model_state_from_json(const Json& j);
model::ModelPair model_pair_from_json(const Json& j);
SessionConfig session_config_from_json(const Json& j);

// One compact JSON object per line.
std::string records_to_jsonl(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> records_from_jsonl(const std::string& text, const std::string& origin);

}  // namespace overload
