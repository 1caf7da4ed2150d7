#pragma once

#include <string>

#include <json.hpp>

#include "pm/errors.hpp"
#include "pm/models.hpp"
#include "pm/schedule.hpp"

namespace pm {

/// Raised when a parsed scenario fails validation; carries the issue list.
class ScenarioValidationError : public InputError {
public:
  explicit ScenarioValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

private:
  std::vector<ValidationIssue> issues_;
};

/// Parses a scenario document. Scalars may stand in for 1x1 matrices. With
/// strict=true unknown keys are rejected; otherwise collected as warnings.
/// Throws ParseError on malformed JSON and ScenarioValidationError on
/// validation failure.
Scenario scenario_from_json(const nlohmann::json& j, bool strict = true,
                            std::vector<std::string>* warnings = nullptr);

Scenario load_scenario(const std::string& path, bool strict = true,
                       std::vector<std::string>* warnings = nullptr);

/// Canonical emission: object keys sorted, 1x1 matrices as bare numbers.
nlohmann::json scenario_to_json(const Scenario& s);

/// Schedule files: {"visits": [...], "dwell": [...]}.
AgentSchedule schedule_from_json(const nlohmann::json& j);
AgentSchedule load_schedule(const std::string& path);
nlohmann::json schedule_to_json(const AgentSchedule& s);

/// FNV-1a content hash of the canonical serialization; stable across
/// re-serialization of semantically identical scenarios.
std::string canonical_digest(const nlohmann::json& j);

}  // namespace pm
