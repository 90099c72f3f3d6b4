#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsup/scenario/scenario.hpp"
#include "fsup/time.hpp"

namespace fsup::scenario {

enum class AgentRole { patient, exam, diagnostic, intervention };

std::string_view role_name(AgentRole r);
/// Throws ValidationError for anything but the four role names.
AgentRole parse_role(std::string_view name);

struct StudentEvent {
  AgentRole target = AgentRole::patient;
  std::string text;
  std::optional<std::string> action;  // catalog id or alias for structured actions
  Timestamp ts{};
};

nlohmann::json to_json(const StudentEvent& e);
/// Throws ValidationError on a missing or mistyped field.
StudentEvent student_event_from_json(const nlohmann::json& j);

struct InterventionAttempt {
  std::string id;
  bool performed = false;

  bool operator==(const InterventionAttempt&) const = default;
};

struct AgentState {
  std::set<std::string> flags;
  std::vector<std::string> tests_ordered;    // first-order order, no repeats
  std::vector<std::string> exams_performed;  // first-exam order, no repeats
  std::vector<InterventionAttempt> interventions;
  std::size_t default_replies = 0;  // cycles through the scenario's default answers

  bool has_flag(std::string_view f) const { return flags.find(std::string(f)) != flags.end(); }

  bool operator==(const AgentState&) const = default;
};

nlohmann::json to_json(const AgentState& s);

struct AgentReply {
  AgentRole role = AgentRole::patient;
  std::string text;
  std::vector<std::string> flags_set;
  nlohmann::json payload = nlohmann::json::object();
  bool available = true;  // false when the request names nothing in this case
  std::string item_id;    // matched intent / site / test / intervention, empty if none
};

nlohmann::json to_json(const AgentReply& r);

/// Index into the catalog owned by a role (exams, tests or interventions).
struct ResolvedItem {
  std::size_t index = 0;
  bool by_action = false;
};

/// Finds the catalog item an exam, diagnostic or intervention event refers to.
/// A structured action matches an id or alias exactly (case-insensitive);
/// free text matches when an id or alias occurs as a token run, longest first.
/// Patient events never resolve.
std::optional<ResolvedItem> resolve_item(const ScenarioDefinition& s, const StudentEvent& e);

/// Index of the best QA intent by shared-token count (at least one); ties go
/// to the earlier intent.
std::optional<std::size_t> match_intent(const ScenarioDefinition& s, std::string_view text);

/// Prerequisite flags of an intervention that are not yet set.
std::vector<std::string> missing_prerequisites(const Intervention& iv, const AgentState& state);

/// Produces the reply and applies the owning agent's state effects. Never
/// throws for unknown requests; they get a "not available" reply.
AgentReply route(const ScenarioDefinition& s, const StudentEvent& e, AgentState& state);

}  // namespace fsup::scenario
