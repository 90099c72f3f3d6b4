#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsup/fuzzy/inference.hpp"
#include "fsup/store/store.hpp"
#include "fsup/supervisor/metrics.hpp"

namespace fsup::supervisor {

struct SupervisorDecision {
  fuzzy::AssistanceDecision assistance;
  Criterion deficient = Criterion::ethical_behavior;
  std::optional<std::string> band;  // set when intervening
  std::optional<std::string> hint;
  bool hint_suppressed = false;  // intervening but inside the hint cool-down
  Timestamp ts{};

  bool operator==(const SupervisorDecision&) const = default;
};

nlohmann::json to_json(const CriterionScores& s);
CriterionScores scores_from_json(const nlohmann::json& j);

/// Decision entry payload. Includes the metrics snapshot after the event.
nlohmann::json to_json(const SupervisorDecision& d, const SessionMetrics& metrics);
/// Throws ValidationError on a malformed payload. Inputs are not part of the
/// payload; pass the event's scores.
SupervisorDecision decision_from_json(const nlohmann::json& j, const CriterionScores& inputs, Timestamp ts);

struct TimelineItem {
  std::uint64_t seq = 0;  // of the decision entry
  Timestamp ts{};
  std::string target;
  std::string label;
  double crisp = 0.0;
  bool intervene = false;
  std::optional<std::string> hint;

  bool operator==(const TimelineItem&) const = default;
};

struct FinalReport {
  std::string session_id;
  std::string scenario_id;
  SessionMetrics metrics;
  std::vector<TimelineItem> timeline;
  std::map<std::string, std::map<std::string, std::size_t>> criterion_labels;  // criterion key -> label -> count
  std::map<std::string, std::size_t> assistance_labels;
  std::vector<std::string> narrative;

  bool operator==(const FinalReport&) const = default;
};

nlohmann::json to_json(const FinalReport& r);

/// Builds the report from a session log alone. Throws ValidationError when
/// the log holds no complete event or is inconsistent.
FinalReport build_report(const std::string& session_id, const std::string& scenario_id,
                         const std::vector<store::LogEntry>& log, const fuzzy::VariableRegistry& registry,
                         double off_topic_threshold = 0.25);

}  // namespace fsup::supervisor
