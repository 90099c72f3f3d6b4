#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsup/criteria.hpp"
#include "fsup/time.hpp"

namespace fsup::supervisor {

struct CriterionStats {
  double sum = 0.0;
  double min = 1.0;

  bool operator==(const CriterionStats&) const = default;
};

struct SessionMetrics {
  std::size_t event_count = 0;
  std::size_t off_task_count = 0;
  std::vector<double> elapsed_seconds;  // between consecutive events
  std::array<CriterionStats, 4> criteria{};  // indexed like kCriteria
  std::map<std::string, std::size_t> interventions;  // assistance label -> count
  std::optional<Timestamp> last_event;

  double mean(Criterion c) const;
  double min(Criterion c) const;
  std::size_t intervention_count() const;

  bool operator==(const SessionMetrics&) const = default;
};

nlohmann::json to_json(const SessionMetrics& m);

/// Folds one scored event into the metrics. Throws ValidationError when `ts`
/// precedes the previous event.
SessionMetrics update_metrics(SessionMetrics m, Timestamp ts, const CriterionScores& scores,
                              double off_topic_threshold = 0.25);

/// Counts an intervention at `label`.
void record_intervention(SessionMetrics& m, const std::string& label);

}  // namespace fsup::supervisor
