#include "fsup/supervisor/metrics.hpp"

#include <algorithm>

#include "fsup/error.hpp"

namespace fsup::supervisor {

namespace {

std::size_t slot(Criterion c) { return static_cast<std::size_t>(c); }

}  // namespace

double SessionMetrics::mean(Criterion c) const {
  return event_count == 0 ? 1.0 : criteria[slot(c)].sum / static_cast<double>(event_count);
}

double SessionMetrics::min(Criterion c) const { return criteria[slot(c)].min; }

std::size_t SessionMetrics::intervention_count() const {
  std::size_t n = 0;
  for (const auto& [_, count] : interventions) n += count;
  return n;
}

nlohmann::json to_json(const SessionMetrics& m) {
  nlohmann::json criteria = nlohmann::json::object();
  for (auto c : kCriteria) {
    criteria[std::string(criterion_key(c))] = {{"mean", m.mean(c)}, {"min", m.min(c)}};
  }
  return {{"event_count", m.event_count},
          {"off_task_count", m.off_task_count},
          {"elapsed_seconds", m.elapsed_seconds},
          {"criteria", criteria},
          {"interventions", m.interventions},
          {"intervention_count", m.intervention_count()}};
}

SessionMetrics update_metrics(SessionMetrics m, Timestamp ts, const CriterionScores& scores,
                              double off_topic_threshold) {
  check_scores(scores);
  if (m.last_event) {
    if (ts < *m.last_event) {
      throw ValidationError("event timestamp " + format_timestamp(ts) + " precedes the previous event at " +
                            format_timestamp(*m.last_event));
    }
    m.elapsed_seconds.push_back(seconds_between(*m.last_event, ts));
  }
  m.last_event = ts;
  ++m.event_count;
  if (scores.medical_relevance < off_topic_threshold) ++m.off_task_count;
  for (auto c : kCriteria) {
    auto& st = m.criteria[slot(c)];
    st.sum += scores.get(c);
    st.min = std::min(st.min, scores.get(c));
  }
  return m;
}

void record_intervention(SessionMetrics& m, const std::string& label) { ++m.interventions[label]; }

}  // namespace fsup::supervisor
