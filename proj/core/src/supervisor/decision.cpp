#include "fsup/supervisor/decision.hpp"

#include <algorithm>
#include <cstdio>

#include "fsup/error.hpp"

namespace fsup::supervisor {

using nlohmann::json;

json to_json(const CriterionScores& s) {
  json j = json::object();
  for (auto c : kCriteria) j[std::string(criterion_key(c))] = s.get(c);
  j["provenance"] = provenance_name(s.provenance);
  return j;
}

CriterionScores scores_from_json(const json& j) {
  try {
    CriterionScores s;
    for (auto c : kCriteria) s.set(c, j.at(std::string(criterion_key(c))).get<double>());
    const auto p = j.value("provenance", std::string("heuristic"));
    if (p != "heuristic" && p != "external") throw ValidationError("unknown provenance '" + p + "'");
    s.provenance = p == "external" ? Provenance::external : Provenance::heuristic;
    check_scores(s);
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed scores: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(std::string("malformed scores: ") + e.what());
  }
}

namespace {

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> read_optional_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::size_t argmax_label(const fuzzy::LinguisticVariable& var, double x) {
  const auto degrees = fuzzy::fuzzify(var, x);
  std::size_t best = 0;
  for (std::size_t i = 1; i < degrees.size(); ++i) {
    if (degrees[i] > degrees[best]) best = i;
  }
  return best;
}

}  // namespace

json to_json(const SupervisorDecision& d, const SessionMetrics& metrics) {
  json fired = json::array();
  for (const auto& a : d.assistance.fired) fired.push_back({{"rule", a.rule_id}, {"strength", a.strength}});
  return {{"crisp", d.assistance.crisp},
          {"label", d.assistance.label},
          {"label_index", d.assistance.label_index},
          {"intervene", d.assistance.intervene},
          {"fallback", d.assistance.fallback},
          {"fired", fired},
          {"deficient", criterion_key(d.deficient)},
          {"band", optional_string(d.band)},
          {"hint", optional_string(d.hint)},
          {"hint_suppressed", d.hint_suppressed},
          {"metrics", to_json(metrics)}};
}

SupervisorDecision decision_from_json(const json& j, const CriterionScores& inputs, Timestamp ts) {
  try {
    SupervisorDecision d;
    d.assistance.crisp = j.at("crisp").get<double>();
    d.assistance.label = j.at("label").get<std::string>();
    d.assistance.label_index = j.at("label_index").get<std::size_t>();
    d.assistance.intervene = j.at("intervene").get<bool>();
    d.assistance.fallback = j.at("fallback").get<bool>();
    for (const auto& a : j.at("fired")) {
      d.assistance.fired.push_back({a.at("rule").get<int>(), a.at("strength").get<double>()});
    }
    d.assistance.inputs = inputs;
    const auto deficient = criterion_from_key(j.at("deficient").get<std::string>());
    if (!deficient) throw ValidationError("unknown deficient criterion");
    d.deficient = *deficient;
    d.band = read_optional_string(j, "band");
    d.hint = read_optional_string(j, "hint");
    d.hint_suppressed = j.value("hint_suppressed", false);
    d.ts = ts;
    return d;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed decision: ") + e.what());
  }
}

json to_json(const FinalReport& r) {
  json timeline = json::array();
  for (const auto& t : r.timeline) {
    timeline.push_back({{"seq", t.seq},
                        {"ts", format_timestamp(t.ts)},
                        {"target", t.target},
                        {"label", t.label},
                        {"crisp", t.crisp},
                        {"intervene", t.intervene},
                        {"hint", optional_string(t.hint)}});
  }
  return {{"session_id", r.session_id},
          {"scenario_id", r.scenario_id},
          {"metrics", to_json(r.metrics)},
          {"timeline", timeline},
          {"criterion_labels", r.criterion_labels},
          {"assistance_labels", r.assistance_labels},
          {"narrative", r.narrative}};
}

FinalReport build_report(const std::string& session_id, const std::string& scenario_id,
                         const std::vector<store::LogEntry>& log, const fuzzy::VariableRegistry& registry,
                         double off_topic_threshold) {
  FinalReport r;
  r.session_id = session_id;
  r.scenario_id = scenario_id;

  std::optional<store::LogEntry> event;
  std::optional<CriterionScores> scores;
  for (const auto& e : log) {
    switch (e.kind) {
      case store::EntryKind::student_event:
        event = e;
        scores.reset();
        break;
      case store::EntryKind::scores:
        if (!event) throw ValidationError("scores entry " + std::to_string(e.seq) + " without a student event");
        scores = scores_from_json(e.payload);
        break;
      case store::EntryKind::decision: {
        if (!event || !scores) {
          throw ValidationError("decision entry " + std::to_string(e.seq) + " without an event and scores");
        }
        const auto d = decision_from_json(e.payload, *scores, event->ts);
        r.metrics = update_metrics(r.metrics, event->ts, *scores, off_topic_threshold);
        if (d.assistance.intervene) record_intervention(r.metrics, d.assistance.label);
        r.timeline.push_back({e.seq, event->ts, event->payload.value("target", std::string()), d.assistance.label,
                              d.assistance.crisp, d.assistance.intervene, d.hint});
        ++r.assistance_labels[d.assistance.label];
        for (auto c : kCriteria) {
          const auto* var = registry.find(criterion_variable(c));
          if (!var) throw ConfigError("registry lacks " + std::string(criterion_variable(c)));
          ++r.criterion_labels[std::string(criterion_key(c))][var->label(argmax_label(*var, scores->get(c))).name];
        }
        event.reset();
        scores.reset();
        break;
      }
      case store::EntryKind::agent_reply:
      case store::EntryKind::report:
        break;
    }
  }
  if (r.timeline.empty()) throw ValidationError("session '" + session_id + "' has no events");

  const auto& m = r.metrics;
  double span = 0.0;
  for (double s : m.elapsed_seconds) span += s;
  r.narrative.push_back(std::to_string(m.event_count) + " events over " + fixed2(span) + " s, " +
                        std::to_string(m.intervention_count()) + " with assistance at High or above.");
  if (m.intervention_count() > 0) {
    std::string line = "Interventions by level:";
    const auto& out = registry.output();
    bool first = true;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto it = m.interventions.find(out.label(i).name);
      if (it == m.interventions.end()) continue;
      line += std::string(first ? " " : ", ") + out.label(i).display + " " + std::to_string(it->second);
      first = false;
    }
    r.narrative.push_back(line + ".");
  }
  Criterion weakest = kCriteria.front();
  for (auto c : kCriteria) {
    if (m.mean(c) < m.mean(weakest)) weakest = c;
  }
  r.narrative.push_back("Weakest criterion: " + std::string(criterion_display(weakest)) + " (mean " +
                        fixed2(m.mean(weakest)) + ", lowest " + fixed2(m.min(weakest)) + ").");
  r.narrative.push_back("Off-task events: " + std::to_string(m.off_task_count) + ".");
  return r;
}

}  // namespace fsup::supervisor
