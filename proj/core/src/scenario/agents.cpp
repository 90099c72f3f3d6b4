#include "fsup/scenario/agents.hpp"

#include <algorithm>
#include <cctype>

#include "fsup/error.hpp"
#include "fsup/text.hpp"

namespace fsup::scenario {

using nlohmann::json;

std::string_view role_name(AgentRole r) {
  switch (r) {
    case AgentRole::patient: return "patient";
    case AgentRole::exam: return "exam";
    case AgentRole::diagnostic: return "diagnostic";
    case AgentRole::intervention: return "intervention";
  }
  return "patient";
}

AgentRole parse_role(std::string_view name) {
  for (auto r : {AgentRole::patient, AgentRole::exam, AgentRole::diagnostic, AgentRole::intervention}) {
    if (role_name(r) == name) return r;
  }
  throw ValidationError("unknown agent role '" + std::string(name) + "'");
}

json to_json(const StudentEvent& e) {
  json j{{"target", role_name(e.target)}, {"text", e.text}, {"ts", format_timestamp(e.ts)}};
  if (e.action) j["action"] = *e.action;
  return j;
}

StudentEvent student_event_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("event must be a JSON object");
  StudentEvent e;
  const auto target = j.find("target");
  if (target == j.end() || !target->is_string()) throw ValidationError("event.target must be a string");
  e.target = parse_role(target->get<std::string>());
  if (const auto t = j.find("text"); t != j.end() && !t->is_null()) {
    if (!t->is_string()) throw ValidationError("event.text must be a string");
    e.text = t->get<std::string>();
  }
  if (const auto a = j.find("action"); a != j.end() && !a->is_null()) {
    if (!a->is_string()) throw ValidationError("event.action must be a string");
    e.action = a->get<std::string>();
  }
  const auto ts = j.find("ts");
  if (ts == j.end() || !ts->is_string()) throw ValidationError("event.ts must be an ISO-8601 string");
  e.ts = parse_timestamp(ts->get<std::string>());
  return e;
}

json to_json(const AgentState& s) {
  json attempts = json::array();
  for (const auto& a : s.interventions) attempts.push_back({{"id", a.id}, {"performed", a.performed}});
  return {{"flags", s.flags},
          {"tests_ordered", s.tests_ordered},
          {"exams_performed", s.exams_performed},
          {"interventions", attempts}};
}

json to_json(const AgentReply& r) {
  return {{"role", role_name(r.role)}, {"text", r.text},         {"flags_set", r.flags_set},
          {"payload", r.payload},      {"available", r.available}, {"item_id", r.item_id}};
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

/// Ids use underscores as word separators; treat them as spaces.
std::vector<std::string> name_tokens(std::string_view name) {
  std::string spaced(name);
  std::replace(spaced.begin(), spaced.end(), '_', ' ');
  return tokenize(spaced);
}

struct Named {
  const std::string* id;
  const std::vector<std::string>* aliases;
};

std::vector<Named> catalog_names(const ScenarioDefinition& s, AgentRole role) {
  std::vector<Named> out;
  switch (role) {
    case AgentRole::exam:
      for (const auto& e : s.exams) out.push_back({&e.site, &e.aliases});
      break;
    case AgentRole::diagnostic:
      for (const auto& t : s.tests) out.push_back({&t.id, &t.aliases});
      break;
    case AgentRole::intervention:
      for (const auto& i : s.interventions) out.push_back({&i.id, &i.aliases});
      break;
    case AgentRole::patient:
      break;
  }
  return out;
}

std::optional<ResolvedItem> resolve_action(const std::vector<Named>& names, std::string_view action) {
  const auto want = lower(action);
  const auto want_tokens = name_tokens(action);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (lower(*names[i].id) == want) return ResolvedItem{i, true};
    for (const auto& alias : *names[i].aliases) {
      if (lower(alias) == want || (!want_tokens.empty() && name_tokens(alias) == want_tokens)) {
        return ResolvedItem{i, true};
      }
    }
  }
  return std::nullopt;
}

std::optional<ResolvedItem> resolve_text(const std::vector<Named>& names, std::string_view text) {
  const auto tokens = tokenize(text);
  std::optional<ResolvedItem> best;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto consider = [&](std::string_view name) {
      const auto phrase = name_tokens(name);
      if (phrase.size() > best_len && contains_phrase(tokens, phrase)) {
        best = ResolvedItem{i, false};
        best_len = phrase.size();
      }
    };
    consider(*names[i].id);
    for (const auto& alias : *names[i].aliases) consider(alias);
  }
  return best;
}

void add_once(std::vector<std::string>& list, const std::string& value) {
  if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
}

std::vector<std::string> set_flags(AgentState& state, const std::vector<std::string>& flags) {
  std::vector<std::string> newly;
  for (const auto& f : flags) {
    if (state.flags.insert(f).second) newly.push_back(f);
  }
  return newly;
}

AgentReply not_available(AgentRole role, const StudentEvent& e) {
  AgentReply r;
  r.role = role;
  r.available = false;
  r.text = "That is not available in this case.";
  r.payload = {{"request", e.action ? *e.action : e.text}};
  return r;
}

AgentReply route_patient(const ScenarioDefinition& s, const StudentEvent& e, AgentState& state) {
  AgentReply r;
  r.role = AgentRole::patient;
  if (const auto idx = match_intent(s, e.text)) {
    const auto& intent = s.qa_intents[*idx];
    r.text = intent.answer;
    r.item_id = intent.id;
    r.flags_set = set_flags(state, intent.sets_flags);
    r.payload = {{"intent", intent.id}};
    return r;
  }
  r.text = s.default_answers[state.default_replies % s.default_answers.size()];
  ++state.default_replies;
  r.payload = {{"intent", nullptr}};
  return r;
}

AgentReply route_exam(const ScenarioDefinition& s, const StudentEvent& e, AgentState& state,
                      const std::optional<ResolvedItem>& item) {
  AgentReply r;
  r.role = AgentRole::exam;
  if (!item) {
    if (e.action) return not_available(AgentRole::exam, e);
    r.text = s.default_exam_finding;
    r.payload = {{"site", nullptr}, {"finding", s.default_exam_finding}};
    return r;
  }
  const auto& exam = s.exams[item->index];
  add_once(state.exams_performed, exam.site);
  r.text = exam.finding;
  r.item_id = exam.site;
  r.payload = {{"site", exam.site}, {"finding", exam.finding}};
  return r;
}

AgentReply route_diagnostic(const ScenarioDefinition& s, const StudentEvent& e, AgentState& state,
                            const std::optional<ResolvedItem>& item) {
  if (!item) return not_available(AgentRole::diagnostic, e);
  const auto& test = s.tests[item->index];
  add_once(state.tests_ordered, test.id);
  AgentReply r;
  r.role = AgentRole::diagnostic;
  r.text = test.result;
  r.item_id = test.id;
  r.payload = {{"test", test.id}, {"result", test.result}, {"turnaround", test.turnaround}};
  return r;
}

AgentReply route_intervention(const ScenarioDefinition& s, const StudentEvent& e, AgentState& state,
                              const std::optional<ResolvedItem>& item) {
  if (!item) return not_available(AgentRole::intervention, e);
  const auto& iv = s.interventions[item->index];
  const auto missing = missing_prerequisites(iv, state);
  AgentReply r;
  r.role = AgentRole::intervention;
  r.item_id = iv.id;
  if (missing.empty()) {
    state.interventions.push_back({iv.id, true});
    r.text = iv.outcome;
    r.flags_set = set_flags(state, iv.sets_flags);
    r.payload = {{"intervention", iv.id}, {"performed", true}, {"missing", json::array()}};
  } else {
    state.interventions.push_back({iv.id, false});
    r.text = "The intervention is on hold.";
    r.payload = {{"intervention", iv.id}, {"performed", false}, {"missing", missing}};
  }
  return r;
}

}  // namespace

std::optional<ResolvedItem> resolve_item(const ScenarioDefinition& s, const StudentEvent& e) {
  const auto names = catalog_names(s, e.target);
  if (names.empty()) return std::nullopt;
  if (e.action) return resolve_action(names, *e.action);
  return resolve_text(names, e.text);
}

std::optional<std::size_t> match_intent(const ScenarioDefinition& s, std::string_view text) {
  const auto tokens = token_set(text);
  std::optional<std::size_t> best;
  std::size_t best_overlap = 0;
  for (std::size_t i = 0; i < s.qa_intents.size(); ++i) {
    std::size_t overlap = 0;
    for (const auto& k : token_set(s.qa_intents[i].keywords)) overlap += tokens.count(k);
    if (overlap > best_overlap) {
      best = i;
      best_overlap = overlap;
    }
  }
  return best;
}

std::vector<std::string> missing_prerequisites(const Intervention& iv, const AgentState& state) {
  std::vector<std::string> out;
  for (const auto& p : iv.prerequisites) {
    if (!state.has_flag(p)) out.push_back(p);
  }
  return out;
}

AgentReply route(const ScenarioDefinition& s, const StudentEvent& e, AgentState& state) {
  if (e.target == AgentRole::patient) return route_patient(s, e, state);
  const auto item = resolve_item(s, e);
  switch (e.target) {
    case AgentRole::exam: return route_exam(s, e, state, item);
    case AgentRole::diagnostic: return route_diagnostic(s, e, state, item);
    case AgentRole::intervention: return route_intervention(s, e, state, item);
    case AgentRole::patient: break;
  }
  return route_patient(s, e, state);
}

}  // namespace fsup::scenario
