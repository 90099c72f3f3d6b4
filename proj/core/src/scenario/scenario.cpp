#include "fsup/scenario/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fsup::scenario {

using nlohmann::json;

std::vector<std::string> ScenarioDefinition::relevance_keywords() const {
  std::vector<std::string> out = topic_keywords;
  out.insert(out.end(), rapport_keywords.begin(), rapport_keywords.end());
  return out;
}

bool ScenarioDefinition::defines_flag(std::string_view flag) const {
  for (const auto& f : flags) {
    if (f == flag) return true;
  }
  return false;
}

namespace {

std::string join_messages(std::string_view source, const std::vector<FieldDiagnostic>& ds) {
  std::string out = "invalid scenario " + std::string(source) + ":";
  for (const auto& d : ds) out += "\n  " + d.path + ": " + d.message;
  return out;
}

class Reader {
 public:
  std::vector<FieldDiagnostic> diagnostics;

  void report(const std::string& path, std::string message) { diagnostics.push_back({path, std::move(message)}); }

  const json* field(const json& obj, const std::string& path, std::string_view key, bool required) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
      if (required) report(path + "." + std::string(key), "required field missing");
      return nullptr;
    }
    return &*it;
  }

  std::string string(const json& obj, const std::string& path, std::string_view key, bool required,
                     std::string fallback = {}) {
    const json* v = field(obj, path, key, required);
    if (!v) return fallback;
    if (!v->is_string()) {
      report(path + "." + std::string(key), "expected a string");
      return fallback;
    }
    auto s = v->get<std::string>();
    if (required && s.empty()) report(path + "." + std::string(key), "must not be empty");
    return s;
  }

  double number(const json& obj, const std::string& path, std::string_view key, double fallback, double lo,
                double hi) {
    const json* v = field(obj, path, key, false);
    if (!v) return fallback;
    if (!v->is_number()) {
      report(path + "." + std::string(key), "expected a number");
      return fallback;
    }
    const double d = v->get<double>();
    if (d < lo || d > hi) {
      report(path + "." + std::string(key), "must lie in [" + fmt(lo) + ", " + fmt(hi) + "]");
      return fallback;
    }
    return d;
  }

  std::vector<std::string> strings(const json& obj, const std::string& path, std::string_view key, bool required) {
    std::vector<std::string> out;
    const json* v = field(obj, path, key, required);
    if (!v) return out;
    const std::string here = path + "." + std::string(key);
    if (!v->is_array()) {
      report(here, "expected an array of strings");
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) {
        report(here + "[" + std::to_string(i) + "]", "expected a string");
      } else {
        out.push_back((*v)[i].get<std::string>());
      }
    }
    return out;
  }

  /// Calls fn(element, path) for each object in an optional array field.
  template <typename Fn>
  void each(const json& obj, const std::string& path, std::string_view key, bool required, Fn fn) {
    const json* v = field(obj, path, key, required);
    if (!v) return;
    const std::string here = path + "." + std::string(key);
    if (!v->is_array()) {
      report(here, "expected an array");
      return;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string item = here + "[" + std::to_string(i) + "]";
      if (!(*v)[i].is_object()) {
        report(item, "expected an object");
        continue;
      }
      fn((*v)[i], item);
    }
  }

 private:
  static std::string fmt(double d) {
    std::ostringstream ss;
    ss << d;
    return ss.str();
  }
};

template <typename T, typename IdFn>
void check_unique(Reader& r, const std::vector<T>& items, const std::string& path, IdFn id_of) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string id = id_of(items[i]);
    if (!seen.insert(id).second) r.report(path + "[" + std::to_string(i) + "]", "duplicate id '" + id + "'");
  }
}

void check_flags(Reader& r, const ScenarioDefinition& s, const std::vector<std::string>& refs,
                 const std::string& path) {
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!s.defines_flag(refs[i])) {
      r.report(path + "[" + std::to_string(i) + "]", "undefined flag '" + refs[i] + "'");
    }
  }
}

}  // namespace

ScenarioLoadError::ScenarioLoadError(std::string source, std::vector<FieldDiagnostic> diagnostics)
    : Error(join_messages(source, diagnostics)), diagnostics_(std::move(diagnostics)) {}

ScenarioDefinition load_scenario(std::string_view json_text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioLoadError(std::string(source), {{"$", std::string("malformed JSON: ") + e.what()}});
  }
  if (!doc.is_object()) throw ScenarioLoadError(std::string(source), {{"$", "expected a JSON object"}});

  Reader r;
  ScenarioDefinition s;
  const std::string root = "$";

  if (const json* v = r.field(doc, root, "schema_version", true)) {
    if (!v->is_number_integer() || v->get<int>() != kSchemaVersion) {
      r.report("$.schema_version", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
    }
  }
  s.id = r.string(doc, root, "id", true);
  s.title = r.string(doc, root, "title", true);
  s.chief_complaint = r.string(doc, root, "chief_complaint", true);
  s.focus = r.string(doc, root, "focus", false, s.chief_complaint);
  s.topic_keywords = r.strings(doc, root, "topic_keywords", true);
  if (doc.contains("topic_keywords") && doc["topic_keywords"].is_array() && s.topic_keywords.empty()) {
    r.report("$.topic_keywords", "must not be empty");
  }
  s.rapport_keywords = r.strings(doc, root, "rapport_keywords", false);
  s.flags = r.strings(doc, root, "flags", false);
  s.default_answers = r.strings(doc, root, "default_answers", false);
  if (s.default_answers.empty()) s.default_answers.push_back("I'm not sure what you mean.");
  s.default_exam_finding = r.string(doc, root, "default_exam_finding", false, s.default_exam_finding);

  if (const json* p = r.field(doc, root, "patient", true)) {
    if (!p->is_object()) {
      r.report("$.patient", "expected an object");
    } else {
      s.patient.name = r.string(*p, "$.patient", "name", true);
      s.patient.age = static_cast<int>(r.number(*p, "$.patient", "age", 0, 0, 150));
      s.patient.sex = r.string(*p, "$.patient", "sex", false);
      s.patient.history = r.strings(*p, "$.patient", "history", false);
    }
  }

  r.each(doc, root, "qa_intents", false, [&](const json& o, const std::string& path) {
    QaIntent q;
    q.id = r.string(o, path, "id", true);
    q.keywords = r.strings(o, path, "keywords", true);
    if (o.contains("keywords") && q.keywords.empty()) r.report(path + ".keywords", "must not be empty");
    q.answer = r.string(o, path, "answer", true);
    q.sets_flags = r.strings(o, path, "sets_flags", false);
    check_flags(r, s, q.sets_flags, path + ".sets_flags");
    s.qa_intents.push_back(std::move(q));
  });
  r.each(doc, root, "exams", false, [&](const json& o, const std::string& path) {
    ExamFinding e;
    e.site = r.string(o, path, "site", true);
    e.aliases = r.strings(o, path, "aliases", false);
    e.finding = r.string(o, path, "finding", true);
    e.relevance = r.number(o, path, "relevance", 1.0, 0.0, 1.0);
    s.exams.push_back(std::move(e));
  });
  r.each(doc, root, "tests", false, [&](const json& o, const std::string& path) {
    DiagnosticTest t;
    t.id = r.string(o, path, "id", true);
    t.aliases = r.strings(o, path, "aliases", false);
    t.result = r.string(o, path, "result", true);
    t.turnaround = r.string(o, path, "turnaround", false, "immediate");
    t.relevance = r.number(o, path, "relevance", 1.0, 0.0, 1.0);
    s.tests.push_back(std::move(t));
  });
  r.each(doc, root, "interventions", false, [&](const json& o, const std::string& path) {
    Intervention iv;
    iv.id = r.string(o, path, "id", true);
    iv.aliases = r.strings(o, path, "aliases", false);
    iv.outcome = r.string(o, path, "outcome", true);
    iv.prerequisites = r.strings(o, path, "prerequisites", false);
    iv.sets_flags = r.strings(o, path, "sets_flags", false);
    iv.unmet_ethics = r.number(o, path, "unmet_ethics", 0.25, 0.0, 1.0);
    if (o.contains("always_ethics") && !o["always_ethics"].is_null()) {
      iv.always_ethics = r.number(o, path, "always_ethics", 0.0, 0.0, 1.0);
    }
    iv.relevance = r.number(o, path, "relevance", 1.0, 0.0, 1.0);
    check_flags(r, s, iv.prerequisites, path + ".prerequisites");
    check_flags(r, s, iv.sets_flags, path + ".sets_flags");
    s.interventions.push_back(std::move(iv));
  });
  r.each(doc, root, "hint_overrides", false, [&](const json& o, const std::string& path) {
    const auto key = r.string(o, path, "criterion", true);
    const auto band = r.string(o, path, "band", true);
    const auto text = r.string(o, path, "text", true);
    const auto criterion = criterion_from_key(key);
    if (!key.empty() && !criterion) r.report(path + ".criterion", "unknown criterion '" + key + "'");
    if (!band.empty() && band != "High" && band != "VeryHigh" && band != "Highest") {
      r.report(path + ".band", "band must be High, VeryHigh or Highest");
    }
    if (criterion) s.hint_overrides.push_back({*criterion, band, text});
  });
  r.each(doc, root, "professionalism_lexicon", false, [&](const json& o, const std::string& path) {
    LexiconEntry e{r.string(o, path, "term", true), r.number(o, path, "severity", 1.0, 0.0, 1.0)};
    if (e.severity <= 0.0) r.report(path + ".severity", "must be greater than 0");
    s.professionalism_lexicon.push_back(std::move(e));
  });
  r.each(doc, root, "danger_patterns", false, [&](const json& o, const std::string& path) {
    s.danger_patterns.push_back({r.string(o, path, "term", true), r.number(o, path, "score", 0.25, 0.0, 1.0)});
  });

  std::set<std::string> flag_names;
  for (std::size_t i = 0; i < s.flags.size(); ++i) {
    if (!flag_names.insert(s.flags[i]).second) {
      r.report("$.flags[" + std::to_string(i) + "]", "duplicate flag '" + s.flags[i] + "'");
    }
  }
  check_unique(r, s.qa_intents, "$.qa_intents", [](const QaIntent& q) { return q.id; });
  check_unique(r, s.exams, "$.exams", [](const ExamFinding& e) { return e.site; });
  check_unique(r, s.tests, "$.tests", [](const DiagnosticTest& t) { return t.id; });
  check_unique(r, s.interventions, "$.interventions", [](const Intervention& i) { return i.id; });

  if (!r.diagnostics.empty()) throw ScenarioLoadError(std::string(source), std::move(r.diagnostics));
  return s;
}

ScenarioDefinition load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str(), path.string());
}

ScenarioCatalog load_scenario_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("scenario directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ScenarioCatalog catalog;
  for (const auto& f : files) {
    auto s = std::make_shared<const ScenarioDefinition>(load_scenario_file(f));
    const std::string id = s->id;
    if (!catalog.emplace(id, std::move(s)).second) throw ConfigError("duplicate scenario id '" + id + "'");
  }
  return catalog;
}

}  // namespace fsup::scenario
