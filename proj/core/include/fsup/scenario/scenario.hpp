#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsup/criteria.hpp"
#include "fsup/error.hpp"

namespace fsup::scenario {

inline constexpr int kSchemaVersion = 1;

struct PatientProfile {
  std::string name;
  int age = 0;
  std::string sex;
  std::vector<std::string> history;
};

struct QaIntent {
  std::string id;
  std::vector<std::string> keywords;
  std::string answer;
  std::vector<std::string> sets_flags;
};

struct ExamFinding {
  std::string site;
  std::vector<std::string> aliases;
  std::string finding;
  double relevance = 1.0;
};

struct DiagnosticTest {
  std::string id;
  std::vector<std::string> aliases;
  std::string result;
  std::string turnaround;
  double relevance = 1.0;
};

struct Intervention {
  std::string id;
  std::vector<std::string> aliases;
  std::string outcome;
  std::vector<std::string> prerequisites;  // flag names
  std::vector<std::string> sets_flags;
  double unmet_ethics = 0.25;           // ethics score when a prerequisite is missing
  std::optional<double> always_ethics;  // hazardous regardless of prerequisites
  double relevance = 1.0;
};

struct HintOverride {
  Criterion criterion;
  std::string band;  // High | VeryHigh | Highest
  std::string text;
};

struct LexiconEntry {
  std::string term;
  double severity;  // (0,1]
};

struct DangerPattern {
  std::string term;
  double score;  // ethics score in [0,1] when matched
};

struct ScenarioDefinition {
  int schema_version = kSchemaVersion;
  std::string id;
  std::string title;
  std::string chief_complaint;
  std::string focus;  // hint slot {focus}; defaults to chief_complaint
  std::vector<std::string> topic_keywords;
  std::vector<std::string> rapport_keywords;
  PatientProfile patient;
  std::vector<std::string> flags;
  std::vector<QaIntent> qa_intents;
  std::vector<std::string> default_answers;
  std::string default_exam_finding = "Unremarkable.";
  std::vector<ExamFinding> exams;
  std::vector<DiagnosticTest> tests;
  std::vector<Intervention> interventions;
  std::vector<HintOverride> hint_overrides;
  std::vector<LexiconEntry> professionalism_lexicon;
  std::vector<DangerPattern> danger_patterns;

  /// topic_keywords followed by rapport_keywords.
  std::vector<std::string> relevance_keywords() const;
  bool defines_flag(std::string_view flag) const;
};

struct FieldDiagnostic {
  std::string path;  // JSON path, e.g. $.interventions[1].prerequisites[0]
  std::string message;
};

class ScenarioLoadError : public Error {
 public:
  ScenarioLoadError(std::string source, std::vector<FieldDiagnostic> diagnostics);
  const std::vector<FieldDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<FieldDiagnostic> diagnostics_;
};

/// Parses and validates a scenario document. Throws ScenarioLoadError listing
/// every problem found (schema, duplicate ids, dangling flag references).
ScenarioDefinition load_scenario(std::string_view json_text, std::string_view source = "<scenario>");
ScenarioDefinition load_scenario_file(const std::filesystem::path& path);

using ScenarioCatalog = std::map<std::string, std::shared_ptr<const ScenarioDefinition>, std::less<>>;

/// Loads every *.json file in `dir`. Throws on any invalid file or duplicate id.
ScenarioCatalog load_scenario_dir(const std::filesystem::path& dir);

}  // namespace fsup::scenario
