#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "assets.hpp"
#include "fsup/scenario/agents.hpp"
#include "fsup/time.hpp"

using namespace fsup;
using namespace fsup::scenario;
using nlohmann::json;

namespace {

json minimal_doc() {
  return json::parse(R"({
    "schema_version": 1, "id": "t", "title": "T", "chief_complaint": "cough",
    "topic_keywords": ["cough"], "patient": {"name": "P"},
    "flags": ["consent_obtained"],
    "interventions": [{"id": "x", "outcome": "done", "prerequisites": ["consent_obtained"]}]
  })");
}

std::vector<FieldDiagnostic> load_errors(const json& doc) {
  try {
    load_scenario(doc.dump());
  } catch (const ScenarioLoadError& e) {
    return e.diagnostics();
  }
  ADD_FAILURE() << "expected a load error";
  return {};
}

bool mentions(const std::vector<FieldDiagnostic>& ds, const std::string& path, const std::string& text) {
  for (const auto& d : ds) {
    if (d.path == path && d.message.find(text) != std::string::npos) return true;
  }
  return false;
}

StudentEvent say(AgentRole role, std::string text) {
  StudentEvent e;
  e.target = role;
  e.text = std::move(text);
  e.ts = parse_timestamp("2025-01-01T10:00:00Z");
  return e;
}

StudentEvent act(AgentRole role, std::string action) {
  auto e = say(role, "");
  e.action = std::move(action);
  return e;
}

}  // namespace

TEST(LoadScenario, BundledFixturesLoadClean) {
  const auto& s = testing_assets::chest_pain();
  EXPECT_EQ(s.id, "chest_pain");
  EXPECT_FALSE(s.topic_keywords.empty());
  EXPECT_TRUE(s.defines_flag("consent_obtained"));
  EXPECT_NO_THROW(load_scenario_file(testing_assets::path("scenarios/smoke.json")));
  const auto catalog = load_scenario_dir(testing_assets::path("scenarios"));
  EXPECT_EQ(catalog.size(), 2u);
  EXPECT_TRUE(catalog.count("smoke"));
}

TEST(LoadScenario, MinimalDocumentDefaults) {
  const auto s = load_scenario(minimal_doc().dump());
  EXPECT_EQ(s.focus, "cough");
  EXPECT_EQ(s.default_exam_finding, "Unremarkable.");
  ASSERT_EQ(s.default_answers.size(), 1u);
  EXPECT_DOUBLE_EQ(s.interventions[0].unmet_ethics, 0.25);
  EXPECT_FALSE(s.interventions[0].always_ethics.has_value());
}

TEST(LoadScenario, UndefinedPrerequisiteFlagIsNamed) {
  auto doc = minimal_doc();
  doc["interventions"][0]["prerequisites"] = {"patient_agreed"};
  const auto ds = load_errors(doc);
  EXPECT_TRUE(mentions(ds, "$.interventions[0].prerequisites[0]", "undefined flag 'patient_agreed'"));
}

TEST(LoadScenario, EmptyKeywordListRejected) {
  auto doc = minimal_doc();
  doc["topic_keywords"] = json::array();
  EXPECT_TRUE(mentions(load_errors(doc), "$.topic_keywords", "must not be empty"));
  doc.erase("topic_keywords");
  EXPECT_TRUE(mentions(load_errors(doc), "$.topic_keywords", "required"));
}

TEST(LoadScenario, DuplicateIdsReported) {
  auto doc = minimal_doc();
  doc["interventions"].push_back(doc["interventions"][0]);
  EXPECT_TRUE(mentions(load_errors(doc), "$.interventions[1]", "duplicate id 'x'"));
}

TEST(LoadScenario, SchemaViolationsCollected) {
  auto doc = minimal_doc();
  doc["schema_version"] = 2;
  doc["title"] = 5;
  doc["exams"] = json::parse(R"([{"site": "a"}])");
  const auto ds = load_errors(doc);
  EXPECT_TRUE(mentions(ds, "$.schema_version", "unsupported"));
  EXPECT_TRUE(mentions(ds, "$.title", "expected a string"));
  EXPECT_TRUE(mentions(ds, "$.exams[0].finding", "required"));
}

TEST(LoadScenario, RangesAndBandsChecked) {
  auto doc = minimal_doc();
  doc["interventions"][0]["unmet_ethics"] = 1.5;
  doc["hint_overrides"] = {{{"criterion", "ethical_behavior"}, {"band", "Medium"}, {"text", "t"}},
                           {{"criterion", "kindness"}, {"band", "High"}, {"text", "t"}}};
  const auto ds = load_errors(doc);
  EXPECT_TRUE(mentions(ds, "$.interventions[0].unmet_ethics", "[0, 1]"));
  EXPECT_TRUE(mentions(ds, "$.hint_overrides[0].band", "High, VeryHigh or Highest"));
  EXPECT_TRUE(mentions(ds, "$.hint_overrides[1].criterion", "unknown criterion"));
}

TEST(LoadScenario, MalformedJson) {
  EXPECT_THROW(load_scenario("{not json"), ScenarioLoadError);
  EXPECT_THROW(load_scenario("[]"), ScenarioLoadError);
}

TEST(Roles, NamesRoundTrip) {
  for (auto r : {AgentRole::patient, AgentRole::exam, AgentRole::diagnostic, AgentRole::intervention}) {
    EXPECT_EQ(parse_role(role_name(r)), r);
  }
  EXPECT_THROW(parse_role("evaluation"), ValidationError);
}

TEST(Route, PatientRadiationQuestion) {
  AgentState st;
  const auto r = route(testing_assets::chest_pain(), say(AgentRole::patient, "where does the pain go?"), st);
  EXPECT_EQ(r.item_id, "radiation");
  EXPECT_EQ(r.text, "It spreads down my left arm and up into my jaw.");
}

TEST(Route, PatientDefaultAnswersCycle) {
  const auto& s = testing_assets::chest_pain();
  AgentState st;
  const auto a = route(s, say(AgentRole::patient, "What's your favorite football team?"), st);
  const auto b = route(s, say(AgentRole::patient, "Qwerty?"), st);
  const auto c = route(s, say(AgentRole::patient, "Zzz"), st);
  EXPECT_TRUE(a.item_id.empty());
  EXPECT_EQ(a.text, s.default_answers[0]);
  EXPECT_EQ(b.text, s.default_answers[1]);
  EXPECT_EQ(c.text, s.default_answers[0]);
}

TEST(Route, IntentTiesGoToFileOrder) {
  auto doc = minimal_doc();
  doc["qa_intents"] = {{{"id", "first"}, {"keywords", {"alpha"}}, {"answer", "1"}},
                       {{"id", "second"}, {"keywords", {"beta"}}, {"answer", "2"}}};
  const auto s = load_scenario(doc.dump());
  EXPECT_EQ(match_intent(s, "beta alpha"), 0u);
  EXPECT_EQ(match_intent(s, "beta"), 1u);
  EXPECT_FALSE(match_intent(s, "gamma").has_value());
}

TEST(Route, ConsentIntentSetsFlagOnce) {
  const auto& s = testing_assets::chest_pain();
  AgentState st;
  const auto r = route(s, say(AgentRole::patient, "I'd like to explain the procedure. Do you consent?"), st);
  EXPECT_EQ(r.item_id, "consent");
  EXPECT_EQ(r.flags_set, std::vector<std::string>{"consent_obtained"});
  EXPECT_TRUE(st.has_flag("consent_obtained"));
  const auto again = route(s, say(AgentRole::patient, "Do you consent?"), st);
  EXPECT_TRUE(again.flags_set.empty());
}

TEST(Route, DiagnosticOrderRecorded) {
  const auto& s = testing_assets::chest_pain();
  AgentState st;
  const auto r = route(s, act(AgentRole::diagnostic, "ECG"), st);
  EXPECT_TRUE(r.available);
  EXPECT_EQ(r.text, "ST elevation in leads II, III and aVF.");
  EXPECT_EQ(r.payload["turnaround"], "immediate");
  EXPECT_EQ(st.tests_ordered, std::vector<std::string>{"ecg"});
  route(s, say(AgentRole::diagnostic, "Please get a 12-lead EKG"), st);
  route(s, say(AgentRole::diagnostic, "and a troponin"), st);
  EXPECT_EQ(st.tests_ordered, (std::vector<std::string>{"ecg", "troponin"}));
}

TEST(Route, UnknownTestIsNotAvailable) {
  AgentState st;
  const auto r = route(testing_assets::chest_pain(), act(AgentRole::diagnostic, "mri_brain"), st);
  EXPECT_FALSE(r.available);
  EXPECT_EQ(r.text, "That is not available in this case.");
  EXPECT_TRUE(st.tests_ordered.empty());
}

TEST(Route, ExamSiteOrUnremarkable) {
  const auto& s = testing_assets::chest_pain();
  AgentState st;
  EXPECT_EQ(route(s, say(AgentRole::exam, "Listen to the heart sounds"), st).item_id, "heart");
  EXPECT_EQ(route(s, say(AgentRole::exam, "Check the blood pressure"), st).item_id, "vital_signs");
  const auto other = route(s, say(AgentRole::exam, "Look at the elbows"), st);
  EXPECT_EQ(other.text, "Unremarkable.");
  EXPECT_TRUE(other.available);
  EXPECT_EQ(st.exams_performed, (std::vector<std::string>{"heart", "vital_signs"}));
  EXPECT_FALSE(route(s, act(AgentRole::exam, "elbow"), st).available);
}

TEST(Route, InterventionWithoutConsentIsWithheld) {
  const auto& s = testing_assets::chest_pain();
  AgentState st;
  const auto r = route(s, say(AgentRole::intervention, "Give aspirin 325 mg now"), st);
  EXPECT_EQ(r.item_id, "aspirin");
  EXPECT_NE(r.text, s.interventions[0].outcome);
  EXPECT_EQ(r.payload["performed"], false);
  EXPECT_EQ(r.payload["missing"], json({"consent_obtained"}));
  ASSERT_EQ(st.interventions.size(), 1u);
  EXPECT_EQ(st.interventions[0], (InterventionAttempt{"aspirin", false}));
  EXPECT_FALSE(st.has_flag("aspirin_given"));
}

TEST(Route, InterventionAfterConsentPerformed) {
  const auto& s = testing_assets::chest_pain();
  AgentState st;
  route(s, say(AgentRole::patient, "Do I have your permission?"), st);
  const auto r = route(s, act(AgentRole::intervention, "asa"), st);
  EXPECT_EQ(r.text, "Aspirin 325 mg chewed and swallowed.");
  EXPECT_EQ(r.flags_set, std::vector<std::string>{"aspirin_given"});
  EXPECT_EQ(st.interventions.back(), (InterventionAttempt{"aspirin", true}));
}

TEST(Route, TotalOverRolesAndText) {
  const auto& s = testing_assets::chest_pain();
  const std::vector<std::string> texts{"", "   ", "!!!", "héllo wörld", std::string(5000, 'a'), "ecg ecg ecg"};
  for (auto role : {AgentRole::patient, AgentRole::exam, AgentRole::diagnostic, AgentRole::intervention}) {
    for (const auto& t : texts) {
      AgentState st;
      EXPECT_NO_THROW(route(s, say(role, t), st));
      EXPECT_NO_THROW(route(s, act(role, t), st));
    }
  }
}

TEST(Route, ReplayYieldsSameState) {
  const auto& s = testing_assets::chest_pain();
  const std::vector<StudentEvent> events{
      say(AgentRole::patient, "hello"), act(AgentRole::diagnostic, "ecg"),
      say(AgentRole::intervention, "aspirin"), say(AgentRole::patient, "do you consent"),
      act(AgentRole::intervention, "aspirin"), act(AgentRole::exam, "heart")};
  AgentState a, b;
  for (const auto& e : events) route(s, e, a);
  for (const auto& e : events) route(s, e, b);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.flags, (std::set<std::string>{"aspirin_given", "consent_obtained"}));
}

TEST(Route, SessionsDoNotShareState) {
  const auto& s = testing_assets::chest_pain();
  AgentState a, b;
  route(s, say(AgentRole::patient, "do you consent"), a);
  EXPECT_TRUE(a.has_flag("consent_obtained"));
  EXPECT_FALSE(b.has_flag("consent_obtained"));
}

TEST(StudentEventJson, RoundTrip) {
  auto e = act(AgentRole::diagnostic, "ecg");
  e.text = "order it";
  const auto back = student_event_from_json(to_json(e));
  EXPECT_EQ(back.target, e.target);
  EXPECT_EQ(back.text, e.text);
  EXPECT_EQ(back.action, e.action);
  EXPECT_EQ(back.ts, e.ts);
  EXPECT_THROW(student_event_from_json(json{{"target", "evaluation"}, {"ts", "2025-01-01T00:00:00Z"}}),
               ValidationError);
  EXPECT_THROW(student_event_from_json(json{{"target", "patient"}}), ValidationError);
}
