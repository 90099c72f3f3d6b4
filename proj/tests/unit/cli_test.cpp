#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "assets.hpp"
#include "fsup/cli/cli.hpp"
#include "fsup/gateway/service.hpp"
#include "fsup/supervisor/transcript.hpp"
#include "temp_dir.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run fsup_cli(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
  std::vector<std::string> full{"--scenarios", testing_assets::path("scenarios")};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = fsup::cli::run(full, out, err, [&env](const char* name) -> const char* {
    const auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  return {code, out.str(), err.str()};
}

std::string escalation() { return testing_assets::path("transcripts/chest_pain_escalation.jsonl"); }

std::string label_line(const std::string& out) {
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("label", 0) == 0) return line.substr(line.find_last_of(' ') + 1);
  }
  return {};
}

}  // namespace

TEST(CliReplay, EscalationTraceHasHighThenVeryHigh) {
  const auto r = fsup_cli({"replay", escalation(), "--scenario", "chest_pain"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto high = r.out.find("High       Consider focusing your questions on symptoms related to chest pain");
  const auto very = r.out.find("VeryHigh   Before proceeding, ensure you have explained the procedure");
  ASSERT_NE(high, std::string::npos) << r.out;
  ASSERT_NE(very, std::string::npos) << r.out;
  EXPECT_LT(high, very);
}

TEST(CliReplay, ByteIdenticalAcrossRuns) {
  for (const auto* format : {"table", "jsonl"}) {
    const auto a = fsup_cli({"replay", escalation(), "-s", "chest_pain", "--format", format, "--report"});
    const auto b = fsup_cli({"replay", escalation(), "-s", "chest_pain", "--format", format, "--report"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(CliReplay, MalformedLineReportsLineNumber) {
  TempDir dir;
  const auto path = (dir.path() / "bad.jsonl").string();
  std::ofstream(path) << R"({"ts": "2025-01-01T00:00:00Z", "target": "patient", "text": "hi"})" << "\n\n{oops\n";
  const auto r = fsup_cli({"replay", path, "-s", "chest_pain"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(CliReplay, EmptyTranscriptFails) {
  TempDir dir;
  const auto path = (dir.path() / "empty.jsonl").string();
  std::ofstream(path) << "";
  EXPECT_NE(fsup_cli({"replay", path, "-s", "chest_pain"}).code, 0);
}

TEST(CliReplay, UnknownScenarioFails) {
  const auto r = fsup_cli({"replay", escalation(), "-s", "nope"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("unknown scenario"), std::string::npos);
}

TEST(CliReplay, MatchesApiDecisions) {
  const auto r = fsup_cli({"replay", escalation(), "-s", "chest_pain", "--format", "jsonl"});
  ASSERT_EQ(r.code, 0);
  std::vector<json> cli;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) cli.push_back(json::parse(line)["decision"]);

  fsup::gateway::Service svc(fsup::supervisor::Supervisor::with_defaults(),
                             fsup::scenario::load_scenario_dir(testing_assets::path("scenarios")),
                             std::make_shared<fsup::store::MemorySessionStore>());
  const auto id = svc.create_session("chest_pain");
  std::vector<json> api;
  for (const auto& e : fsup::supervisor::load_transcript(escalation())) {
    api.push_back(svc.post_message(id, fsup::scenario::to_json(e))["decision"]);
  }
  EXPECT_EQ(cli, api);
}

TEST(CliInfer, WorkedExampleIsHigh) {
  const auto r = fsup_cli({"infer", "--prof", "1", "--rel", "0.5", "--eth", "1", "--dist", "0.333"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(label_line(r.out), "High");
  EXPECT_NE(r.out.find("fired        rule 4"), std::string::npos);
}

TEST(CliInfer, AllBestIsMinimalOrLow) {
  for (const auto* d : {"most-severe-maximum", "centroid"}) {
    const auto r = fsup_cli({"--defuzzifier", d, "infer", "--prof", "1", "--rel", "1", "--eth", "1", "--dist", "1"});
    ASSERT_EQ(r.code, 0);
    const auto label = label_line(r.out);
    EXPECT_TRUE(label == "Minimal" || label == "Low") << d << ": " << label;
  }
}

TEST(CliInfer, UnprofessionalIsVeryHighOrHighest) {
  const auto r = fsup_cli({"infer", "--prof", "0", "--rel", "1", "--eth", "1", "--dist", "1"});
  ASSERT_EQ(r.code, 0);
  const auto label = label_line(r.out);
  EXPECT_TRUE(label == "VeryHigh" || label == "Highest") << label;
}

TEST(CliInfer, OutOfRangeIsUsageError) {
  const auto r = fsup_cli({"infer", "--prof", "1.5", "--rel", "1", "--eth", "1", "--dist", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(fsup_cli({"infer", "--prof", "1"}).code, 2);
}

TEST(CliInfer, JsonOutput) {
  const auto r = fsup_cli({"infer", "--json", "--prof", "1", "--rel", "0.5", "--eth", "1", "--dist", "0.333"});
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["label"], "High");
  EXPECT_TRUE(j["intervene"]);
}

TEST(CliRulesCheck, DefaultFileHasOneWarning) {
  const auto r = fsup_cli({"rules", "check", testing_assets::path("rules/table1.frl")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("12 rules, 0 errors, 1 warning"), std::string::npos) << r.out;
}

TEST(CliRulesCheck, UnknownLabelAndEmptyFileFail) {
  TempDir dir;
  const auto bad = (dir.path() / "bad.frl").string();
  std::ofstream(bad) << "IF Professionalism IS Rude THEN Assistance IS High\n";
  const auto r = fsup_cli({"rules", "check", bad});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("bad.frl:1:"), std::string::npos);

  const auto empty = (dir.path() / "empty.frl").string();
  std::ofstream(empty) << "# nothing\n";
  EXPECT_NE(fsup_cli({"rules", "check", empty}).code, 0);
  EXPECT_NE(fsup_cli({"rules", "check", (dir.path() / "missing.frl").string()}).code, 0);
}

TEST(CliConfig, FlagBeatsEnvBeatsFile) {
  TempDir dir;
  const auto file = (dir.path() / "fsup.json").string();
  std::ofstream(file) << R"({"defuzzifier": "centroid"})";
  const std::vector<std::string> infer{"infer", "--json", "--prof", "1", "--rel", "1", "--eth", "1", "--dist", "1"};
  auto with = [&](std::vector<std::string> head, std::map<std::string, std::string> env) {
    head.insert(head.end(), infer.begin(), infer.end());
    return json::parse(fsup_cli(head, env).out)["defuzzifier"].get<std::string>();
  };
  EXPECT_EQ(with({"--config", file}, {}), "centroid");
  EXPECT_EQ(with({"--config", file}, {{"FSUP_DEFUZZIFIER", "most-severe-maximum"}}), "most-severe-maximum");
  EXPECT_EQ(with({}, {{"FSUP_CONFIG", file}}), "centroid");
  EXPECT_EQ(with({"--config", file, "--defuzzifier", "most-severe-maximum"}, {{"FSUP_DEFUZZIFIER", "centroid"}}),
            "most-severe-maximum");
}

TEST(CliConfig, BadConfigFails) {
  TempDir dir;
  const auto file = (dir.path() / "fsup.json").string();
  std::ofstream(file) << R"({"colour": "blue"})";
  const auto r = fsup_cli({"--config", file, "infer", "--prof", "1", "--rel", "1", "--eth", "1", "--dist", "1"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("colour"), std::string::npos);
}

TEST(CliRules, CustomRuleFileIsUsed) {
  TempDir dir;
  const auto rules = (dir.path() / "r.frl").string();
  std::ofstream(rules) << "IF Professionalism IS Appropriate THEN Assistance IS Highest\n";
  const auto r = fsup_cli({"--rules", rules, "infer", "--prof", "1", "--rel", "1", "--eth", "1", "--dist", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(label_line(r.out), "Highest");
}

TEST(CliReplay, UnreachableClassifierKeepsTraceClean) {
  const auto plain = fsup_cli({"replay", escalation(), "-s", "chest_pain"});
  const auto down = fsup_cli({"--classifier-url", "http://127.0.0.1:1", "replay", escalation(), "-s", "chest_pain"});
  ASSERT_EQ(down.code, 0) << down.err;
  EXPECT_EQ(down.out, plain.out);
  EXPECT_NE(down.err.find("classifier"), std::string::npos);
}
