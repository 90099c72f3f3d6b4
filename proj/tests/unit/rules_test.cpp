#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fsup/fuzzy/defaults.hpp"
#include "fsup/rules/parser.hpp"
#include "rule_gen.hpp"

using namespace fsup;
using namespace fsup::rules;

namespace {

RuleBase parse_ok(std::string_view text) {
  auto r = parse_rules(text);
  EXPECT_TRUE(r.ok()) << (r.diagnostics.empty() ? "" : format_diagnostic(r.diagnostics.front()));
  return std::move(*r.rule_base);
}

std::vector<Diagnostic> errors_of(std::string_view text) {
  auto r = parse_rules(text);
  EXPECT_FALSE(r.ok());
  return r.diagnostics;
}

std::string read_asset(const std::string& rel) {
  std::ifstream in(std::string(FSUP_ASSET_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::vector<Diagnostic>& ds, Severity s) {
  return static_cast<std::size_t>(std::count_if(ds.begin(), ds.end(), [s](const auto& d) { return d.severity == s; }));
}

}  // namespace

TEST(Parse, OrRootWithTwoAtoms) {
  const auto rb = parse_ok(
      "IF Professionalism IS Unprofessional OR EthicalBehavior IS Dangerous THEN Assistance IS VeryHigh");
  ASSERT_EQ(rb.size(), 1u);
  const auto& r = rb.rules()[0];
  EXPECT_EQ(r.id, 1);
  EXPECT_EQ(r.antecedent.kind, Expr::Kind::any_of);
  const auto atoms = atoms_of(r.antecedent);
  ASSERT_EQ(atoms.size(), 2u);
  EXPECT_EQ(atoms[0]->variable, "Professionalism");
  EXPECT_EQ(atoms[1]->label, "Dangerous");
  EXPECT_EQ(r.consequent.variable, "Assistance");
  EXPECT_EQ(r.consequent.label, "VeryHigh");
}

TEST(Parse, LabelShorthandExpands) {
  const auto rb = parse_ok("IF EthicalBehavior IS Unsafe OR Dangerous THEN Assistance IS VeryHigh\n");
  const auto& e = rb.rules()[0].antecedent;
  ASSERT_EQ(e.kind, Expr::Kind::any_of);
  ASSERT_EQ(e.children.size(), 2u);
  EXPECT_EQ(e.children[0].variable, "EthicalBehavior");
  EXPECT_EQ(e.children[1].variable, "EthicalBehavior");
  EXPECT_EQ(e.children[1].label, "Dangerous");
}

TEST(Parse, ShorthandStopsAtNextCondition) {
  const auto rb = parse_ok("IF A IS x OR y OR B IS z THEN O IS l\n");
  const auto atoms = atoms_of(rb.rules()[0].antecedent);
  ASSERT_EQ(atoms.size(), 3u);
  EXPECT_EQ(atoms[1]->variable, "A");
  EXPECT_EQ(atoms[2]->variable, "B");
}

TEST(Parse, ShorthandBindsInsideConjunction) {
  const auto rb = parse_ok("IF A IS x OR y AND B IS z THEN O IS l\n");
  const auto& e = rb.rules()[0].antecedent;
  ASSERT_EQ(e.kind, Expr::Kind::all_of);
  EXPECT_EQ(e.children[0].kind, Expr::Kind::any_of);
}

TEST(Parse, EmptyFileIsAnError) {
  auto ds = errors_of("");
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_NE(ds[0].message.find("empty"), std::string::npos);
  EXPECT_FALSE(parse_rules("# only a comment\n\n").ok());
}

TEST(Parse, KeywordsAreCaseInsensitive) {
  const auto a = parse_ok("if A is x and B Is y then O iS l;\n");
  const auto b = parse_ok("IF A IS x AND B IS y THEN O IS l\n");
  EXPECT_TRUE(structurally_equal(a, b));
}

TEST(Parse, QuotedLabelsAreTrimmed) {
  const auto rb = parse_ok("IF MedicalRelevance IS \"  Partially relevant \" THEN O IS \"Very High\"\n");
  EXPECT_EQ(rb.rules()[0].antecedent.label, "Partially relevant");
  EXPECT_EQ(rb.rules()[0].consequent.label, "Very High");
}

TEST(Parse, CommentsAndBlankLinesIgnored) {
  const auto rb = parse_ok("# header\n\nIF A IS x THEN O IS l # tail\n  \n# more\nIF B IS y THEN O IS m\n");
  ASSERT_EQ(rb.size(), 2u);
  EXPECT_EQ(rb.rules()[1].id, 2);
  EXPECT_EQ(rb.rules()[1].location.line, 6);
}

TEST(Parse, SyntaxErrorCarriesLineAndColumn) {
  auto ds = errors_of("IF A IS x THEN O IS l\nIF A x THEN O IS l\n");
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].line, 2);
  EXPECT_EQ(ds[0].column, 6);
  EXPECT_EQ(format_diagnostic(ds[0], "r.frl").rfind("r.frl:2:6: error:", 0), 0u);
}

TEST(Parse, UnterminatedRule) {
  auto ds = errors_of("IF A IS x AND B IS y\n");
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_NE(ds[0].message.find("unterminated"), std::string::npos);
  auto paren = errors_of("IF (A IS x AND B IS y THEN O IS l\n");
  EXPECT_NE(paren[0].message.find("missing ')'"), std::string::npos);
  auto at_eof = errors_of("IF A IS x THEN O IS");
  EXPECT_NE(at_eof[0].message.find("unterminated"), std::string::npos);
}

TEST(Parse, RecoversAndReportsEveryBadLine) {
  auto ds = errors_of("IF A IS THEN O IS l\nIF A IS x THEN O IS l\nIF B IS \"open THEN O IS l\nIF C IS z THEN O IS l extra\n");
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds[0].line, 1);
  EXPECT_EQ(ds[1].line, 3);
  EXPECT_NE(ds[1].message.find("unterminated quoted"), std::string::npos);
  EXPECT_EQ(ds[2].line, 4);
}

TEST(Parse, RejectsStrayCharacters) {
  auto ds = errors_of("IF A IS x & B IS y THEN O IS l\n");
  EXPECT_NE(ds[0].message.find("unexpected character"), std::string::npos);
}

TEST(Parse, TotalOnArbitraryBytes) {
  std::mt19937_64 rng(99);
  const std::string alphabet = "IFTHENISANDOR abcxyz()\"#;\n\t\\";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int len = static_cast<int>(rng() % 60);
    for (int i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
    const auto r = parse_rules(text);
    ASSERT_TRUE(r.ok() || has_errors(r.diagnostics)) << text;
  }
}

TEST(Validate, DefaultFileHasOneDuplicateWarning) {
  const auto rb = parse_ok(fuzzy::default_rule_text());
  const auto ds = validate(rb, fuzzy::default_registry());
  EXPECT_EQ(count(ds, Severity::error), 0u);
  ASSERT_EQ(count(ds, Severity::warning), 1u);
  EXPECT_EQ(ds[0].rule_id, 11);
  EXPECT_NE(ds[0].message.find("same antecedent as rule 5"), std::string::npos);
}

TEST(Validate, UnknownLabelIsAnError) {
  const auto rb = parse_ok("IF MedicalRelevance IS \"Sorta relevant\" THEN Assistance IS High\n");
  const auto ds = validate(rb, fuzzy::default_registry());
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].severity, Severity::error);
  EXPECT_NE(ds[0].message.find("Sorta relevant"), std::string::npos);
}

TEST(Validate, ConsequentMustTargetOutput) {
  const auto rb = parse_ok("IF MedicalRelevance IS Relevant THEN Professionalism IS Appropriate\n");
  const auto ds = validate(rb, fuzzy::default_registry());
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_NE(ds[0].message.find("output variable"), std::string::npos);
}

TEST(Validate, OtherErrorsAndShadowing) {
  const auto rb = parse_ok(
      "IF Nope IS x THEN Assistance IS High\n"
      "IF Assistance IS High THEN Assistance IS Low\n"
      "IF Professionalism IS Borderline THEN Assistance IS Extreme\n"
      "IF Professionalism IS Borderline AND MedicalRelevance IS Relevant THEN Assistance IS High\n"
      "IF MedicalRelevance IS Relevant AND Professionalism IS Borderline THEN Assistance IS High\n");
  const auto ds = validate(rb, fuzzy::default_registry());
  EXPECT_EQ(count(ds, Severity::error), 3u);
  ASSERT_EQ(count(ds, Severity::warning), 1u);
  EXPECT_NE(ds.back().message.find("shadowed"), std::string::npos);
  EXPECT_THROW(load_rule_base("IF Nope IS x THEN Assistance IS High\n", fuzzy::default_registry()), RuleBaseError);
}

TEST(PrettyPrint, SingleAtomHasNoParentheses) {
  const auto rb = parse_ok("IF ( ContextualDistraction IS HighlyDistracting ) THEN Assistance IS High\n");
  EXPECT_EQ(pretty_print(rb), "IF ContextualDistraction IS HighlyDistracting THEN Assistance IS High\n");
}

TEST(PrettyPrint, ShorthandPrintedExpanded) {
  const auto rb = parse_ok("IF EthicalBehavior IS Unsafe OR Dangerous THEN Assistance IS VeryHigh\n");
  EXPECT_EQ(pretty_print(rb),
            "IF EthicalBehavior IS Unsafe OR EthicalBehavior IS Dangerous THEN Assistance IS VeryHigh\n");
}

TEST(PrettyPrint, GroupsAndQuoting) {
  const auto rb = parse_ok("if a is x and b is \"two words\" or (c is \"or\" or d is y) and e is z then O is l\n");
  EXPECT_EQ(pretty_print(rb),
            "IF (a IS x AND b IS \"two words\") OR ((c IS \"or\" OR d IS y) AND e IS z) THEN O IS l\n");
}

TEST(PrettyPrint, DefaultFileRoundTrips) {
  const auto rb = parse_ok(fuzzy::default_rule_text());
  const auto again = parse_ok(pretty_print(rb));
  EXPECT_TRUE(structurally_equal(rb, again));
  EXPECT_EQ(rb.source_hash(), again.source_hash());
  EXPECT_EQ(rb.source_hash().size(), 64u);
}

TEST(PrettyPrint, RandomFilesRoundTrip) {
  rulegen::Generator gen(1234);
  for (int i = 0; i < 200; ++i) {
    const auto text = gen.file();
    const auto first = parse_rules(text);
    ASSERT_TRUE(first.ok()) << text;
    const auto printed = pretty_print(*first.rule_base);
    const auto second = parse_rules(printed);
    ASSERT_TRUE(second.ok()) << printed;
    ASSERT_TRUE(structurally_equal(*first.rule_base, *second.rule_base)) << text << "\n--\n" << printed;
    ASSERT_EQ(pretty_print(*second.rule_base), printed);
  }
}

TEST(DefaultAsset, EmbeddedTextMatchesShippedFile) {
  EXPECT_EQ(std::string(fuzzy::default_rule_text()), read_asset("rules/table1.frl"));
}

TEST(DefaultAsset, TwelveRulesInFileOrder) {
  // Row-by-row transcription of the table: (antecedent, consequent).
  const std::vector<std::pair<std::string, std::string>> table{
      {"Professionalism IS Unprofessional OR EthicalBehavior IS Dangerous", "VeryHigh"},
      {"MedicalRelevance IS Irrelevant AND ContextualDistraction IS HighlyDistracting", "VeryHigh"},
      {"Professionalism IS Borderline AND EthicalBehavior IS Unsafe", "High"},
      {"MedicalRelevance IS PartiallyRelevant AND ContextualDistraction IS ModeratelyDistracting", "High"},
      {"Professionalism IS Appropriate AND MedicalRelevance IS Relevant AND EthicalBehavior IS Safe AND "
       "ContextualDistraction IS NotDistracting",
       "Low"},
      {"Professionalism IS Appropriate AND MedicalRelevance IS Relevant AND EthicalBehavior IS MostlySafe AND "
       "ContextualDistraction IS Questionable",
       "Medium"},
      {"MedicalRelevance IS Irrelevant AND EthicalBehavior IS Questionable", "High"},
      {"Professionalism IS Borderline AND MedicalRelevance IS PartiallyRelevant AND ContextualDistraction IS "
       "ModeratelyDistracting",
       "Medium"},
      {"EthicalBehavior IS Unsafe OR EthicalBehavior IS Dangerous", "VeryHigh"},
      {"ContextualDistraction IS HighlyDistracting", "High"},
      {"Professionalism IS Appropriate AND MedicalRelevance IS Relevant AND EthicalBehavior IS Safe AND "
       "ContextualDistraction IS NotDistracting",
       "Minimal"},
      {"Professionalism IS Unprofessional OR MedicalRelevance IS Irrelevant OR EthicalBehavior IS Dangerous OR "
       "ContextualDistraction IS HighlyDistracting",
       "Highest"},
  };
  const auto rb = parse_ok(fuzzy::default_rule_text());
  ASSERT_EQ(rb.size(), table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    EXPECT_EQ(print_expr(rb.rules()[i].antecedent), table[i].first) << "row " << i + 1;
    EXPECT_EQ(rb.rules()[i].consequent.label, table[i].second) << "row " << i + 1;
    EXPECT_EQ(rb.rules()[i].id, static_cast<int>(i + 1));
  }
}
