#include <benchmark/benchmark.h>

#include <random>

#include "fsup/fuzzy/defaults.hpp"
#include "fsup/rules/parser.hpp"
#include "fsup/scenario/scenario.hpp"
#include "fsup/store/store.hpp"
#include "fsup/supervisor/session.hpp"
#include "fsup/supervisor/transcript.hpp"

using namespace fsup;

namespace {

std::string asset(const std::string& rel) { return std::string(FSUP_ASSET_DIR) + "/" + rel; }

std::vector<CriterionScores> random_inputs(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CriterionScores> out(n);
  for (auto& s : out) {
    s.professionalism = u(rng);
    s.medical_relevance = u(rng);
    s.ethical_behavior = u(rng);
    s.contextual_distraction = u(rng);
  }
  return out;
}

void BM_Evaluate(benchmark::State& state) {
  fuzzy::InferenceOptions opts;
  opts.defuzzifier = static_cast<fuzzy::Defuzzifier>(state.range(0));
  const auto fis = fuzzy::InferenceSystem(fuzzy::default_registry(),
                                          rules::load_rule_base(fuzzy::default_rule_text(), fuzzy::default_registry()),
                                          opts);
  const auto inputs = random_inputs(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fis.evaluate(inputs[i++ & 1023]));
  }
  state.SetLabel(std::string(fuzzy::defuzzifier_name(opts.defuzzifier)));
}
BENCHMARK(BM_Evaluate)
    ->Arg(static_cast<int>(fuzzy::Defuzzifier::most_severe_maximum))
    ->Arg(static_cast<int>(fuzzy::Defuzzifier::centroid));

void BM_Centroid(benchmark::State& state) {
  const auto& out = fuzzy::assistance_variable();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> h(0.05, 1.0);
  std::vector<fuzzy::OutputFuzzySet> sets(256);
  for (auto& s : sets) {
    for (std::size_t l = 0; l < out.size(); ++l) s.merge(l, h(rng));
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fuzzy::defuzzify_centroid(sets[i++ & 255], out));
}
BENCHMARK(BM_Centroid);

void BM_ParseRules(benchmark::State& state) {
  const std::string text(fuzzy::default_rule_text());
  for (auto _ : state) benchmark::DoNotOptimize(rules::parse_rules(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseRules);

void BM_ReplayTranscript(benchmark::State& state) {
  const auto sup = supervisor::Supervisor::with_defaults();
  const auto scen = std::make_shared<const scenario::ScenarioDefinition>(
      scenario::load_scenario_file(asset("scenarios/chest_pain.json")));
  const auto events = supervisor::load_transcript(asset("transcripts/chest_pain_escalation.jsonl"));
  for (auto _ : state) benchmark::DoNotOptimize(supervisor::replay_events(sup, scen, events));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * events.size()));
}
BENCHMARK(BM_ReplayTranscript);

}  // namespace
BENCHMARK_MAIN();
