#include "fsup/scoring/heuristics.hpp"

#include <algorithm>

#include "fsup/text.hpp"

namespace fsup::scoring {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

bool has_tokens(std::string_view text) { return !tokenize(text).empty(); }

}  // namespace

double relevance_score(std::string_view text, const std::vector<std::string>& keywords, const ScoringConfig& cfg) {
  const auto tokens = token_set(text);
  const auto keys = token_set(keywords);
  if (tokens.empty() || keys.empty()) return cfg.empty_relevance;
  std::size_t overlap = 0;
  for (const auto& t : tokens) overlap += keys.count(t);
  const auto denom = std::max<std::size_t>(1, std::min(tokens.size(), cfg.keyword_cap));
  const double ratio = static_cast<double>(overlap) / static_cast<double>(denom);
  return clamp01(ratio / cfg.saturation);
}

double professionalism_score(std::string_view text, const std::vector<scenario::LexiconEntry>& lexicon) {
  const auto tokens = tokenize(text);
  double worst = 0.0;
  for (const auto& entry : lexicon) {
    if (contains_phrase(tokens, tokenize(entry.term))) worst = std::max(worst, entry.severity);
  }
  return clamp01(1.0 - worst);
}

double ethics_score(const scenario::StudentEvent& e, const scenario::ScenarioDefinition& s,
                    const scenario::AgentState& state) {
  const auto tokens = tokenize(e.text);
  double score = 1.0;
  for (const auto& p : s.danger_patterns) {
    if (contains_phrase(tokens, tokenize(p.term))) score = std::min(score, p.score);
  }
  if (e.target == scenario::AgentRole::intervention) {
    if (const auto item = scenario::resolve_item(s, e)) {
      const auto& iv = s.interventions[item->index];
      if (iv.always_ethics) {
        score = std::min(score, *iv.always_ethics);
      } else if (!scenario::missing_prerequisites(iv, state).empty()) {
        score = std::min(score, iv.unmet_ethics);
      }
    }
  }
  return clamp01(score);
}

double distraction_score(double relevance, const ScoringContext& ctx, const ScoringConfig& cfg) {
  const std::size_t n = std::min(ctx.window.size(), cfg.window);
  std::size_t off_task = 0;
  for (auto it = ctx.window.end() - static_cast<std::ptrdiff_t>(n); it != ctx.window.end(); ++it) {
    if (*it < cfg.off_topic_threshold) ++off_task;
  }
  return clamp01(relevance - cfg.off_topic_penalty * static_cast<double>(off_task));
}

double event_relevance(const scenario::StudentEvent& e, const scenario::ScenarioDefinition& s,
                       const ScoringConfig& cfg) {
  if (e.target != scenario::AgentRole::patient) {
    if (const auto item = scenario::resolve_item(s, e)) {
      switch (e.target) {
        case scenario::AgentRole::exam: return s.exams[item->index].relevance;
        case scenario::AgentRole::diagnostic: return s.tests[item->index].relevance;
        case scenario::AgentRole::intervention: return s.interventions[item->index].relevance;
        case scenario::AgentRole::patient: break;
      }
    }
  }
  return relevance_score(e.text, s.relevance_keywords(), cfg);
}

bool is_content_free(const scenario::StudentEvent& e, const scenario::ScenarioDefinition& s) {
  return !has_tokens(e.text) && !scenario::resolve_item(s, e);
}

CriterionScores heuristic_scores(const scenario::StudentEvent& e, const ScoringContext& ctx,
                                 const scenario::ScenarioDefinition& s, const scenario::AgentState& state,
                                 const ScoringConfig& cfg) {
  CriterionScores out;
  out.provenance = Provenance::heuristic;
  if (is_content_free(e, s)) {
    out.medical_relevance = cfg.empty_relevance;
    return out;
  }
  out.medical_relevance = event_relevance(e, s, cfg);
  out.professionalism = professionalism_score(e.text, s.professionalism_lexicon);
  out.ethical_behavior = ethics_score(e, s, state);
  out.contextual_distraction = distraction_score(out.medical_relevance, ctx, cfg);
  return out;
}

}  // namespace fsup::scoring
