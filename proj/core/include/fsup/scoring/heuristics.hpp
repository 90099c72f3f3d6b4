#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fsup/criteria.hpp"
#include "fsup/scenario/agents.hpp"
#include "fsup/scenario/scenario.hpp"

namespace fsup::scoring {

struct ScoringConfig {
  std::size_t window = 10;             // prior events considered for distraction
  double off_topic_threshold = 0.25;   // relevance below this counts as off-task
  double off_topic_penalty = 0.15;     // per off-task event in the window
  std::size_t keyword_cap = 4;         // overlap denominator is min(|tokens|, cap)
  double saturation = 0.5;             // overlap ratio that already scores 1.0
  double empty_relevance = 0.5;        // relevance for content-free events
};

/// What the scorer may know about the session besides the event itself.
struct ScoringContext {
  std::vector<double> window;         // relevance of prior events, oldest first, at most cfg.window
  double elapsed_seconds = 0.0;       // since the previous event, 0 for the first
  std::vector<std::string> excerpt;   // recent student texts, oldest first
};

/// Token overlap with the keyword list through a saturating ramp. An empty
/// keyword list or token-free text yields cfg.empty_relevance.
double relevance_score(std::string_view text, const std::vector<std::string>& keywords,
                       const ScoringConfig& cfg = {});

/// 1 - max severity of matched lexicon phrases.
double professionalism_score(std::string_view text, const std::vector<scenario::LexiconEntry>& lexicon);

/// Conversation: lowest matched danger-pattern score, else 1. Interventions
/// also take always_ethics, or unmet_ethics while a prerequisite is missing.
/// `state` must be the agent state before the event is routed.
double ethics_score(const scenario::StudentEvent& e, const scenario::ScenarioDefinition& s,
                    const scenario::AgentState& state);

/// relevance - penalty * (off-task events among the last cfg.window), clamped.
double distraction_score(double relevance, const ScoringContext& ctx, const ScoringConfig& cfg = {});

/// Relevance for an event: catalog relevance for a resolved structured item,
/// otherwise the text heuristic against the scenario's keywords.
double event_relevance(const scenario::StudentEvent& e, const scenario::ScenarioDefinition& s,
                       const ScoringConfig& cfg = {});

/// True when the event carries no text and names no catalog item.
bool is_content_free(const scenario::StudentEvent& e, const scenario::ScenarioDefinition& s);

CriterionScores heuristic_scores(const scenario::StudentEvent& e, const ScoringContext& ctx,
                                 const scenario::ScenarioDefinition& s, const scenario::AgentState& state,
                                 const ScoringConfig& cfg = {});

}  // namespace fsup::scoring
