#pragma once

#include <memory>
#include <string_view>

#include "fsup/scoring/classifier.hpp"
#include "fsup/scoring/heuristics.hpp"

namespace fsup::scoring {

/// Uses the external classifier when one is configured and answers, else the
/// heuristics. Never throws for scoring failures.
class EventScorer {
 public:
  explicit EventScorer(ScoringConfig cfg = {}, std::shared_ptr<ClassifierClient> client = nullptr)
      : cfg_(cfg), client_(std::move(client)) {}

  const ScoringConfig& config() const { return cfg_; }
  bool has_classifier() const { return client_ != nullptr; }

  CriterionScores score(std::string_view session_id, const scenario::StudentEvent& e, const ScoringContext& ctx,
                        const scenario::ScenarioDefinition& s, const scenario::AgentState& state) const;

 private:
  ScoringConfig cfg_;
  std::shared_ptr<ClassifierClient> client_;
};

}  // namespace fsup::scoring
