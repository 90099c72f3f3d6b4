#include "fsup/scoring/scorer.hpp"

namespace fsup::scoring {

CriterionScores EventScorer::score(std::string_view session_id, const scenario::StudentEvent& e,
                                   const ScoringContext& ctx, const scenario::ScenarioDefinition& s,
                                   const scenario::AgentState& state) const {
  if (client_ && !is_content_free(e, s)) {
    ClassifierRequest req;
    req.session_id = std::string(session_id);
    req.text = e.action ? *e.action + (e.text.empty() ? "" : ": " + e.text) : e.text;
    req.target_agent = std::string(scenario::role_name(e.target));
    req.context = ctx.excerpt;
    try {
      if (auto res = client_->score(req)) return res->scores;
    } catch (...) {
      // Clients are not supposed to throw; fall back regardless.
    }
  }
  return heuristic_scores(e, ctx, s, state, cfg_);
}

}  // namespace fsup::scoring
