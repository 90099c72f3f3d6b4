#include "fsup/criteria.hpp"

#include <cmath>
#include <string>

#include "fsup/error.hpp"

namespace fsup {

std::string_view criterion_key(Criterion c) {
  switch (c) {
    case Criterion::professionalism: return "professionalism";
    case Criterion::medical_relevance: return "medical_relevance";
    case Criterion::ethical_behavior: return "ethical_behavior";
    case Criterion::contextual_distraction: return "contextual_distraction";
  }
  return {};
}

std::string_view criterion_variable(Criterion c) {
  switch (c) {
    case Criterion::professionalism: return "Professionalism";
    case Criterion::medical_relevance: return "MedicalRelevance";
    case Criterion::ethical_behavior: return "EthicalBehavior";
    case Criterion::contextual_distraction: return "ContextualDistraction";
  }
  return {};
}

std::string_view criterion_display(Criterion c) {
  switch (c) {
    case Criterion::professionalism: return "Professionalism";
    case Criterion::medical_relevance: return "Medical Relevance";
    case Criterion::ethical_behavior: return "Ethical Behavior";
    case Criterion::contextual_distraction: return "Contextual Distraction";
  }
  return {};
}

std::optional<Criterion> criterion_from_key(std::string_view key) {
  for (Criterion c : kCriteria) {
    if (criterion_key(c) == key) return c;
  }
  return std::nullopt;
}

std::string_view provenance_name(Provenance p) {
  return p == Provenance::external ? "external" : "heuristic";
}

double CriterionScores::get(Criterion c) const {
  switch (c) {
    case Criterion::professionalism: return professionalism;
    case Criterion::medical_relevance: return medical_relevance;
    case Criterion::ethical_behavior: return ethical_behavior;
    case Criterion::contextual_distraction: return contextual_distraction;
  }
  return 0.0;
}

void CriterionScores::set(Criterion c, double value) {
  switch (c) {
    case Criterion::professionalism: professionalism = value; break;
    case Criterion::medical_relevance: medical_relevance = value; break;
    case Criterion::ethical_behavior: ethical_behavior = value; break;
    case Criterion::contextual_distraction: contextual_distraction = value; break;
  }
}

void check_scores(const CriterionScores& scores) {
  for (Criterion c : kCriteria) {
    const double v = scores.get(c);
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw DomainError(std::string(criterion_key(c)) + " score " + std::to_string(v) + " outside [0,1]");
    }
  }
}

}  // namespace fsup
