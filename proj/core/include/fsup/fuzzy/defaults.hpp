#pragma once

#include <string_view>

#include "fsup/fuzzy/variable.hpp"

namespace fsup::fuzzy {

/// Professionalism, MedicalRelevance, EthicalBehavior, ContextualDistraction
/// and the Assistance output, each a uniform triangular partition of [0,1].
VariableRegistry default_registry();

LinguisticVariable professionalism_variable();
LinguisticVariable medical_relevance_variable();
LinguisticVariable ethical_behavior_variable();
LinguisticVariable contextual_distraction_variable();
/// Minimal, Low, Medium, High, VeryHigh, Highest at 0, 0.2, ..., 1.
LinguisticVariable assistance_variable();

inline constexpr std::string_view kAssistanceVariable = "Assistance";

/// Contents of rules/table1.frl, compiled into the library.
std::string_view default_rule_text();

}  // namespace fsup::fuzzy
