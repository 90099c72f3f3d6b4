#include "fsup/fuzzy/defaults.hpp"

namespace fsup::fuzzy {

LinguisticVariable professionalism_variable() {
  return LinguisticVariable::uniform("Professionalism", {{"Unprofessional", "Unprofessional"},
                                                         {"Borderline", "Borderline"},
                                                         {"Appropriate", "Appropriate"}});
}

LinguisticVariable medical_relevance_variable() {
  return LinguisticVariable::uniform("MedicalRelevance", {{"Irrelevant", "Irrelevant"},
                                                          {"PartiallyRelevant", "Partially relevant"},
                                                          {"Relevant", "Relevant"}});
}

LinguisticVariable ethical_behavior_variable() {
  return LinguisticVariable::uniform("EthicalBehavior", {{"Dangerous", "Dangerous"},
                                                         {"Unsafe", "Unsafe"},
                                                         {"Questionable", "Questionable"},
                                                         {"MostlySafe", "Mostly safe"},
                                                         {"Safe", "Safe"}});
}

LinguisticVariable contextual_distraction_variable() {
  return LinguisticVariable::uniform("ContextualDistraction", {{"HighlyDistracting", "Highly distracting"},
                                                               {"ModeratelyDistracting", "Moderately distracting"},
                                                               {"Questionable", "Questionable"},
                                                               {"NotDistracting", "Not distracting"}});
}

LinguisticVariable assistance_variable() {
  return LinguisticVariable::uniform(std::string(kAssistanceVariable), {{"Minimal", "Minimal"},
                                                                        {"Low", "Low"},
                                                                        {"Medium", "Medium"},
                                                                        {"High", "High"},
                                                                        {"VeryHigh", "Very High"},
                                                                        {"Highest", "Highest"}});
}

VariableRegistry default_registry() {
  return VariableRegistry({professionalism_variable(), medical_relevance_variable(), ethical_behavior_variable(),
                           contextual_distraction_variable()},
                          assistance_variable());
}

}  // namespace fsup::fuzzy
