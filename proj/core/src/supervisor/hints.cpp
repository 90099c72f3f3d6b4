#include "fsup/supervisor/hints.hpp"

#include "fsup/error.hpp"

namespace fsup::supervisor {

std::optional<std::string> severity_band(std::string_view label) {
  if (label == "High" || label == "VeryHigh" || label == "Highest") return std::string(label);
  return std::nullopt;
}

Criterion deficient_criterion(const CriterionScores& scores) {
  Criterion best = kCriteria.front();
  for (auto c : kCriteria) {
    if (scores.get(c) < scores.get(best)) best = c;
  }
  return best;
}

std::string_view default_hint_template(Criterion c, std::string_view band) {
  int b = band == "High" ? 0 : band == "VeryHigh" ? 1 : band == "Highest" ? 2 : -1;
  if (b < 0) throw ValidationError("unknown hint band '" + std::string(band) + "'");
  switch (c) {
    case Criterion::ethical_behavior: {
      static constexpr std::string_view t[] = {
          "Pause and check that this step is safe and appropriate for {patient_name} right now.",
          "Before proceeding, ensure you have explained the procedure and obtained the patient's consent.",
          "Stop. This action could harm the patient. Review the indications, the risks and consent before going "
          "further."};
      return t[b];
    }
    case Criterion::professionalism: {
      static constexpr std::string_view t[] = {
          "Keep your tone respectful and professional with the patient.",
          "Your wording may come across as disrespectful. Rephrase and acknowledge the patient's concerns.",
          "This language is not acceptable in a clinical encounter. Apologize and reset the conversation."};
      return t[b];
    }
    case Criterion::medical_relevance: {
      static constexpr std::string_view t[] = {
          "Consider focusing your questions on {focus}.",
          "Your recent questions are drifting away from the {chief_complaint}. Go back to the history of the "
          "presenting complaint.",
          "These questions are unrelated to the case. Refocus on {focus}."};
      return t[b];
    }
    case Criterion::contextual_distraction: {
      static constexpr std::string_view t[] = {
          "Several recent questions were off topic. Bring the conversation back to the {chief_complaint}.",
          "Repeated off-topic questions are slowing the encounter. Decide what you need to know about the "
          "{chief_complaint} next.",
          "The conversation has lost focus. Summarize what you know so far and plan your next step for the "
          "{chief_complaint}."};
      return t[b];
    }
  }
  return {};
}

std::string fill_hint(std::string_view tmpl, const scenario::ScenarioDefinition& s) {
  const std::pair<std::string_view, const std::string*> slots[] = {
      {"{chief_complaint}", &s.chief_complaint}, {"{focus}", &s.focus}, {"{patient_name}", &s.patient.name}};
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    bool replaced = false;
    if (tmpl[pos] == '{') {
      for (const auto& [slot, value] : slots) {
        if (tmpl.substr(pos, slot.size()) == slot) {
          out += *value;
          pos += slot.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += tmpl[pos++];
  }
  return out;
}

Hint select_hint(Criterion deficient, std::string_view band, const scenario::ScenarioDefinition& s) {
  for (const auto& o : s.hint_overrides) {
    if (o.criterion == deficient && o.band == band) return {deficient, std::string(band), fill_hint(o.text, s)};
  }
  return {deficient, std::string(band), fill_hint(default_hint_template(deficient, band), s)};
}

}  // namespace fsup::supervisor
