#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fsup/criteria.hpp"
#include "fsup/scenario/scenario.hpp"

namespace fsup::supervisor {

/// Intervening assistance labels; anything below High has no band.
std::optional<std::string> severity_band(std::string_view assistance_label);

/// Lowest score; exact ties resolved in kCriteria order (ethics first).
Criterion deficient_criterion(const CriterionScores& scores);

/// Built-in template for a criterion and band. Throws ValidationError for an
/// unknown band.
std::string_view default_hint_template(Criterion c, std::string_view band);

/// Replaces {chief_complaint}, {focus} and {patient_name}; other braces stay.
std::string fill_hint(std::string_view tmpl, const scenario::ScenarioDefinition& s);

struct Hint {
  Criterion criterion;
  std::string band;
  std::string text;
};

/// Scenario override for (criterion, band) when present, else the default.
Hint select_hint(Criterion deficient, std::string_view band, const scenario::ScenarioDefinition& s);

}  // namespace fsup::supervisor
