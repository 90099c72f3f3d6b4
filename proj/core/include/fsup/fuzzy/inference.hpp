#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsup/criteria.hpp"
#include "fsup/error.hpp"
#include "fsup/fuzzy/variable.hpp"
#include "fsup/rules/ast.hpp"

namespace fsup::fuzzy {

/// Thrown when a rule names a variable or label that the environment lacks.
class RuleEvaluationError : public Error {
 public:
  using Error::Error;
};

/// Thrown by defuzzifiers for an empty output set.
class NoRuleFired : public Error {
 public:
  NoRuleFired() : Error("no rule fired") {}
};

/// Fuzzified inputs: variable -> (label -> degree).
class FuzzyEnvironment {
 public:
  FuzzyEnvironment() = default;
  explicit FuzzyEnvironment(std::map<std::string, std::map<std::string, double, std::less<>>, std::less<>> degrees)
      : degrees_(std::move(degrees)) {}

  /// Fuzzifies x against var and stores the result under var.name().
  void set(const LinguisticVariable& var, double x);
  double degree(std::string_view variable, std::string_view label) const;

 private:
  std::map<std::string, std::map<std::string, double, std::less<>>, std::less<>> degrees_;
};

/// AND = min, OR = max over the antecedent tree.
double expression_activation(const rules::Expr& expr, const FuzzyEnvironment& env);
double rule_activation(const rules::Rule& rule, const FuzzyEnvironment& env);

/// Clip heights per output label after min-implication, max-merged.
class OutputFuzzySet {
 public:
  struct Entry {
    std::size_t label;  // index into the output variable
    double height;      // (0,1]
  };

  /// Keeps the larger height when the label is already present; ignores height <= 0.
  void merge(std::size_t label, double height);
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  double height_of(std::size_t label) const;

  /// Pointwise max over the clipped label functions.
  double aggregate(const LinguisticVariable& out, double y) const;

 private:
  std::vector<Entry> entries_;  // sorted by label index
};

/// Area centroid of the aggregate, integrated exactly over its linear pieces.
/// Throws NoRuleFired on an empty set.
double defuzzify_centroid(const OutputFuzzySet& set, const LinguisticVariable& out);

/// Picks the most severe label among those at the set's maximal height and
/// returns the midpoint of that label's clipped plateau. The result always
/// classifies to that label. Throws NoRuleFired on an empty set.
double defuzzify_most_severe_maximum(const OutputFuzzySet& set, const LinguisticVariable& out);

/// Argmax label membership at crisp; exact ties go to the lower index.
std::size_t classify(const LinguisticVariable& out, double crisp);

enum class Defuzzifier { most_severe_maximum, centroid };

std::string_view defuzzifier_name(Defuzzifier d);
/// Accepts "centroid" or "most-severe-maximum"; throws ConfigError otherwise.
Defuzzifier parse_defuzzifier(std::string_view name);

struct InferenceOptions {
  Defuzzifier defuzzifier = Defuzzifier::most_severe_maximum;
  /// Output label reported when no rule fires; crisp = its center.
  std::string fallback_label = "Low";
  /// Lowest output label that triggers an intervention.
  std::string intervention_label = "High";
};

struct Activation {
  int rule_id;
  double strength;

  bool operator==(const Activation&) const = default;
};

struct InferenceResult {
  OutputFuzzySet set;
  std::vector<Activation> fired;  // strength > 0 only, rule order
};

struct AssistanceDecision {
  double crisp = 0.0;
  std::string label;
  std::size_t label_index = 0;
  bool intervene = false;
  bool fallback = false;  // no rule fired
  std::vector<Activation> fired;
  CriterionScores inputs;

  bool operator==(const AssistanceDecision&) const = default;
};

/// A validated rule base bound to its variable registry. Immutable and safe
/// to share across threads.
class InferenceSystem {
 public:
  /// Throws rules::RuleBaseError when validation reports errors, ConfigError
  /// when the registry lacks a criterion variable or an option names an
  /// unknown output label.
  InferenceSystem(VariableRegistry registry, rules::RuleBase rules, InferenceOptions options = {});

  /// Default registry and the bundled rule base.
  static InferenceSystem with_defaults(InferenceOptions options = {});

  const VariableRegistry& registry() const { return registry_; }
  const rules::RuleBase& rules() const { return rules_; }
  const InferenceOptions& options() const { return options_; }
  const std::vector<rules::Diagnostic>& warnings() const { return warnings_; }

  FuzzyEnvironment fuzzify_inputs(const CriterionScores& inputs) const;
  /// Throws DomainError for inputs outside [0,1].
  InferenceResult infer(const CriterionScores& inputs) const;
  AssistanceDecision evaluate(const CriterionScores& inputs) const;

  bool is_intervention(std::size_t output_label) const { return output_label >= intervention_index_; }

 private:
  VariableRegistry registry_;
  rules::RuleBase rules_;
  InferenceOptions options_;
  std::vector<rules::Diagnostic> warnings_;
  std::size_t fallback_index_ = 0;
  std::size_t intervention_index_ = 0;
};

}  // namespace fsup::fuzzy
