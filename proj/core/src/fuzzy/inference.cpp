#include "fsup/fuzzy/inference.hpp"

#include <algorithm>
#include <cmath>

#include "fsup/fuzzy/defaults.hpp"
#include "fsup/rules/parser.hpp"

namespace fsup::fuzzy {

void FuzzyEnvironment::set(const LinguisticVariable& var, double x) {
  const auto degrees = fuzzify(var, x);
  auto& slot = degrees_[var.name()];
  slot.clear();
  for (std::size_t i = 0; i < var.size(); ++i) slot[var.label(i).name] = degrees[i];
}

double FuzzyEnvironment::degree(std::string_view variable, std::string_view label) const {
  const auto var = degrees_.find(variable);
  if (var == degrees_.end()) throw RuleEvaluationError("unknown variable '" + std::string(variable) + "'");
  const auto lab = var->second.find(label);
  if (lab == var->second.end()) {
    throw RuleEvaluationError("unknown label '" + std::string(label) + "' for " + std::string(variable));
  }
  return lab->second;
}

double expression_activation(const rules::Expr& expr, const FuzzyEnvironment& env) {
  using Kind = rules::Expr::Kind;
  if (expr.kind == Kind::atom) return env.degree(expr.variable, expr.label);
  double acc = expr.kind == Kind::all_of ? 1.0 : 0.0;
  for (const auto& child : expr.children) {
    const double v = expression_activation(child, env);
    acc = expr.kind == Kind::all_of ? std::min(acc, v) : std::max(acc, v);
  }
  return acc;
}

double rule_activation(const rules::Rule& rule, const FuzzyEnvironment& env) {
  return expression_activation(rule.antecedent, env);
}

void OutputFuzzySet::merge(std::size_t label, double height) {
  if (!(height > 0.0)) return;
  height = std::min(height, 1.0);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), label,
                             [](const Entry& e, std::size_t l) { return e.label < l; });
  if (it != entries_.end() && it->label == label) {
    it->height = std::max(it->height, height);
  } else {
    entries_.insert(it, Entry{label, height});
  }
}

double OutputFuzzySet::height_of(std::size_t label) const {
  for (const auto& e : entries_) {
    if (e.label == label) return e.height;
  }
  return 0.0;
}

double OutputFuzzySet::aggregate(const LinguisticVariable& out, double y) const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::min(e.height, out.label(e.label).mf.degree(y)));
  return m;
}

double defuzzify_centroid(const OutputFuzzySet& set, const LinguisticVariable& out) {
  if (set.empty()) throw NoRuleFired();

  // Every clipped label function is linear between these points.
  std::vector<double> xs{0.0, 1.0};
  for (const auto& e : set.entries()) {
    const auto& mf = out.label(e.label).mf;
    for (const auto& k : mf.knots()) xs.push_back(k.x);
    const auto cut = mf.alpha_cut(e.height);
    xs.push_back(cut.lo);
    xs.push_back(cut.hi);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto clipped = [&](const OutputFuzzySet::Entry& e, double y) {
    return std::min(e.height, out.label(e.label).mf.degree(y));
  };

  // Add the crossings between pairs of functions so the envelope is linear
  // on every sub-interval.
  std::vector<double> points = xs;
  const auto& entries = set.entries();
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double a = xs[k];
    const double b = xs[k + 1];
    for (std::size_t i = 0; i < entries.size(); ++i) {
      for (std::size_t j = i + 1; j < entries.size(); ++j) {
        const double da = clipped(entries[i], a) - clipped(entries[j], a);
        const double db = clipped(entries[i], b) - clipped(entries[j], b);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
          points.push_back(a + (b - a) * da / (da - db));
        }
      }
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  double area = 0.0;
  double moment = 0.0;
  double fa = set.aggregate(out, points.front());
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const double a = points[k];
    const double b = points[k + 1];
    const double fb = set.aggregate(out, b);
    const double w = b - a;
    area += 0.5 * (fa + fb) * w;
    moment += w * (a * (2.0 * fa + fb) + b * (fa + 2.0 * fb)) / 6.0;
    fa = fb;
  }
  if (!(area > 0.0)) throw NoRuleFired();
  return std::clamp(moment / area, 0.0, 1.0);
}

double defuzzify_most_severe_maximum(const OutputFuzzySet& set, const LinguisticVariable& out) {
  if (set.empty()) throw NoRuleFired();
  double top = 0.0;
  for (const auto& e : set.entries()) top = std::max(top, e.height);
  std::size_t chosen = 0;
  for (const auto& e : set.entries()) {
    if (e.height == top) chosen = std::max(chosen, e.label);
  }
  const auto cut = out.label(chosen).mf.alpha_cut(top);
  return 0.5 * (cut.lo + cut.hi);
}

std::size_t classify(const LinguisticVariable& out, double crisp) {
  std::size_t best = 0;
  double best_degree = -1.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = out.label(i).mf.degree(crisp);
    if (d > best_degree) {
      best = i;
      best_degree = d;
    }
  }
  return best;
}

std::string_view defuzzifier_name(Defuzzifier d) {
  return d == Defuzzifier::centroid ? "centroid" : "most-severe-maximum";
}

Defuzzifier parse_defuzzifier(std::string_view name) {
  if (name == "centroid") return Defuzzifier::centroid;
  if (name == "most-severe-maximum") return Defuzzifier::most_severe_maximum;
  throw ConfigError("unknown defuzzifier '" + std::string(name) + "'");
}

InferenceSystem::InferenceSystem(VariableRegistry registry, rules::RuleBase rules, InferenceOptions options)
    : registry_(std::move(registry)), rules_(std::move(rules)), options_(std::move(options)) {
  for (Criterion c : kCriteria) {
    const auto* var = registry_.find(criterion_variable(c));
    if (!var || registry_.is_output(var->name())) {
      throw ConfigError("registry lacks input variable " + std::string(criterion_variable(c)));
    }
  }
  auto diagnostics = rules::validate(rules_, registry_);
  if (rules::has_errors(diagnostics)) throw rules::RuleBaseError("rule base failed validation", diagnostics);
  warnings_ = std::move(diagnostics);

  const auto& out = registry_.output();
  const auto fallback = out.index_of(options_.fallback_label);
  const auto intervention = out.index_of(options_.intervention_label);
  if (!fallback) throw ConfigError("unknown fallback label '" + options_.fallback_label + "'");
  if (!intervention) throw ConfigError("unknown intervention label '" + options_.intervention_label + "'");
  fallback_index_ = *fallback;
  intervention_index_ = *intervention;
}

InferenceSystem InferenceSystem::with_defaults(InferenceOptions options) {
  auto registry = default_registry();
  auto rules = rules::load_rule_base(default_rule_text(), registry);
  return InferenceSystem(std::move(registry), std::move(rules), std::move(options));
}

FuzzyEnvironment InferenceSystem::fuzzify_inputs(const CriterionScores& inputs) const {
  check_scores(inputs);
  FuzzyEnvironment env;
  for (Criterion c : kCriteria) env.set(*registry_.find(criterion_variable(c)), inputs.get(c));
  return env;
}

InferenceResult InferenceSystem::infer(const CriterionScores& inputs) const {
  const auto env = fuzzify_inputs(inputs);
  const auto& out = registry_.output();
  InferenceResult result;
  for (const auto& rule : rules_.rules()) {
    const double strength = rule_activation(rule, env);
    if (strength <= 0.0) continue;
    result.fired.push_back({rule.id, strength});
    result.set.merge(*out.index_of(rule.consequent.label), strength);
  }
  return result;
}

AssistanceDecision InferenceSystem::evaluate(const CriterionScores& inputs) const {
  auto result = infer(inputs);
  const auto& out = registry_.output();
  AssistanceDecision d;
  d.inputs = inputs;
  d.fired = std::move(result.fired);
  if (result.set.empty()) {
    d.fallback = true;
    d.label_index = fallback_index_;
    d.crisp = out.center(fallback_index_);
  } else {
    d.crisp = options_.defuzzifier == Defuzzifier::centroid ? defuzzify_centroid(result.set, out)
                                                            : defuzzify_most_severe_maximum(result.set, out);
    d.label_index = classify(out, d.crisp);
  }
  d.label = out.label(d.label_index).name;
  d.intervene = is_intervention(d.label_index);
  return d;
}

}  // namespace fsup::fuzzy
