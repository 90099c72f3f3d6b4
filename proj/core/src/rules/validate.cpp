#include <algorithm>
#include <map>

#include "fsup/rules/parser.hpp"

namespace fsup::rules {

namespace {

// Key that ignores operand order, so "A AND B" and "B AND A" collide.
std::string canonical_key(const Expr& e) {
  if (e.kind == Expr::Kind::atom) return e.variable + "=" + e.label;
  std::vector<std::string> keys;
  keys.reserve(e.children.size());
  for (const auto& c : e.children) keys.push_back(canonical_key(c));
  std::sort(keys.begin(), keys.end());
  std::string out = e.kind == Expr::Kind::all_of ? "and(" : "or(";
  for (const auto& k : keys) out += k + ",";
  return out + ")";
}

Diagnostic error_at(SourceLocation loc, int rule_id, std::string message) {
  return {Severity::error, std::move(message), loc.line, loc.column, rule_id};
}

}  // namespace

std::vector<Diagnostic> validate(const RuleBase& rules, const fuzzy::VariableRegistry& registry) {
  std::vector<Diagnostic> out;
  const auto& output = registry.output();

  for (const auto& rule : rules.rules()) {
    for (const Expr* atom : atoms_of(rule.antecedent)) {
      const auto* var = registry.find(atom->variable);
      if (!var) {
        out.push_back(error_at(atom->location, rule.id, "unknown variable '" + atom->variable + "'"));
      } else if (registry.is_output(atom->variable)) {
        out.push_back(
            error_at(atom->location, rule.id, "condition on output variable '" + atom->variable + "'"));
      } else if (!var->index_of(atom->label)) {
        out.push_back(error_at(atom->location, rule.id,
                               "unknown label '" + atom->label + "' for variable " + atom->variable));
      }
    }
    const auto& cons = rule.consequent;
    const auto* var = registry.find(cons.variable);
    if (!var) {
      out.push_back(error_at(cons.location, rule.id, "unknown variable '" + cons.variable + "'"));
    } else if (!registry.is_output(cons.variable)) {
      out.push_back(error_at(cons.location, rule.id, "consequent must target output variable " + output.name() +
                                                          ", not " + cons.variable));
    } else if (!var->index_of(cons.label)) {
      out.push_back(
          error_at(cons.location, rule.id, "unknown label '" + cons.label + "' for variable " + cons.variable));
    }
  }

  std::map<std::string, const Rule*> first_by_antecedent;
  for (const auto& rule : rules.rules()) {
    const auto [it, inserted] = first_by_antecedent.emplace(canonical_key(rule.antecedent), &rule);
    if (inserted) continue;
    const Rule& earlier = *it->second;
    std::string message;
    if (earlier.consequent.variable == rule.consequent.variable && earlier.consequent.label == rule.consequent.label) {
      message = "rule " + std::to_string(rule.id) + " repeats rule " + std::to_string(earlier.id) +
                " and is shadowed by it";
    } else {
      message = "rule " + std::to_string(rule.id) + " has the same antecedent as rule " + std::to_string(earlier.id) +
                " but concludes " + rule.consequent.label + " instead of " + earlier.consequent.label;
    }
    out.push_back({Severity::warning, std::move(message), rule.location.line, rule.location.column, rule.id});
  }
  return out;
}

RuleBase load_rule_base(std::string_view text, const fuzzy::VariableRegistry& registry,
                        std::vector<Diagnostic>* warnings) {
  auto parsed = parse_rules(text);
  if (!parsed.ok()) throw RuleBaseError("rule file has syntax errors", std::move(parsed.diagnostics));
  auto diagnostics = validate(*parsed.rule_base, registry);
  if (has_errors(diagnostics)) throw RuleBaseError("rule base failed validation", std::move(diagnostics));
  if (warnings) warnings->insert(warnings->end(), diagnostics.begin(), diagnostics.end());
  return std::move(*parsed.rule_base);
}

}  // namespace fsup::rules
