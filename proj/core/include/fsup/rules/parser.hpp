#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsup/error.hpp"
#include "fsup/fuzzy/variable.hpp"
#include "fsup/rules/ast.hpp"

namespace fsup::rules {

struct ParseResult {
  std::optional<RuleBase> rule_base;  // present iff no error diagnostics
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return rule_base.has_value(); }
};

/// Grammar, one rule per line, `#` comments to end of line:
///
///   rule  := "IF" expr "THEN" ident "IS" label [";"]
///   expr  := conj { "OR" conj }
///   conj  := atom { "AND" atom }
///   atom  := ident "IS" label { "OR" label } | "(" expr ")"
///   label := ident | quoted-string
///
/// Keywords are case-insensitive. `X IS A OR B` expands to `X IS A OR X IS B`.
/// Parsing recovers at the next line, so one pass reports every bad rule.
ParseResult parse_rules(std::string_view text);

/// Canonical text: one rule per line, AND groups parenthesized under OR,
/// labels quoted only when they are not plain identifiers.
std::string pretty_print(const RuleBase& rules);
std::string print_rule(const Rule& rule);
std::string print_expr(const Expr& expr);

/// Errors: unknown variable or label, antecedent on the output variable,
/// consequent on an input variable. Warnings: two rules with the same
/// antecedent (up to AND/OR operand order) and different consequents, or
/// fully identical rules.
std::vector<Diagnostic> validate(const RuleBase& rules, const fuzzy::VariableRegistry& registry);

/// Thrown when a rule base cannot be activated; carries every diagnostic.
class RuleBaseError : public Error {
 public:
  RuleBaseError(std::string what, std::vector<Diagnostic> diagnostics)
      : Error(std::move(what)), diagnostics_(std::move(diagnostics)) {}
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// parse_rules + validate; throws RuleBaseError on any error diagnostic.
/// Warnings are appended to `warnings` when given.
RuleBase load_rule_base(std::string_view text, const fuzzy::VariableRegistry& registry,
                        std::vector<Diagnostic>* warnings = nullptr);

}  // namespace fsup::rules
