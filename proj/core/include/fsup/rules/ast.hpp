#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace fsup::rules {

struct SourceLocation {
  int line = 0;
  int column = 0;
};

/// Antecedent tree. Atoms compare a variable with a label; all_of/any_of
/// nodes hold two or more children and never a child of their own kind.
struct Expr {
  enum class Kind { atom, all_of, any_of };

  Kind kind = Kind::atom;
  std::string variable;
  std::string label;
  std::vector<Expr> children;
  SourceLocation location;

  static Expr atom(std::string variable, std::string label, SourceLocation loc = {});
  /// Builds an all_of/any_of node, flattening same-kind children; a single
  /// child is returned unchanged.
  static Expr combine(Kind kind, std::vector<Expr> children);
};

/// Equality ignoring source locations.
bool structurally_equal(const Expr& a, const Expr& b);

/// Atoms of the tree in left-to-right order.
std::vector<const Expr*> atoms_of(const Expr& e);

struct Consequent {
  std::string variable;
  std::string label;
  SourceLocation location;
};

struct Rule {
  int id = 0;  // 1-based position in the source file
  Expr antecedent;
  Consequent consequent;
  SourceLocation location;
};

bool structurally_equal(const Rule& a, const Rule& b);

/// Immutable ordered rule list plus a SHA-256 digest of its canonical text.
class RuleBase {
 public:
  /// Throws ConfigError when `rules` is empty.
  explicit RuleBase(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  const Rule* find(int id) const;
  const std::string& source_hash() const { return hash_; }

 private:
  std::vector<Rule> rules_;
  std::string hash_;
};

bool structurally_equal(const RuleBase& a, const RuleBase& b);

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string message;
  int line = 0;
  int column = 0;
  std::optional<int> rule_id;
};

/// "file:line:col: error: message"
std::string format_diagnostic(const Diagnostic& d, std::string_view source_name = "<rules>");
bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace fsup::rules
