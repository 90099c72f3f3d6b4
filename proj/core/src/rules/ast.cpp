#include "fsup/rules/ast.hpp"

#include <openssl/evp.h>

#include <cstdio>

#include "fsup/error.hpp"
#include "fsup/rules/parser.hpp"

namespace fsup::rules {

Expr Expr::atom(std::string variable, std::string label, SourceLocation loc) {
  Expr e;
  e.kind = Kind::atom;
  e.variable = std::move(variable);
  e.label = std::move(label);
  e.location = loc;
  return e;
}

Expr Expr::combine(Kind kind, std::vector<Expr> children) {
  if (children.size() == 1) return std::move(children.front());
  Expr e;
  e.kind = kind;
  if (!children.empty()) e.location = children.front().location;
  for (auto& c : children) {
    if (c.kind == kind) {
      for (auto& grandchild : c.children) e.children.push_back(std::move(grandchild));
    } else {
      e.children.push_back(std::move(c));
    }
  }
  return e;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Expr::Kind::atom) return a.variable == b.variable && a.label == b.label;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  }
  return true;
}

namespace {

void collect_atoms(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::atom) {
    out.push_back(&e);
    return;
  }
  for (const auto& c : e.children) collect_atoms(c, out);
}

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace

std::vector<const Expr*> atoms_of(const Expr& e) {
  std::vector<const Expr*> out;
  collect_atoms(e, out);
  return out;
}

bool structurally_equal(const Rule& a, const Rule& b) {
  return a.id == b.id && a.consequent.variable == b.consequent.variable && a.consequent.label == b.consequent.label &&
         structurally_equal(a.antecedent, b.antecedent);
}

RuleBase::RuleBase(std::vector<Rule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) throw ConfigError("a rule base needs at least one rule");
  hash_ = sha256_hex(pretty_print(*this));
}

const Rule* RuleBase::find(int id) const {
  for (const auto& r : rules_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

bool structurally_equal(const RuleBase& a, const RuleBase& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!structurally_equal(a.rules()[i], b.rules()[i])) return false;
  }
  return true;
}

std::string format_diagnostic(const Diagnostic& d, std::string_view source_name) {
  std::string out(source_name);
  out += ':' + std::to_string(d.line) + ':' + std::to_string(d.column) + ": ";
  out += d.severity == Severity::error ? "error: " : "warning: ";
  out += d.message;
  if (d.rule_id) out += " [rule " + std::to_string(*d.rule_id) + "]";
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::error) return true;
  }
  return false;
}

}  // namespace fsup::rules
