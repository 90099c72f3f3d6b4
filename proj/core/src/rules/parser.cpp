#include "fsup/rules/parser.hpp"

#include <algorithm>
#include <cctype>

namespace fsup::rules {

namespace {

enum class Tok { kw_if, kw_then, kw_is, kw_and, kw_or, ident, string, lparen, rparen, semicolon, newline, eof, bad };

struct Token {
  Tok type;
  std::string text;
  SourceLocation loc;
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    i += n;
    col += static_cast<int>(n);
  };
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    const SourceLocation loc{line, col};
    if (c == '\n') {
      out.push_back({Tok::newline, "\n", loc});
      ++i;
      ++line;
      col = 1;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
    } else if (c == '(') {
      out.push_back({Tok::lparen, "(", loc});
      advance(1);
    } else if (c == ')') {
      out.push_back({Tok::rparen, ")", loc});
      advance(1);
    } else if (c == ';') {
      out.push_back({Tok::semicolon, ";", loc});
      advance(1);
    } else if (c == '"') {
      std::string value;
      advance(1);
      bool closed = false;
      while (i < text.size() && text[i] != '\n') {
        if (text[i] == '\\' && i + 1 < text.size() && (text[i + 1] == '"' || text[i + 1] == '\\')) {
          value += text[i + 1];
          advance(2);
        } else if (text[i] == '"') {
          advance(1);
          closed = true;
          break;
        } else {
          value += text[i];
          advance(1);
        }
      }
      if (closed) {
        out.push_back({Tok::string, trim(value), loc});
      } else {
        out.push_back({Tok::bad, "unterminated quoted label", loc});
      }
    } else if (ident_start(c)) {
      const std::size_t start = i;
      while (i < text.size() && ident_char(static_cast<unsigned char>(text[i]))) advance(1);
      const std::string word(text.substr(start, i - start));
      const std::string kw = upper(word);
      Tok t = Tok::ident;
      if (kw == "IF") t = Tok::kw_if;
      else if (kw == "THEN") t = Tok::kw_then;
      else if (kw == "IS") t = Tok::kw_is;
      else if (kw == "AND") t = Tok::kw_and;
      else if (kw == "OR") t = Tok::kw_or;
      out.push_back({t, word, loc});
    } else {
      out.push_back({Tok::bad, std::string("unexpected character '") + static_cast<char>(c) + "'", loc});
      advance(1);
    }
  }
  out.push_back({Tok::eof, "", {line, col}});
  return out;
}

struct SyntaxError {
  Diagnostic diagnostic;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ParseResult run() {
    ParseResult result;
    std::vector<Rule> rules;
    int next_id = 1;
    while (true) {
      while (peek().type == Tok::newline) ++pos_;
      if (peek().type == Tok::eof) break;
      try {
        Rule r = rule();
        r.id = next_id++;
        rules.push_back(std::move(r));
      } catch (const SyntaxError& e) {
        result.diagnostics.push_back(e.diagnostic);
        ++next_id;
        while (peek().type != Tok::newline && peek().type != Tok::eof) ++pos_;
      }
    }
    if (rules.empty() && result.diagnostics.empty()) {
      result.diagnostics.push_back({Severity::error, "empty rule file: no rules found", 1, 1, std::nullopt});
    }
    if (!has_errors(result.diagnostics)) result.rule_base.emplace(std::move(rules));
    return result;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[k];
  }

  [[noreturn]] void fail(const Token& at, std::string message) const {
    if (at.type == Tok::bad) message = at.text;
    throw SyntaxError{{Severity::error, std::move(message), at.loc.line, at.loc.column, std::nullopt}};
  }

  static bool at_line_end(const Token& t) { return t.type == Tok::newline || t.type == Tok::eof; }

  const Token& expect(Tok type, std::string_view what) {
    const Token& t = peek();
    if (t.type != type) {
      if (at_line_end(t)) fail(t, "unterminated rule: expected " + std::string(what));
      fail(t, "expected " + std::string(what) + ", found '" + t.text + "'");
    }
    ++pos_;
    return t;
  }

  Rule rule() {
    Rule r;
    r.location = peek().loc;
    expect(Tok::kw_if, "IF at start of rule");
    r.antecedent = expr();
    if (peek().type != Tok::kw_then) {
      if (at_line_end(peek())) fail(peek(), "unterminated rule: expected THEN");
      fail(peek(), "expected AND, OR or THEN, found '" + peek().text + "'");
    }
    ++pos_;
    const Token& var = expect(Tok::ident, "output variable after THEN");
    r.consequent.variable = var.text;
    r.consequent.location = var.loc;
    expect(Tok::kw_is, "IS");
    r.consequent.label = label();
    if (peek().type == Tok::semicolon) ++pos_;
    if (!at_line_end(peek())) fail(peek(), "unexpected '" + peek().text + "' after rule");
    return r;
  }

  Expr expr() {
    std::vector<Expr> parts;
    parts.push_back(conj());
    while (peek().type == Tok::kw_or) {
      ++pos_;
      parts.push_back(conj());
    }
    return Expr::combine(Expr::Kind::any_of, std::move(parts));
  }

  Expr conj() {
    std::vector<Expr> parts;
    parts.push_back(atom());
    while (peek().type == Tok::kw_and) {
      ++pos_;
      parts.push_back(atom());
    }
    return Expr::combine(Expr::Kind::all_of, std::move(parts));
  }

  bool shorthand_follows() const {
    if (peek().type != Tok::kw_or) return false;
    const Token& next = peek(1);
    if (next.type == Tok::string) return true;
    return next.type == Tok::ident && peek(2).type != Tok::kw_is;
  }

  Expr atom() {
    if (peek().type == Tok::lparen) {
      const Token& open = peek();
      ++pos_;
      Expr inner = expr();
      if (peek().type != Tok::rparen) {
        if (at_line_end(peek())) {
          fail(peek(), "unterminated rule: missing ')' for '(' at column " + std::to_string(open.loc.column));
        }
        fail(peek(), "missing ')' for '(' at column " + std::to_string(open.loc.column) + ", found '" + peek().text +
                         "'");
      }
      ++pos_;
      return inner;
    }
    if (peek().type != Tok::ident) {
      if (at_line_end(peek())) fail(peek(), "unterminated rule: expected a condition");
      fail(peek(), "expected a variable name or '(', found '" + peek().text + "'");
    }
    const Token& var = peek();
    ++pos_;
    expect(Tok::kw_is, "IS after variable " + var.text);
    std::vector<Expr> alternatives;
    alternatives.push_back(Expr::atom(var.text, label(), var.loc));
    while (shorthand_follows()) {
      ++pos_;
      const SourceLocation loc = peek().loc;
      alternatives.push_back(Expr::atom(var.text, label(), loc));
    }
    return Expr::combine(Expr::Kind::any_of, std::move(alternatives));
  }

  std::string label() {
    const Token& t = peek();
    if (t.type == Tok::ident) {
      ++pos_;
      return t.text;
    }
    if (t.type == Tok::string) {
      if (t.text.empty()) fail(t, "empty label");
      ++pos_;
      return t.text;
    }
    if (at_line_end(t)) fail(t, "unterminated rule: expected a label");
    fail(t, "expected a label, found '" + t.text + "'");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool is_plain_identifier(std::string_view s) {
  if (s.empty() || !ident_start(static_cast<unsigned char>(s.front()))) return false;
  for (char c : s) {
    if (!ident_char(static_cast<unsigned char>(c))) return false;
  }
  const std::string kw = upper(s);
  return kw != "IF" && kw != "THEN" && kw != "IS" && kw != "AND" && kw != "OR";
}

std::string print_label(std::string_view label) {
  if (is_plain_identifier(label)) return std::string(label);
  std::string out = "\"";
  for (char c : label) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string print_expr_in(const Expr& e, Expr::Kind parent, bool root) {
  if (e.kind == Expr::Kind::atom) return e.variable + " IS " + print_label(e.label);
  const char* joiner = e.kind == Expr::Kind::all_of ? " AND " : " OR ";
  std::string body;
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (i) body += joiner;
    body += print_expr_in(e.children[i], e.kind, false);
  }
  if (root || parent == e.kind) return body;
  return "(" + body + ")";
}

}  // namespace

ParseResult parse_rules(std::string_view text) {
  return Parser(lex(text)).run();
}

std::string print_expr(const Expr& expr) {
  return print_expr_in(expr, expr.kind, true);
}

std::string print_rule(const Rule& rule) {
  return "IF " + print_expr(rule.antecedent) + " THEN " + rule.consequent.variable + " IS " +
         print_label(rule.consequent.label);
}

std::string pretty_print(const RuleBase& rules) {
  std::string out;
  for (const auto& r : rules.rules()) {
    out += print_rule(r);
    out += '\n';
  }
  return out;
}

}  // namespace fsup::rules
