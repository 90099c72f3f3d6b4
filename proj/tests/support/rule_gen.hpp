#pragma once

// Random valid rule-file generator for round-trip properties. Exercises
// keyword casing, comments, parentheses, label shorthand, quoted labels,
// optional semicolons and blank lines.

#include <random>
#include <string>
#include <vector>

namespace rulegen {

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::string file() {
    std::string out;
    const int rules = pick(1, 8);
    for (int i = 0; i < rules; ++i) {
      if (chance(0.3)) out += "# comment " + std::to_string(i) + "\n";
      if (chance(0.2)) out += "\n";
      out += keyword("IF") + " " + expr(0) + " " + keyword("THEN") + " Out " + keyword("IS") + " " + label();
      if (chance(0.3)) out += ";";
      if (chance(0.2)) out += "  # trailing";
      out += "\n";
    }
    return out;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string keyword(const std::string& kw) {
    if (!chance(0.3)) return kw;
    std::string out = kw;
    for (auto& c : out) {
      if (chance(0.5)) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
  }

  std::string label() {
    static const std::vector<std::string> plain{"Low", "High", "Mid_1", "x", "Safe"};
    static const std::vector<std::string> quoted{"\"Partially relevant\"", "\"  padded  \"", "\"a \\\"q\\\" b\"",
                                                 "\"Or\"", "\"is\""};
    return chance(0.25) ? quoted[pick(0, 4)] : plain[pick(0, 4)];
  }

  std::string variable() {
    static const std::vector<std::string> vars{"A", "Beta", "C_3", "Dd"};
    return vars[pick(0, 3)];
  }

  std::string atom(int depth) {
    if (depth < 3 && chance(0.25)) return "(" + expr(depth + 1) + ")";
    std::string out = variable() + " " + keyword("IS") + " " + label();
    if (chance(0.2)) {
      const int extra = pick(1, 2);
      for (int i = 0; i < extra; ++i) out += " " + keyword("OR") + " " + label();
    }
    return out;
  }

  std::string conj(int depth) {
    std::string out = atom(depth);
    const int more = chance(0.5) ? pick(1, 3) : 0;
    for (int i = 0; i < more; ++i) out += " " + keyword("AND") + " " + atom(depth);
    return out;
  }

  std::string expr(int depth) {
    std::string out = conj(depth);
    const int more = chance(0.5) ? pick(1, 2) : 0;
    for (int i = 0; i < more; ++i) out += " " + keyword("OR") + " " + conj(depth);
    return out;
  }

  std::mt19937_64 rng_;
};

}  // namespace rulegen
