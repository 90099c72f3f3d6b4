#include "fsup/text.hpp"

#include <algorithm>
#include <cctype>

namespace fsup {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (c >= 0x80 || std::isalnum(c)) {
      current += static_cast<char>(c >= 0x80 ? c : std::tolower(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::set<std::string, std::less<>> token_set(std::string_view text) {
  auto tokens = tokenize(text);
  return {std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end())};
}

std::set<std::string, std::less<>> token_set(const std::vector<std::string>& phrases) {
  std::set<std::string, std::less<>> out;
  for (const auto& p : phrases) {
    for (auto& t : tokenize(p)) out.insert(std::move(t));
  }
  return out;
}

bool contains_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  return std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end()) != tokens.end();
}

}  // namespace fsup
