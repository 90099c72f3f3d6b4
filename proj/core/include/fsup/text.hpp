#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fsup {

/// Lowercases ASCII, drops punctuation, splits on whitespace. Bytes >= 0x80
/// are kept so non-ASCII words survive as tokens.
std::vector<std::string> tokenize(std::string_view text);

std::set<std::string, std::less<>> token_set(std::string_view text);

/// Tokens of every entry, flattened into one set.
std::set<std::string, std::less<>> token_set(const std::vector<std::string>& phrases);

/// True when `phrase` occurs as a contiguous token run inside `tokens`.
bool contains_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase);

}  // namespace fsup
