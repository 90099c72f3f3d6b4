#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "fsup/error.hpp"
#include "fsup/scenario/agents.hpp"

namespace fsup::supervisor {

class TranscriptError : public ValidationError {
 public:
  TranscriptError(std::size_t line, const std::string& message)
      : ValidationError(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }  // 1-based, 0 when not tied to a line

 private:
  std::size_t line_;
};

/// One student event per line as JSON ({"ts","target","text","action"}).
/// Blank lines and lines starting with '#' are skipped. Throws TranscriptError
/// for a malformed line or a transcript without events.
std::vector<scenario::StudentEvent> parse_transcript(std::string_view text);
std::vector<scenario::StudentEvent> load_transcript(const std::filesystem::path& path);

}  // namespace fsup::supervisor
