#include "fsup/supervisor/transcript.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fsup::supervisor {

std::vector<scenario::StudentEvent> parse_transcript(std::string_view text) {
  std::vector<scenario::StudentEvent> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw TranscriptError(line_no, "malformed JSON");
    try {
      events.push_back(scenario::student_event_from_json(j));
    } catch (const Error& e) {
      throw TranscriptError(line_no, e.what());
    }
  }
  if (events.empty()) throw TranscriptError(0, "transcript has no events");
  return events;
}

std::vector<scenario::StudentEvent> load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read transcript " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_transcript(ss.str());
}

}  // namespace fsup::supervisor
