#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "fsup/scenario/scenario.hpp"

namespace testing_assets {

inline std::string path(const std::string& rel) { return std::string(FSUP_ASSET_DIR) + "/" + rel; }

inline std::string read(const std::string& rel) {
  std::ifstream in(path(rel), std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const fsup::scenario::ScenarioDefinition& chest_pain() {
  static const auto s = fsup::scenario::load_scenario_file(path("scenarios/chest_pain.json"));
  return s;
}

}  // namespace testing_assets
