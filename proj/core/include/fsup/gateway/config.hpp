#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fsup/gateway/service.hpp"
#include "fsup/supervisor/session.hpp"

namespace fsup::gateway {

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::filesystem::path data_dir = "data";
  std::filesystem::path scenarios_dir = "scenarios";
  std::optional<std::filesystem::path> rules;  // bundled rule base when unset
  std::string classifier_url;                  // empty: heuristics only
  int classifier_timeout_ms = 2000;
  int breaker_threshold = 3;
  int breaker_cooldown_ms = 60000;
  std::string defuzzifier = "most-severe-maximum";
  std::size_t hint_cooldown_events = 0;
  int threads = 4;
};

/// Keys mirror the field names ("scenarios" for scenarios_dir). Throws
/// ConfigError for unknown keys or wrong types.
void apply_config_json(ServerConfig& cfg, const nlohmann::json& j);
void apply_config_file(ServerConfig& cfg, const std::filesystem::path& path);

using EnvLookup = std::function<const char*(const char*)>;

/// FSUP_HOST, FSUP_PORT, FSUP_DATA_DIR, FSUP_SCENARIOS, FSUP_RULES,
/// FSUP_CLASSIFIER_URL, FSUP_CLASSIFIER_TIMEOUT_MS, FSUP_BREAKER_THRESHOLD,
/// FSUP_BREAKER_COOLDOWN_MS, FSUP_DEFUZZIFIER, FSUP_HINT_COOLDOWN, FSUP_THREADS.
void apply_env(ServerConfig& cfg, const EnvLookup& env);

nlohmann::json to_json(const ServerConfig& cfg);

/// Rule base (file or bundled), scorer with the optional classifier client.
std::shared_ptr<const supervisor::Supervisor> make_supervisor(const ServerConfig& cfg);

/// Supervisor, scenario directory and file store under data_dir.
std::shared_ptr<Service> make_service(const ServerConfig& cfg);

}  // namespace fsup::gateway
