#include "fsup/gateway/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fsup/error.hpp"
#include "fsup/fuzzy/defaults.hpp"
#include "fsup/rules/parser.hpp"

namespace fsup::gateway {

using nlohmann::json;

namespace {

template <typename T>
T parse_int(std::string_view name, std::string_view text, long long lo, long long hi) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || v < lo || v > hi) {
    throw ConfigError(std::string(name) + ": expected an integer in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "], got '" + std::string(text) + "'");
  }
  return static_cast<T>(v);
}

template <typename T>
T json_int(std::string_view key, const json& v, long long lo, long long hi) {
  if (!v.is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
  return parse_int<T>(key, std::to_string(v.get<long long>()), lo, hi);
}

std::string json_string(std::string_view key, const json& v) {
  if (!v.is_string()) throw ConfigError(std::string(key) + ": expected a string");
  return v.get<std::string>();
}

/// One setter per option, shared by the file and environment sources.
struct Option {
  const char* key;
  const char* env;
  void (*from_text)(ServerConfig&, std::string_view);
  void (*from_json)(ServerConfig&, const json&);
};

const Option kOptions[] = {
    {"host", "FSUP_HOST", [](ServerConfig& c, std::string_view t) { c.host = std::string(t); },
     [](ServerConfig& c, const json& v) { c.host = json_string("host", v); }},
    {"port", "FSUP_PORT", [](ServerConfig& c, std::string_view t) { c.port = parse_int<std::uint16_t>("port", t, 0, 65535); },
     [](ServerConfig& c, const json& v) { c.port = json_int<std::uint16_t>("port", v, 0, 65535); }},
    {"data_dir", "FSUP_DATA_DIR", [](ServerConfig& c, std::string_view t) { c.data_dir = std::string(t); },
     [](ServerConfig& c, const json& v) { c.data_dir = json_string("data_dir", v); }},
    {"scenarios", "FSUP_SCENARIOS", [](ServerConfig& c, std::string_view t) { c.scenarios_dir = std::string(t); },
     [](ServerConfig& c, const json& v) { c.scenarios_dir = json_string("scenarios", v); }},
    {"rules", "FSUP_RULES", [](ServerConfig& c, std::string_view t) { c.rules = std::filesystem::path(std::string(t)); },
     [](ServerConfig& c, const json& v) { c.rules = std::filesystem::path(json_string("rules", v)); }},
    {"classifier_url", "FSUP_CLASSIFIER_URL",
     [](ServerConfig& c, std::string_view t) { c.classifier_url = std::string(t); },
     [](ServerConfig& c, const json& v) { c.classifier_url = json_string("classifier_url", v); }},
    {"classifier_timeout_ms", "FSUP_CLASSIFIER_TIMEOUT_MS",
     [](ServerConfig& c, std::string_view t) { c.classifier_timeout_ms = parse_int<int>("classifier_timeout_ms", t, 1, 600000); },
     [](ServerConfig& c, const json& v) { c.classifier_timeout_ms = json_int<int>("classifier_timeout_ms", v, 1, 600000); }},
    {"breaker_threshold", "FSUP_BREAKER_THRESHOLD",
     [](ServerConfig& c, std::string_view t) { c.breaker_threshold = parse_int<int>("breaker_threshold", t, 1, 1000); },
     [](ServerConfig& c, const json& v) { c.breaker_threshold = json_int<int>("breaker_threshold", v, 1, 1000); }},
    {"breaker_cooldown_ms", "FSUP_BREAKER_COOLDOWN_MS",
     [](ServerConfig& c, std::string_view t) { c.breaker_cooldown_ms = parse_int<int>("breaker_cooldown_ms", t, 0, 86400000); },
     [](ServerConfig& c, const json& v) { c.breaker_cooldown_ms = json_int<int>("breaker_cooldown_ms", v, 0, 86400000); }},
    {"defuzzifier", "FSUP_DEFUZZIFIER",
     [](ServerConfig& c, std::string_view t) { c.defuzzifier = std::string(fuzzy::defuzzifier_name(fuzzy::parse_defuzzifier(t))); },
     [](ServerConfig& c, const json& v) {
       c.defuzzifier = std::string(fuzzy::defuzzifier_name(fuzzy::parse_defuzzifier(json_string("defuzzifier", v))));
     }},
    {"hint_cooldown_events", "FSUP_HINT_COOLDOWN",
     [](ServerConfig& c, std::string_view t) { c.hint_cooldown_events = parse_int<std::size_t>("hint_cooldown_events", t, 0, 1000); },
     [](ServerConfig& c, const json& v) { c.hint_cooldown_events = json_int<std::size_t>("hint_cooldown_events", v, 0, 1000); }},
    {"threads", "FSUP_THREADS", [](ServerConfig& c, std::string_view t) { c.threads = parse_int<int>("threads", t, 1, 256); },
     [](ServerConfig& c, const json& v) { c.threads = json_int<int>("threads", v, 1, 256); }},
};

std::string read_text(const std::filesystem::path& p, const char* what) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError(std::string("cannot read ") + what + " " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void apply_config_json(ServerConfig& cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const Option* opt = nullptr;
    for (const auto& o : kOptions) {
      if (key == o.key) opt = &o;
    }
    if (!opt) throw ConfigError("unknown config key '" + key + "'");
    opt->from_json(cfg, value);
  }
}

void apply_config_file(ServerConfig& cfg, const std::filesystem::path& path) {
  const auto j = json::parse(read_text(path, "config file"), nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
  apply_config_json(cfg, j);
}

void apply_env(ServerConfig& cfg, const EnvLookup& env) {
  for (const auto& o : kOptions) {
    if (const char* v = env(o.env); v && *v) o.from_text(cfg, v);
  }
}

json to_json(const ServerConfig& cfg) {
  return {{"host", cfg.host},
          {"port", cfg.port},
          {"data_dir", cfg.data_dir.string()},
          {"scenarios", cfg.scenarios_dir.string()},
          {"rules", cfg.rules ? json(cfg.rules->string()) : json(nullptr)},
          {"classifier_url", cfg.classifier_url},
          {"classifier_timeout_ms", cfg.classifier_timeout_ms},
          {"breaker_threshold", cfg.breaker_threshold},
          {"breaker_cooldown_ms", cfg.breaker_cooldown_ms},
          {"defuzzifier", cfg.defuzzifier},
          {"hint_cooldown_events", cfg.hint_cooldown_events},
          {"threads", cfg.threads}};
}

std::shared_ptr<const supervisor::Supervisor> make_supervisor(const ServerConfig& cfg) {
  fuzzy::InferenceOptions options;
  options.defuzzifier = fuzzy::parse_defuzzifier(cfg.defuzzifier);
  auto registry = fuzzy::default_registry();
  const std::string text = cfg.rules ? read_text(*cfg.rules, "rule file") : std::string(fuzzy::default_rule_text());
  auto rules = rules::load_rule_base(text, registry);
  auto fis = std::make_shared<const fuzzy::InferenceSystem>(std::move(registry), std::move(rules), options);

  supervisor::SupervisorConfig scfg;
  scfg.hint_cooldown_events = cfg.hint_cooldown_events;
  std::shared_ptr<scoring::ClassifierClient> client;
  if (!cfg.classifier_url.empty()) {
    client = std::make_shared<scoring::HttpClassifierClient>(scoring::ClassifierConfig{
        cfg.classifier_url, cfg.classifier_timeout_ms, cfg.breaker_threshold, cfg.breaker_cooldown_ms});
  }
  auto scorer = std::make_shared<const scoring::EventScorer>(scfg.scoring, std::move(client));
  return std::make_shared<const supervisor::Supervisor>(std::move(fis), std::move(scorer), scfg);
}

std::shared_ptr<Service> make_service(const ServerConfig& cfg) {
  auto catalog = scenario::load_scenario_dir(cfg.scenarios_dir);
  auto store = std::make_shared<store::FileSessionStore>(cfg.data_dir);
  return std::make_shared<Service>(make_supervisor(cfg), std::move(catalog), std::move(store));
}

}  // namespace fsup::gateway
