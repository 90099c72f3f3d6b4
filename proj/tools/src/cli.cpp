#include "fsup/cli/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "fsup/error.hpp"
#include "fsup/fuzzy/defaults.hpp"
#include "fsup/gateway/server.hpp"
#include "fsup/rules/parser.hpp"
#include "fsup/store/store.hpp"
#include "fsup/supervisor/transcript.hpp"

namespace fsup::cli {

using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::string data_dir;
  std::string rules;
  std::string scenarios;
  std::string classifier_url;
  std::string defuzzifier;
  std::string host;
  int port = -1;
};

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Config file, then environment, then explicit flags.
gateway::ServerConfig resolve(const Globals& g, const gateway::EnvLookup& env) {
  gateway::ServerConfig cfg;
  std::string file = g.config;
  if (file.empty()) {
    if (const char* v = env("FSUP_CONFIG"); v && *v) file = v;
  }
  if (!file.empty()) gateway::apply_config_file(cfg, file);
  gateway::apply_env(cfg, env);
  if (!g.data_dir.empty()) cfg.data_dir = g.data_dir;
  if (!g.rules.empty()) cfg.rules = g.rules;
  if (!g.scenarios.empty()) cfg.scenarios_dir = g.scenarios;
  if (!g.classifier_url.empty()) cfg.classifier_url = g.classifier_url;
  if (!g.defuzzifier.empty()) cfg.defuzzifier = std::string(fuzzy::defuzzifier_name(fuzzy::parse_defuzzifier(g.defuzzifier)));
  if (!g.host.empty()) cfg.host = g.host;
  if (g.port >= 0) cfg.port = static_cast<std::uint16_t>(g.port);
  return cfg;
}

std::shared_ptr<const scenario::ScenarioDefinition> find_scenario(const gateway::ServerConfig& cfg,
                                                                  const std::string& which) {
  if (which.size() > 5 && which.ends_with(".json")) {
    return std::make_shared<const scenario::ScenarioDefinition>(scenario::load_scenario_file(which));
  }
  const auto catalog = scenario::load_scenario_dir(cfg.scenarios_dir);
  const auto it = catalog.find(which);
  if (it == catalog.end()) {
    throw NotFoundError("unknown scenario '" + which + "' in " + cfg.scenarios_dir.string());
  }
  return it->second;
}

// ------------------------------------------------------------------ replay

std::string trace_header() {
  return pad("#", 4) + pad("time", 26) + pad("target", 14) + "prof  rel   eth   dist  src  crisp  " +
         pad("label", 11) + "hint";
}

std::string trace_row(std::size_t index, const supervisor::EventOutcome& o) {
  const auto& s = o.scores;
  const auto& d = o.decision;
  std::string row = pad(std::to_string(index + 1), 4) + pad(format_timestamp(o.event.ts), 26) +
                    pad(std::string(scenario::role_name(o.event.target)), 14);
  for (double v : {s.professionalism, s.medical_relevance, s.ethical_behavior, s.contextual_distraction}) {
    row += fixed(v, 2) + "  ";
  }
  row += s.provenance == Provenance::heuristic ? "heu  " : "ext  ";
  row += fixed(d.assistance.crisp) + "  " + pad(d.assistance.label, 11);
  if (d.hint) {
    row += *d.hint;
  } else if (d.hint_suppressed) {
    row += "(suppressed)";
  } else {
    row += "-";
  }
  while (!row.empty() && row.back() == ' ') row.pop_back();
  return row;
}

json trace_json(std::size_t index, const supervisor::EventOutcome& o) {
  return {{"index", index + 1},
          {"event", scenario::to_json(o.event)},
          {"reply", o.reply.text},
          {"scores", supervisor::to_json(o.scores)},
          {"decision", supervisor::to_json(o.decision, o.metrics)}};
}

int cmd_replay(const Globals& g, const gateway::EnvLookup& env, const std::string& transcript,
               const std::string& scenario_id, const std::string& format, bool report, std::ostream& out,
               std::ostream& err) {
  const auto cfg = resolve(g, env);
  std::vector<scenario::StudentEvent> events;
  try {
    events = supervisor::load_transcript(transcript);
  } catch (const supervisor::TranscriptError& e) {
    err << transcript << ": " << e.what() << "\n";
    return 1;
  }
  const auto scen = find_scenario(cfg, scenario_id);
  const auto sup = gateway::make_supervisor(cfg);
  store::MemorySessionStore store;
  auto session = supervisor::Session::start(sup, store, "replay", scen, events.front().ts);

  if (format == "table") out << trace_header() << "\n";
  for (std::size_t i = 0; i < events.size(); ++i) {
    supervisor::EventOutcome o;
    try {
      o = session->handle_event(events[i]);
    } catch (const Error& e) {
      err << transcript << ": event " << i + 1 << ": " << e.what() << "\n";
      return 1;
    }
    if (format == "table") {
      out << trace_row(i, o) << "\n";
    } else {
      out << trace_json(i, o).dump() << "\n";
    }
  }
  if (report) {
    const auto r = supervisor::build_report("replay", scen->id, store.read_log("replay").entries,
                                            sup->fis().registry(), sup->config().scoring.off_topic_threshold);
    if (format == "table") {
      out << "\n";
      for (const auto& line : r.narrative) out << line << "\n";
    } else {
      out << json{{"report", supervisor::to_json(r)}}.dump() << "\n";
    }
  }
  return 0;
}

// ------------------------------------------------------------------- infer

int cmd_infer(const Globals& g, const gateway::EnvLookup& env, const CriterionScores& scores, bool as_json,
              std::ostream& out) {
  const auto cfg = resolve(g, env);
  const auto sup = gateway::make_supervisor(cfg);
  const auto& fis = sup->fis();
  const auto d = fis.evaluate(scores);
  if (as_json) {
    json fired = json::array();
    for (const auto& a : d.fired) {
      fired.push_back({{"rule", a.rule_id},
                       {"strength", a.strength},
                       {"text", rules::print_rule(*fis.rules().find(a.rule_id))}});
    }
    out << json{{"inputs", supervisor::to_json(scores)},
                {"defuzzifier", fuzzy::defuzzifier_name(fis.options().defuzzifier)},
                {"fired", fired},
                {"crisp", d.crisp},
                {"label", d.label},
                {"intervene", d.intervene},
                {"fallback", d.fallback}}
               .dump(2)
        << "\n";
    return 0;
  }
  out << "inputs       professionalism=" << fixed(scores.professionalism)
      << " medical_relevance=" << fixed(scores.medical_relevance) << " ethical_behavior=" << fixed(scores.ethical_behavior)
      << " contextual_distraction=" << fixed(scores.contextual_distraction) << "\n";
  out << "defuzzifier  " << fuzzy::defuzzifier_name(fis.options().defuzzifier) << "\n";
  if (d.fired.empty()) out << "fired        none (fallback label)\n";
  for (const auto& a : d.fired) {
    out << "fired        rule " << pad(std::to_string(a.rule_id), 3) << fixed(a.strength) << "  "
        << rules::print_rule(*fis.rules().find(a.rule_id)) << "\n";
  }
  out << "crisp        " << fixed(d.crisp, 6) << "\n";
  out << "label        " << d.label << "\n";
  out << "intervene    " << (d.intervene ? "yes" : "no") << "\n";
  return 0;
}

// ------------------------------------------------------------- rules check

int cmd_rules_check(const Globals& g, const gateway::EnvLookup& env, std::string file, std::ostream& out,
                    std::ostream& err) {
  const auto cfg = resolve(g, env);
  if (file.empty() && cfg.rules) file = cfg.rules->string();
  std::string text;
  std::string name = file.empty() ? "<bundled>" : file;
  if (file.empty()) {
    text = std::string(fuzzy::default_rule_text());
  } else {
    try {
      text = read_file(file);
    } catch (const ConfigError& e) {
      err << e.what() << "\n";
      return 1;
    }
  }
  auto parsed = rules::parse_rules(text);
  auto diagnostics = parsed.diagnostics;
  if (parsed.ok()) {
    const auto more = rules::validate(*parsed.rule_base, fuzzy::default_registry());
    diagnostics.insert(diagnostics.end(), more.begin(), more.end());
  }
  std::size_t errors = 0, warnings = 0;
  for (const auto& d : diagnostics) {
    (d.severity == rules::Severity::error ? errors : warnings)++;
    out << rules::format_diagnostic(d, name) << "\n";
  }
  out << name << ": " << (parsed.ok() ? parsed.rule_base->size() : 0) << " rules, " << errors
      << (errors == 1 ? " error, " : " errors, ") << warnings << (warnings == 1 ? " warning" : " warnings") << "\n";
  return errors == 0 ? 0 : 1;
}

// ------------------------------------------------------------------- serve

int cmd_serve(const Globals& g, const gateway::EnvLookup& env, std::ostream& out) {
  const auto cfg = resolve(g, env);
  auto service = gateway::make_service(cfg);
  gateway::Server server(service, cfg.host, cfg.port, cfg.threads);
  server.start();
  out << "fsup listening on http://" << cfg.host << ":" << server.port() << " (" << service->catalog().size()
      << " scenarios, data in " << cfg.data_dir.string() << ")" << std::endl;

  boost::asio::io_context signals_ctx;
  boost::asio::signal_set signals(signals_ctx, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code&, int) { server.stop(); });
  signals_ctx.run();
  server.wait();
  out << "stopped" << std::endl;
  return 0;
}

/// Routes library logging to the error stream while a command runs, so
/// stdout carries only command output.
class LogToStream {
 public:
  explicit LogToStream(std::ostream& err) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    sink->set_pattern("fsup: %l: %v");
    spdlog::set_default_logger(std::make_shared<spdlog::logger>("fsup", std::move(sink)));
  }
  ~LogToStream() { spdlog::set_default_logger(previous_); }
  LogToStream(const LogToStream&) = delete;
  LogToStream& operator=(const LogToStream&) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const gateway::EnvLookup& env) {
  CLI::App app{"Fuzzy supervision engine for simulated clinical sessions", "fsup"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Globals g;
  app.add_option("--config", g.config, "JSON config file (also FSUP_CONFIG)");
  app.add_option("--data-dir", g.data_dir, "Session store directory");
  app.add_option("--rules", g.rules, "Rule file (default: bundled rule base)");
  app.add_option("--scenarios", g.scenarios, "Scenario directory");
  app.add_option("--classifier-url", g.classifier_url, "External classifier base URL");
  app.add_option("--defuzzifier", g.defuzzifier, "most-severe-maximum or centroid");
  app.add_option("--host", g.host, "Listen address");
  app.add_option("--port", g.port, "Listen port")->check(CLI::Range(0, 65535));

  auto* serve = app.add_subcommand("serve", "Serve the HTTP and WebSocket API");
  serve->fallthrough();

  std::string transcript, scenario_id, format = "table";
  bool report = false;
  auto* replay = app.add_subcommand("replay", "Run a transcript offline and print the decision trace");
  replay->fallthrough();
  replay->add_option("transcript", transcript, "Line-delimited JSON student events")->required();
  replay->add_option("-s,--scenario", scenario_id, "Scenario id or path to a scenario file")->required();
  replay->add_option("--format", format, "table or jsonl")->check(CLI::IsMember({"table", "jsonl"}));
  replay->add_flag("--report", report, "Append the end-of-session report");

  CriterionScores scores;
  bool infer_json = false;
  auto* infer = app.add_subcommand("infer", "Evaluate the rule base on four crisp scores");
  infer->fallthrough();
  infer->add_option("--prof", scores.professionalism, "Professionalism")->required()->check(CLI::Range(0.0, 1.0));
  infer->add_option("--rel", scores.medical_relevance, "Medical relevance")->required()->check(CLI::Range(0.0, 1.0));
  infer->add_option("--eth", scores.ethical_behavior, "Ethical behavior")->required()->check(CLI::Range(0.0, 1.0));
  infer->add_option("--dist", scores.contextual_distraction, "Contextual distraction")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  infer->add_flag("--json", infer_json, "Print JSON");

  std::string rule_file;
  auto* rules_cmd = app.add_subcommand("rules", "Rule base tools");
  rules_cmd->require_subcommand(1);
  rules_cmd->fallthrough();
  auto* check = rules_cmd->add_subcommand("check", "Parse and validate a rule file");
  check->fallthrough();
  check->add_option("file", rule_file, "Rule file (default: --rules or the bundled rule base)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "fsup: " << e.what() << "\n";
    err << "Run with --help for usage.\n";
    return 2;
  }

  LogToStream logging(err);
  try {
    if (*serve) return cmd_serve(g, env, out);
    if (*replay) return cmd_replay(g, env, transcript, scenario_id, format, report, out, err);
    if (*infer) return cmd_infer(g, env, scores, infer_json, out);
    if (*check) return cmd_rules_check(g, env, rule_file, out, err);
  } catch (const rules::RuleBaseError& e) {
    err << "fsup: " << e.what() << "\n";
    for (const auto& d : e.diagnostics()) err << rules::format_diagnostic(d, g.rules.empty() ? "<rules>" : g.rules) << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "fsup: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "fsup: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run(args, out, err, [](const char* name) -> const char* { return std::getenv(name); });
}

}  // namespace fsup::cli
