#include "fsup/gateway/service.hpp"

#include <random>

#include "fsup/error.hpp"

namespace fsup::gateway {

using nlohmann::json;

std::string_view frame_kind_name(FrameKind k) {
  switch (k) {
    case FrameKind::agent_reply: return "agent_reply";
    case FrameKind::decision: return "decision";
    case FrameKind::metrics: return "metrics";
    case FrameKind::report: return "report";
  }
  return "decision";
}

json to_json(const StreamFrame& f) { return {{"kind", frame_kind_name(f.kind)}, {"seq", f.seq}, {"payload", f.payload}}; }

std::vector<StreamFrame> frames_for(const store::LogEntry& e) {
  switch (e.kind) {
    case store::EntryKind::agent_reply: return {{FrameKind::agent_reply, e.seq, e.payload}};
    case store::EntryKind::decision: {
      json decision = e.payload;
      json metrics = decision.contains("metrics") ? decision["metrics"] : json::object();
      decision.erase("metrics");
      return {{FrameKind::decision, e.seq, decision}, {FrameKind::metrics, e.seq, metrics}};
    }
    case store::EntryKind::report: return {{FrameKind::report, e.seq, e.payload}};
    case store::EntryKind::student_event:
    case store::EntryKind::scores: break;
  }
  return {};
}

scenario::StudentEvent parse_api_event(const json& body, Timestamp now) {
  if (!body.is_object()) throw ValidationError("request body must be a JSON object");
  json event = body;
  if (!event.contains("ts") || event["ts"].is_null()) event["ts"] = format_timestamp(now);
  auto e = scenario::student_event_from_json(event);
  if (e.text.size() > kMaxEventText) {
    throw ValidationError("text exceeds " + std::to_string(kMaxEventText) + " bytes");
  }
  if (e.action && e.action->size() > kMaxEventText) throw ValidationError("action is too long");
  return e;
}

Service::Service(std::shared_ptr<const supervisor::Supervisor> sup, scenario::ScenarioCatalog catalog,
                 std::shared_ptr<store::SessionStore> store, Clock clock)
    : sup_(std::move(sup)), catalog_(std::move(catalog)), store_(std::move(store)), clock_(std::move(clock)) {
  if (!sup_ || !store_) throw ConfigError("service needs a supervisor and a store");
}

json Service::list_scenarios() const {
  json out = json::array();
  for (const auto& [id, s] : catalog_) {
    json exams = json::array(), tests = json::array(), interventions = json::array();
    for (const auto& e : s->exams) exams.push_back(e.site);
    for (const auto& t : s->tests) tests.push_back(t.id);
    for (const auto& i : s->interventions) interventions.push_back(i.id);
    out.push_back({{"id", id},
                   {"title", s->title},
                   {"chief_complaint", s->chief_complaint},
                   {"patient", {{"name", s->patient.name}, {"age", s->patient.age}, {"sex", s->patient.sex}}},
                   {"exams", exams},
                   {"tests", tests},
                   {"interventions", interventions}});
  }
  return out;
}

std::string Service::new_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id(16, '0');
  auto bits = rng();
  for (auto& c : id) {
    c = kHex[bits & 0xF];
    bits >>= 4;
  }
  return id;
}

std::string Service::create_session(std::string_view scenario_id) {
  const auto it = catalog_.find(scenario_id);
  if (it == catalog_.end()) throw NotFoundError("unknown scenario '" + std::string(scenario_id) + "'");
  std::lock_guard lock(mu_);
  std::string id;
  do {
    id = new_id();
  } while (sessions_.count(id) || store_->find(id));
  auto l = std::make_shared<Live>();
  l->session = supervisor::Session::start(sup_, *store_, id, it->second, clock_());
  sessions_.emplace(id, std::move(l));
  return id;
}

std::shared_ptr<Service::Live> Service::live(std::string_view id) {
  std::lock_guard lock(mu_);
  if (const auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  const auto record = store_->find(id);
  if (!record) throw NotFoundError("unknown session '" + std::string(id) + "'");
  const auto scen = catalog_.find(record->scenario_id);
  if (scen == catalog_.end()) {
    throw NotFoundError("session '" + std::string(id) + "' uses scenario '" + record->scenario_id +
                        "', which is not loaded");
  }
  auto l = std::make_shared<Live>();
  l->session = supervisor::Session::resume(sup_, *store_, std::string(id), scen->second);
  const auto entries = store_->read_log(id).entries;
  l->published = entries.empty() ? 0 : entries.back().seq;
  sessions_.emplace(std::string(id), l);
  return l;
}

void Service::publish(Live& l, const std::vector<store::LogEntry>& entries) {
  // Sinks run outside the lock so a sink may drop its own subscription.
  // Publishes of one session are already serialized by pipeline_mu.
  std::vector<std::pair<std::uint64_t, std::shared_ptr<const FrameSink>>> sinks;
  {
    std::lock_guard lock(l.broadcast_mu);
    for (const auto& [_, sub] : l.subscribers) sinks.push_back(sub);
    for (const auto& e : entries) l.published = std::max(l.published, e.seq);
  }
  for (const auto& e : entries) {
    for (const auto& f : frames_for(e)) {
      for (const auto& [from, sink] : sinks) {
        if (f.seq >= from) (*sink)(f);
      }
    }
  }
}

bool Service::has_session(std::string_view session_id) {
  try {
    live(session_id);
    return true;
  } catch (const NotFoundError&) {
    return false;
  }
}

json Service::post_message(std::string_view session_id, const json& body) {
  auto l = live(session_id);
  const auto event = parse_api_event(body, clock_());
  std::lock_guard lock(l->pipeline_mu);
  const auto out = l->session->handle_event(event);
  publish(*l, out.entries);
  json decision = out.entries.back().payload;
  return {{"seq", out.entries.back().seq},
          {"reply", scenario::to_json(out.reply)},
          {"scores", supervisor::to_json(out.scores)},
          {"decision", decision}};
}

json Service::close_session(std::string_view session_id) {
  auto l = live(session_id);
  std::lock_guard lock(l->pipeline_mu);
  const auto report = l->session->finalize(clock_());
  const auto entries = store_->read_log(session_id).entries;
  publish(*l, {entries.back()});
  return supervisor::to_json(report);
}

json Service::report(std::string_view session_id) {
  auto l = live(session_id);
  std::lock_guard lock(l->pipeline_mu);
  const auto entries = store_->read_log(session_id).entries;
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (it->kind == store::EntryKind::report) {
      json r = it->payload;
      r["final"] = true;
      return r;
    }
  }
  auto r = supervisor::to_json(supervisor::build_report(std::string(session_id), l->session->scenario().id, entries,
                                                        sup_->fis().registry(),
                                                        sup_->config().scoring.off_topic_threshold));
  r["final"] = false;
  return r;
}

json Service::log(std::string_view session_id, std::uint64_t from) {
  live(session_id);
  const auto read = store_->read_log(session_id);
  json entries = json::array();
  for (const auto& e : read.entries) {
    if (e.seq >= from) entries.push_back(store::to_json(e));
  }
  return {{"session_id", session_id}, {"entries", entries}, {"truncated", read.truncated}};
}

Subscription Service::subscribe(std::string_view session_id, std::uint64_t from, FrameSink sink) {
  auto l = live(session_id);
  std::lock_guard lock(l->broadcast_mu);
  for (const auto& e : store_->read_log(session_id).entries) {
    if (e.seq < from || e.seq > l->published) continue;
    for (const auto& f : frames_for(e)) sink(f);
  }
  const auto key = l->next_subscriber++;
  l->subscribers.emplace(key, std::make_pair(from, std::make_shared<const FrameSink>(std::move(sink))));
  std::weak_ptr<Live> weak = l;
  return Subscription([weak, key] {
    if (auto strong = weak.lock()) {
      std::lock_guard lock(strong->broadcast_mu);
      strong->subscribers.erase(key);
    }
  });
}

}  // namespace fsup::gateway
