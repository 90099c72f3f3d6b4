#include "fsup/supervisor/session.hpp"

#include <algorithm>

#include "fsup/error.hpp"
#include "fsup/supervisor/hints.hpp"

namespace fsup::supervisor {

using store::EntryKind;

Supervisor::Supervisor(std::shared_ptr<const fuzzy::InferenceSystem> fis,
                       std::shared_ptr<const scoring::EventScorer> scorer, SupervisorConfig cfg)
    : fis_(std::move(fis)), scorer_(std::move(scorer)), cfg_(cfg) {
  if (!fis_ || !scorer_) throw ConfigError("supervisor needs an inference system and a scorer");
}

std::shared_ptr<const Supervisor> Supervisor::with_defaults(SupervisorConfig cfg) {
  auto fis = std::make_shared<const fuzzy::InferenceSystem>(fuzzy::InferenceSystem::with_defaults());
  auto scorer = std::make_shared<const scoring::EventScorer>(cfg.scoring);
  return std::make_shared<const Supervisor>(std::move(fis), std::move(scorer), cfg);
}

Session::Session(std::shared_ptr<const Supervisor> sup, store::SessionStore& store, std::string id,
                 std::shared_ptr<const scenario::ScenarioDefinition> s)
    : sup_(std::move(sup)), store_(store), id_(std::move(id)), scenario_(std::move(s)) {
  if (!sup_ || !scenario_) throw ConfigError("session needs a supervisor and a scenario");
}

std::unique_ptr<Session> Session::start(std::shared_ptr<const Supervisor> sup, store::SessionStore& store,
                                        const std::string& id, std::shared_ptr<const scenario::ScenarioDefinition> s,
                                        Timestamp created) {
  std::unique_ptr<Session> session(new Session(std::move(sup), store, id, std::move(s)));
  store.create(id, session->scenario_->id, created);
  return session;
}

namespace {

std::string hint_key(Criterion c, const std::string& band) { return std::string(criterion_key(c)) + "/" + band; }

struct LoggedEvent {
  scenario::StudentEvent event;
  CriterionScores scores;
  SupervisorDecision decision;
};

/// Complete event groups in log order; also reports whether a report entry exists.
std::vector<LoggedEvent> logged_events(const std::vector<store::LogEntry>& log, bool* has_report = nullptr) {
  std::vector<LoggedEvent> out;
  std::optional<scenario::StudentEvent> event;
  std::optional<CriterionScores> scores;
  if (has_report) *has_report = false;
  for (const auto& e : log) {
    switch (e.kind) {
      case EntryKind::student_event:
        event = scenario::student_event_from_json(e.payload);
        scores.reset();
        break;
      case EntryKind::scores:
        scores = scores_from_json(e.payload);
        break;
      case EntryKind::decision:
        if (!event || !scores) throw ValidationError("decision entry " + std::to_string(e.seq) + " is incomplete");
        out.push_back({*event, *scores, decision_from_json(e.payload, *scores, event->ts)});
        event.reset();
        scores.reset();
        break;
      case EntryKind::report:
        if (has_report) *has_report = true;
        break;
      case EntryKind::agent_reply:
        break;
    }
  }
  return out;
}

}  // namespace

std::unique_ptr<Session> Session::resume(std::shared_ptr<const Supervisor> sup, store::SessionStore& store,
                                         const std::string& id,
                                         std::shared_ptr<const scenario::ScenarioDefinition> s) {
  const auto record = store.find(id);
  if (!record) throw NotFoundError("unknown session '" + id + "'");
  if (record->scenario_id != s->id) {
    throw ConfigError("session '" + id + "' belongs to scenario '" + record->scenario_id + "'");
  }
  std::unique_ptr<Session> session(new Session(std::move(sup), store, id, std::move(s)));
  bool has_report = false;
  const auto events = logged_events(store.read_log(id).entries, &has_report);
  const auto& cfg = session->sup_->config();
  for (const auto& le : events) {
    scenario::route(*session->scenario_, le.event, session->state_);
    session->metrics_ = update_metrics(session->metrics_, le.event.ts, le.scores, cfg.scoring.off_topic_threshold);
    if (le.decision.assistance.intervene) record_intervention(session->metrics_, le.decision.assistance.label);
    session->window_.push_back(le.scores.medical_relevance);
    if (session->window_.size() > cfg.scoring.window) session->window_.pop_front();
    session->excerpt_.push_back(le.event.text);
    if (session->excerpt_.size() > cfg.excerpt_events) session->excerpt_.pop_front();
    session->recent_hints_.push_back(le.decision.hint && le.decision.band
                                         ? std::optional(hint_key(le.decision.deficient, *le.decision.band))
                                         : std::nullopt);
    if (session->recent_hints_.size() > cfg.hint_cooldown_events) session->recent_hints_.pop_front();
  }
  session->closed_ = has_report || record->status == store::SessionStatus::closed;
  return session;
}

scoring::ScoringContext Session::context(Timestamp ts) const {
  scoring::ScoringContext ctx;
  ctx.window.assign(window_.begin(), window_.end());
  ctx.excerpt.assign(excerpt_.begin(), excerpt_.end());
  ctx.elapsed_seconds = metrics_.last_event ? std::max(0.0, seconds_between(*metrics_.last_event, ts)) : 0.0;
  return ctx;
}

std::optional<std::string> Session::cooled_down_hint(const Hint& h) const {
  const auto key = hint_key(h.criterion, h.band);
  for (const auto& recent : recent_hints_) {
    if (recent == key) return std::nullopt;
  }
  return h.text;
}

EventOutcome Session::handle_event(const scenario::StudentEvent& e, const CriterionScores* preset) {
  std::lock_guard lock(mu_);
  if (closed_) throw SessionClosedError("session '" + id_ + "' is closed");
  const auto& cfg = sup_->config();

  // Rejects clock skew before any work is done.
  auto metrics = update_metrics(metrics_, e.ts, CriterionScores{}, cfg.scoring.off_topic_threshold);

  const auto ctx = context(e.ts);
  const CriterionScores scores = preset ? *preset : sup_->scorer().score(id_, e, ctx, *scenario_, state_);
  check_scores(scores);

  auto state = state_;
  auto reply = scenario::route(*scenario_, e, state);

  metrics = update_metrics(metrics_, e.ts, scores, cfg.scoring.off_topic_threshold);
  SupervisorDecision decision;
  decision.assistance = sup_->fis().evaluate(scores);
  decision.deficient = deficient_criterion(scores);
  decision.ts = e.ts;
  std::optional<std::string> given;
  if (decision.assistance.intervene) {
    decision.band = severity_band(decision.assistance.label).value_or("High");
    const auto hint = select_hint(decision.deficient, *decision.band, *scenario_);
    decision.hint = cfg.hint_cooldown_events > 0 ? cooled_down_hint(hint) : std::optional(hint.text);
    decision.hint_suppressed = !decision.hint.has_value();
    if (decision.hint) given = hint_key(hint.criterion, hint.band);
    record_intervention(metrics, decision.assistance.label);
  }

  const std::vector<store::NewEntry> batch{
      {EntryKind::student_event, e.ts, scenario::to_json(e)},
      {EntryKind::agent_reply, e.ts, scenario::to_json(reply)},
      {EntryKind::scores, e.ts, to_json(scores)},
      {EntryKind::decision, e.ts, to_json(decision, metrics)},
  };
  const auto seqs = store_.append_batch(id_, batch);

  state_ = std::move(state);
  metrics_ = metrics;
  window_.push_back(scores.medical_relevance);
  if (window_.size() > cfg.scoring.window) window_.pop_front();
  excerpt_.push_back(e.text);
  if (excerpt_.size() > cfg.excerpt_events) excerpt_.pop_front();
  recent_hints_.push_back(given);
  if (recent_hints_.size() > cfg.hint_cooldown_events) recent_hints_.pop_front();

  EventOutcome out{e, std::move(reply), scores, std::move(decision), metrics, {}};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.entries.push_back({seqs[i], batch[i].kind, batch[i].ts, batch[i].payload});
  }
  return out;
}

FinalReport Session::finalize(Timestamp at) {
  std::lock_guard lock(mu_);
  if (closed_) throw SessionClosedError("session '" + id_ + "' is closed");
  const auto log = store_.read_log(id_);
  auto report = build_report(id_, scenario_->id, log.entries, sup_->fis().registry(),
                             sup_->config().scoring.off_topic_threshold);
  store_.append(id_, {EntryKind::report, at, to_json(report)});
  store_.close(id_, at);
  closed_ = true;
  return report;
}

bool Session::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

scenario::AgentState Session::agent_state() const {
  std::lock_guard lock(mu_);
  return state_;
}

SessionMetrics Session::metrics() const {
  std::lock_guard lock(mu_);
  return metrics_;
}

std::vector<SupervisorDecision> replay_events(std::shared_ptr<const Supervisor> sup,
                                              std::shared_ptr<const scenario::ScenarioDefinition> s,
                                              const std::vector<scenario::StudentEvent>& events) {
  store::MemorySessionStore mem;
  const auto created = events.empty() ? Timestamp{} : events.front().ts;
  auto session = Session::start(std::move(sup), mem, "replay", std::move(s), created);
  std::vector<SupervisorDecision> out;
  for (const auto& e : events) out.push_back(session->handle_event(e).decision);
  return out;
}

std::vector<SupervisorDecision> replay_log(std::shared_ptr<const Supervisor> sup,
                                           std::shared_ptr<const scenario::ScenarioDefinition> s,
                                           const std::vector<store::LogEntry>& log) {
  store::MemorySessionStore mem;
  const auto events = logged_events(log);
  const auto created = events.empty() ? Timestamp{} : events.front().event.ts;
  auto session = Session::start(std::move(sup), mem, "replay", std::move(s), created);
  std::vector<SupervisorDecision> out;
  for (const auto& le : events) {
    const bool external = le.scores.provenance == Provenance::external;
    out.push_back(session->handle_event(le.event, external ? &le.scores : nullptr).decision);
  }
  return out;
}

std::vector<SupervisorDecision> logged_decisions(const std::vector<store::LogEntry>& log) {
  std::vector<SupervisorDecision> out;
  for (auto& le : logged_events(log)) out.push_back(std::move(le.decision));
  return out;
}

}  // namespace fsup::supervisor
