#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fsup/fuzzy/inference.hpp"
#include "fsup/scenario/agents.hpp"
#include "fsup/scoring/scorer.hpp"
#include "fsup/store/store.hpp"
#include "fsup/supervisor/decision.hpp"
#include "fsup/supervisor/hints.hpp"

namespace fsup::supervisor {

struct SupervisorConfig {
  scoring::ScoringConfig scoring;
  /// Suppress a hint when the same (criterion, band) hint was given within
  /// this many previous events. 0 disables the cool-down.
  std::size_t hint_cooldown_events = 0;
  std::size_t excerpt_events = 5;  // student texts passed to the external classifier
};

/// Shared, immutable pieces of the pipeline.
class Supervisor {
 public:
  Supervisor(std::shared_ptr<const fuzzy::InferenceSystem> fis, std::shared_ptr<const scoring::EventScorer> scorer,
             SupervisorConfig cfg = {});

  /// Default rule base, heuristic scoring only.
  static std::shared_ptr<const Supervisor> with_defaults(SupervisorConfig cfg = {});

  const fuzzy::InferenceSystem& fis() const { return *fis_; }
  const scoring::EventScorer& scorer() const { return *scorer_; }
  const SupervisorConfig& config() const { return cfg_; }

 private:
  std::shared_ptr<const fuzzy::InferenceSystem> fis_;
  std::shared_ptr<const scoring::EventScorer> scorer_;
  SupervisorConfig cfg_;
};

struct EventOutcome {
  scenario::StudentEvent event;
  scenario::AgentReply reply;
  CriterionScores scores;
  SupervisorDecision decision;
  SessionMetrics metrics;
  std::vector<store::LogEntry> entries;  // as persisted, in seq order
};

/// One live session. Events are handled one at a time; distinct sessions run
/// independently.
class Session {
 public:
  /// Creates the session record and an empty log.
  static std::unique_ptr<Session> start(std::shared_ptr<const Supervisor> sup, store::SessionStore& store,
                                        const std::string& id, std::shared_ptr<const scenario::ScenarioDefinition> s,
                                        Timestamp created);

  /// Rebuilds agent state, window and metrics from the persisted log. Logged
  /// scores are reused, so nothing is re-scored.
  static std::unique_ptr<Session> resume(std::shared_ptr<const Supervisor> sup, store::SessionStore& store,
                                         const std::string& id, std::shared_ptr<const scenario::ScenarioDefinition> s);

  /// Score against the state before routing, route, evaluate, pick a hint,
  /// then persist event, reply, scores and decision as one batch. State only
  /// changes once the batch is durable. `preset` replaces scoring (used when
  /// replaying externally scored events).
  EventOutcome handle_event(const scenario::StudentEvent& e, const CriterionScores* preset = nullptr);

  /// Appends the report built from the log and closes the session. Throws
  /// ValidationError for a session without events.
  FinalReport finalize(Timestamp at);

  const std::string& id() const { return id_; }
  const scenario::ScenarioDefinition& scenario() const { return *scenario_; }
  bool closed() const;
  scenario::AgentState agent_state() const;
  SessionMetrics metrics() const;

 private:
  Session(std::shared_ptr<const Supervisor> sup, store::SessionStore& store, std::string id,
          std::shared_ptr<const scenario::ScenarioDefinition> s);

  scoring::ScoringContext context(Timestamp ts) const;
  std::optional<std::string> cooled_down_hint(const Hint& h) const;

  std::shared_ptr<const Supervisor> sup_;
  store::SessionStore& store_;
  std::string id_;
  std::shared_ptr<const scenario::ScenarioDefinition> scenario_;

  mutable std::mutex mu_;
  scenario::AgentState state_;
  std::deque<double> window_;      // relevance of recent events
  std::deque<std::string> excerpt_;
  SessionMetrics metrics_;
  std::deque<std::optional<std::string>> recent_hints_;  // "criterion/band" per event, newest last
  bool closed_ = false;
};

/// Runs events through a fresh in-memory session and returns the decisions.
std::vector<SupervisorDecision> replay_events(std::shared_ptr<const Supervisor> sup,
                                              std::shared_ptr<const scenario::ScenarioDefinition> s,
                                              const std::vector<scenario::StudentEvent>& events);

/// Re-executes the student events of a persisted log. Externally scored
/// events reuse their logged scores; heuristic ones are scored again.
std::vector<SupervisorDecision> replay_log(std::shared_ptr<const Supervisor> sup,
                                           std::shared_ptr<const scenario::ScenarioDefinition> s,
                                           const std::vector<store::LogEntry>& log);

/// Decisions as recorded in a log.
std::vector<SupervisorDecision> logged_decisions(const std::vector<store::LogEntry>& log);

}  // namespace fsup::supervisor
