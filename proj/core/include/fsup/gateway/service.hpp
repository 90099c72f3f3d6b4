#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsup/scenario/scenario.hpp"
#include "fsup/store/store.hpp"
#include "fsup/supervisor/session.hpp"

namespace fsup::gateway {

inline constexpr std::size_t kMaxEventText = 8 * 1024;

enum class FrameKind { agent_reply, decision, metrics, report };

std::string_view frame_kind_name(FrameKind k);

struct StreamFrame {
  FrameKind kind;
  std::uint64_t seq;  // of the log entry the frame mirrors
  nlohmann::json payload;

  bool operator==(const StreamFrame&) const = default;
};

nlohmann::json to_json(const StreamFrame& f);

/// Frames derived from one log entry: agent_reply and report entries map to
/// one frame, a decision entry to a decision frame then a metrics frame.
std::vector<StreamFrame> frames_for(const store::LogEntry& e);

/// Validated student event from an API body. A missing "ts" takes `now`.
/// Throws ValidationError.
scenario::StudentEvent parse_api_event(const nlohmann::json& body, Timestamp now);

using FrameSink = std::function<void(const StreamFrame&)>;

/// Keeps a stream subscription alive; destroying it unsubscribes.
class Subscription {
 public:
  Subscription() = default;
  explicit Subscription(std::function<void()> cancel) : cancel_(std::move(cancel)) {}
  Subscription(Subscription&& o) noexcept : cancel_(std::exchange(o.cancel_, nullptr)) {}
  Subscription& operator=(Subscription&& o) noexcept {
    reset();
    cancel_ = std::exchange(o.cancel_, nullptr);
    return *this;
  }
  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;
  ~Subscription() { reset(); }

  void reset() {
    if (cancel_) std::exchange(cancel_, nullptr)();
  }

 private:
  std::function<void()> cancel_;
};

/// Transport-free API: everything the HTTP and WebSocket endpoints expose.
/// Errors surface as fsup exceptions (NotFoundError, ValidationError,
/// SessionClosedError, PersistenceError).
class Service {
 public:
  using Clock = std::function<Timestamp()>;

  Service(std::shared_ptr<const supervisor::Supervisor> sup, scenario::ScenarioCatalog catalog,
          std::shared_ptr<store::SessionStore> store, Clock clock = now_utc);

  nlohmann::json list_scenarios() const;

  /// Returns the new session id. Throws NotFoundError for an unknown scenario.
  std::string create_session(std::string_view scenario_id);

  /// Runs the full pipeline and returns {"seq","reply","scores","decision"}.
  nlohmann::json post_message(std::string_view session_id, const nlohmann::json& body);

  /// Finalizes the session and returns the report.
  nlohmann::json close_session(std::string_view session_id);

  /// The stored final report, or a provisional one ("final": false) for an
  /// open session with events.
  nlohmann::json report(std::string_view session_id);

  /// Log entries with seq >= from.
  nlohmann::json log(std::string_view session_id, std::uint64_t from = 1);

  /// Delivers every frame with seq >= from: first the backlog from the log,
  /// then live frames, in order and without duplicates. `sink` runs on the
  /// posting thread and must not block. It may still be called briefly after
  /// the subscription is reset.
  Subscription subscribe(std::string_view session_id, std::uint64_t from, FrameSink sink);

  /// True for sessions in memory or in the store.
  bool has_session(std::string_view session_id);

  const scenario::ScenarioCatalog& catalog() const { return catalog_; }

 private:
  struct Live {
    std::unique_ptr<supervisor::Session> session;
    std::mutex pipeline_mu;   // one event (handle + publish) at a time
    std::mutex broadcast_mu;  // guards published and subscribers
    std::uint64_t published = 0;  // highest seq handed to subscribers
    std::map<std::uint64_t, std::pair<std::uint64_t, std::shared_ptr<const FrameSink>>> subscribers;  // id -> (from, sink)
    std::uint64_t next_subscriber = 0;
  };

  std::shared_ptr<Live> live(std::string_view id);
  void publish(Live& l, const std::vector<store::LogEntry>& entries);
  std::string new_id();

  std::shared_ptr<const supervisor::Supervisor> sup_;
  scenario::ScenarioCatalog catalog_;
  std::shared_ptr<store::SessionStore> store_;
  Clock clock_;

  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Live>, std::less<>> sessions_;
};

}  // namespace fsup::gateway
