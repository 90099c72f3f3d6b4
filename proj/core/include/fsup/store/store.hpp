#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsup/time.hpp"

namespace fsup::store {

enum class EntryKind { student_event, agent_reply, scores, decision, report };

std::string_view entry_kind_name(EntryKind k);
/// Throws ValidationError for unknown names.
EntryKind parse_entry_kind(std::string_view name);

struct NewEntry {
  EntryKind kind;
  Timestamp ts;
  nlohmann::json payload;
};

struct LogEntry {
  std::uint64_t seq = 0;
  EntryKind kind = EntryKind::student_event;
  Timestamp ts{};
  nlohmann::json payload;

  bool operator==(const LogEntry&) const = default;
};

/// {"seq","kind","ts","payload"}
nlohmann::json to_json(const LogEntry& e);
LogEntry log_entry_from_json(const nlohmann::json& j);

enum class SessionStatus { open, closed };

struct SessionRecord {
  std::string id;
  std::string scenario_id;
  Timestamp created{};
  std::optional<Timestamp> closed;
  SessionStatus status = SessionStatus::open;

  bool operator==(const SessionRecord&) const = default;
};

nlohmann::json to_json(const SessionRecord& r);
SessionRecord session_record_from_json(const nlohmann::json& j);

struct LogRead {
  std::vector<LogEntry> entries;
  bool truncated = false;         // a torn trailing write was skipped
  std::uint64_t dropped_bytes = 0;
};

/// Letters, digits, '-' and '_' only, 1..64 chars.
bool valid_session_id(std::string_view id);

/// Append-only per-session logs plus an index of sessions. Batches are
/// all-or-nothing: a reader never sees part of a batch.
class SessionStore {
 public:
  virtual ~SessionStore() = default;

  /// Throws ValidationError for a bad or already used id.
  virtual SessionRecord create(const std::string& id, const std::string& scenario_id, Timestamp created) = 0;
  virtual std::optional<SessionRecord> find(std::string_view id) const = 0;
  virtual std::vector<SessionRecord> list() const = 0;

  /// Durable before returning. Returns the assigned sequence numbers.
  /// Throws NotFoundError, SessionClosedError or PersistenceError.
  virtual std::vector<std::uint64_t> append_batch(std::string_view id, const std::vector<NewEntry>& entries) = 0;
  std::uint64_t append(std::string_view id, NewEntry entry);

  /// Throws NotFoundError for an unknown session.
  virtual LogRead read_log(std::string_view id) const = 0;

  /// Marks the session closed. Throws ValidationError when the log holds no
  /// report entry, SessionClosedError when already closed.
  virtual SessionRecord close(std::string_view id, Timestamp at) = 0;
};

class MemorySessionStore : public SessionStore {
 public:
  SessionRecord create(const std::string& id, const std::string& scenario_id, Timestamp created) override;
  std::optional<SessionRecord> find(std::string_view id) const override;
  std::vector<SessionRecord> list() const override;
  std::vector<std::uint64_t> append_batch(std::string_view id, const std::vector<NewEntry>& entries) override;
  LogRead read_log(std::string_view id) const override;
  SessionRecord close(std::string_view id, Timestamp at) override;

 private:
  struct Slot {
    SessionRecord record;
    std::vector<LogEntry> log;
  };
  Slot& slot(std::string_view id);
  const Slot& slot(std::string_view id) const;

  mutable std::mutex mu_;
  std::map<std::string, Slot, std::less<>> sessions_;
};

/// data_dir/index.jsonl and data_dir/sessions/{id}.jsonl, one JSON object per
/// line. A torn trailing write is ignored on read and cut off before the next
/// append.
class FileSessionStore final : public SessionStore {
 public:
  explicit FileSessionStore(std::filesystem::path data_dir);

  SessionRecord create(const std::string& id, const std::string& scenario_id, Timestamp created) override;
  std::optional<SessionRecord> find(std::string_view id) const override;
  std::vector<SessionRecord> list() const override;
  std::vector<std::uint64_t> append_batch(std::string_view id, const std::vector<NewEntry>& entries) override;
  LogRead read_log(std::string_view id) const override;
  SessionRecord close(std::string_view id, Timestamp at) override;

  const std::filesystem::path& data_dir() const { return dir_; }
  std::filesystem::path log_path(std::string_view id) const;

 private:
  struct Tail {
    std::uint64_t next_seq = 1;
    std::uint64_t valid_bytes = 0;
    bool has_report = false;
  };
  struct Slot {
    SessionRecord record;
    std::optional<Tail> tail;  // loaded lazily from the log file
    std::unique_ptr<std::mutex> mu = std::make_unique<std::mutex>();
  };

  Slot& slot(std::string_view id);
  Tail& tail_of(Slot& s);
  void append_index(const SessionRecord& r);

  std::filesystem::path dir_;
  mutable std::mutex mu_;  // guards sessions_ and the index file
  std::map<std::string, Slot, std::less<>> sessions_;
};

/// Scans a log file image. Exposed for fault-injection tests.
struct ScanResult {
  std::vector<LogEntry> entries;
  std::uint64_t valid_bytes = 0;  // prefix made of complete batches
  bool truncated = false;
};
ScanResult scan_log(std::string_view bytes);

}  // namespace fsup::store
