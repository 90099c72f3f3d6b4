#include "fsup/store/store.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include "fsup/error.hpp"

namespace fsup::store {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 5> kKindNames{"student_event", "agent_reply", "scores", "decision", "report"};

std::string errno_text() { return std::strerror(errno); }

}  // namespace

std::string_view entry_kind_name(EntryKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

EntryKind parse_entry_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EntryKind>(i);
  }
  throw ValidationError("unknown log entry kind '" + std::string(name) + "'");
}

json to_json(const LogEntry& e) {
  return {{"seq", e.seq}, {"kind", entry_kind_name(e.kind)}, {"ts", format_timestamp(e.ts)}, {"payload", e.payload}};
}

LogEntry log_entry_from_json(const json& j) {
  try {
    LogEntry e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.kind = parse_entry_kind(j.at("kind").get<std::string>());
    e.ts = parse_timestamp(j.at("ts").get<std::string>());
    e.payload = j.at("payload");
    return e;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed log entry: ") + ex.what());
  }
}

json to_json(const SessionRecord& r) {
  return {{"id", r.id},
          {"scenario_id", r.scenario_id},
          {"created", format_timestamp(r.created)},
          {"closed", r.closed ? json(format_timestamp(*r.closed)) : json(nullptr)},
          {"status", r.status == SessionStatus::open ? "open" : "closed"}};
}

SessionRecord session_record_from_json(const json& j) {
  try {
    SessionRecord r;
    r.id = j.at("id").get<std::string>();
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.created = parse_timestamp(j.at("created").get<std::string>());
    if (const auto c = j.find("closed"); c != j.end() && !c->is_null()) r.closed = parse_timestamp(c->get<std::string>());
    const auto status = j.at("status").get<std::string>();
    if (status != "open" && status != "closed") throw ValidationError("bad session status '" + status + "'");
    r.status = status == "open" ? SessionStatus::open : SessionStatus::closed;
    return r;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed session record: ") + ex.what());
  }
}

bool valid_session_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
  });
}

std::uint64_t SessionStore::append(std::string_view id, NewEntry entry) {
  return append_batch(id, {std::move(entry)}).front();
}

// ---------------------------------------------------------------- memory

MemorySessionStore::Slot& MemorySessionStore::slot(std::string_view id) {
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + std::string(id) + "'");
  return it->second;
}

const MemorySessionStore::Slot& MemorySessionStore::slot(std::string_view id) const {
  return const_cast<MemorySessionStore*>(this)->slot(id);
}

SessionRecord MemorySessionStore::create(const std::string& id, const std::string& scenario_id, Timestamp created) {
  if (!valid_session_id(id)) throw ValidationError("invalid session id '" + id + "'");
  std::lock_guard lock(mu_);
  SessionRecord r{id, scenario_id, created, std::nullopt, SessionStatus::open};
  if (!sessions_.emplace(id, Slot{r, {}}).second) throw ValidationError("session '" + id + "' already exists");
  return r;
}

std::optional<SessionRecord> MemorySessionStore::find(std::string_view id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second.record;
}

std::vector<SessionRecord> MemorySessionStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<SessionRecord> out;
  for (const auto& [_, s] : sessions_) out.push_back(s.record);
  return out;
}

std::vector<std::uint64_t> MemorySessionStore::append_batch(std::string_view id, const std::vector<NewEntry>& entries) {
  std::lock_guard lock(mu_);
  auto& s = slot(id);
  if (s.record.status == SessionStatus::closed) throw SessionClosedError("session '" + s.record.id + "' is closed");
  std::vector<std::uint64_t> seqs;
  for (const auto& e : entries) {
    const auto seq = static_cast<std::uint64_t>(s.log.size()) + 1;
    s.log.push_back({seq, e.kind, e.ts, e.payload});
    seqs.push_back(seq);
  }
  return seqs;
}

LogRead MemorySessionStore::read_log(std::string_view id) const {
  std::lock_guard lock(mu_);
  return {slot(id).log, false, 0};
}

SessionRecord MemorySessionStore::close(std::string_view id, Timestamp at) {
  std::lock_guard lock(mu_);
  auto& s = slot(id);
  if (s.record.status == SessionStatus::closed) throw SessionClosedError("session '" + s.record.id + "' is closed");
  const bool has_report =
      std::any_of(s.log.begin(), s.log.end(), [](const LogEntry& e) { return e.kind == EntryKind::report; });
  if (!has_report) throw ValidationError("session '" + s.record.id + "' has no final report");
  s.record.status = SessionStatus::closed;
  s.record.closed = at;
  return s.record;
}

// ---------------------------------------------------------------- file

ScanResult scan_log(std::string_view bytes) {
  ScanResult out;
  std::vector<LogEntry> pending;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) break;  // torn last line
    const auto line = bytes.substr(pos, nl - pos);
    const json j = json::parse(line, nullptr, false);
    bool ok = !j.is_discarded() && j.is_object();
    LogEntry e;
    if (ok) {
      try {
        e = log_entry_from_json(j);
        ok = e.seq == out.entries.size() + pending.size() + 1;
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) {
      // Anything readable after a bad line means the damage is not a torn tail.
      for (auto rest = nl + 1; rest < bytes.size();) {
        const auto next = bytes.find('\n', rest);
        if (next == std::string_view::npos) break;
        if (!json::parse(bytes.substr(rest, next - rest), nullptr, false).is_discarded()) {
          throw PersistenceError("corrupt log record at byte " + std::to_string(pos));
        }
        rest = next + 1;
      }
      break;
    }
    pending.push_back(std::move(e));
    pos = nl + 1;
    if (j.value("batch_end", false)) {
      std::move(pending.begin(), pending.end(), std::back_inserter(out.entries));
      pending.clear();
      out.valid_bytes = pos;
    }
  }
  out.truncated = out.valid_bytes < bytes.size();
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Cuts the file to `size` bytes, appends `data` and fsyncs.
void write_at(const std::filesystem::path& p, std::uint64_t size, const std::string& data) {
  const int fd = ::open(p.c_str(), O_WRONLY | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw PersistenceError("cannot open " + p.string() + ": " + errno_text());
  auto fail = [&](const char* what) {
    const std::string msg = std::string(what) + " " + p.string() + ": " + errno_text();
    ::close(fd);
    throw PersistenceError(msg);
  };
  if (::ftruncate(fd, static_cast<off_t>(size)) != 0) fail("cannot truncate");
  if (::lseek(fd, static_cast<off_t>(size), SEEK_SET) < 0) fail("cannot seek");
  std::size_t done = 0;
  while (done < data.size()) {
    const auto n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("cannot write");
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) fail("cannot sync");
  ::close(fd);
}

void sync_dir(const std::filesystem::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

}  // namespace

FileSessionStore::FileSessionStore(std::filesystem::path data_dir) : dir_(std::move(data_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_ / "sessions", ec);
  if (ec) throw PersistenceError("cannot create data directory " + dir_.string() + ": " + ec.message());
  const auto index = read_file(dir_ / "index.jsonl");
  std::size_t pos = 0;
  while (pos < index.size()) {
    const auto nl = index.find('\n', pos);
    if (nl == std::string::npos) break;
    const json j = json::parse(std::string_view(index).substr(pos, nl - pos), nullptr, false);
    pos = nl + 1;
    if (j.is_discarded()) continue;
    try {
      auto r = session_record_from_json(j);
      auto& s = sessions_[r.id];
      s.record = std::move(r);
    } catch (const Error&) {
      continue;
    }
  }
}

std::filesystem::path FileSessionStore::log_path(std::string_view id) const {
  return dir_ / "sessions" / (std::string(id) + ".jsonl");
}

FileSessionStore::Slot& FileSessionStore::slot(std::string_view id) {
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + std::string(id) + "'");
  return it->second;
}

FileSessionStore::Tail& FileSessionStore::tail_of(Slot& s) {
  if (!s.tail) {
    const auto scan = scan_log(read_file(log_path(s.record.id)));
    Tail t;
    t.next_seq = scan.entries.size() + 1;
    t.valid_bytes = scan.valid_bytes;
    t.has_report = std::any_of(scan.entries.begin(), scan.entries.end(),
                               [](const LogEntry& e) { return e.kind == EntryKind::report; });
    s.tail = t;
  }
  return *s.tail;
}

void FileSessionStore::append_index(const SessionRecord& r) {
  const auto path = dir_ / "index.jsonl";
  const auto current = read_file(path);
  // Drop a torn trailing line before appending.
  const auto keep = current.empty() ? 0 : current.rfind('\n') == std::string::npos ? 0 : current.rfind('\n') + 1;
  write_at(path, keep, to_json(r).dump() + "\n");
}

SessionRecord FileSessionStore::create(const std::string& id, const std::string& scenario_id, Timestamp created) {
  if (!valid_session_id(id)) throw ValidationError("invalid session id '" + id + "'");
  std::lock_guard lock(mu_);
  if (sessions_.count(id)) throw ValidationError("session '" + id + "' already exists");
  SessionRecord r{id, scenario_id, created, std::nullopt, SessionStatus::open};
  write_at(log_path(id), 0, "");
  sync_dir(dir_ / "sessions");
  append_index(r);
  auto& s = sessions_[id];
  s.record = r;
  s.tail = Tail{};
  return r;
}

std::optional<SessionRecord> FileSessionStore::find(std::string_view id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second.record;
}

std::vector<SessionRecord> FileSessionStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<SessionRecord> out;
  for (const auto& [_, s] : sessions_) out.push_back(s.record);
  return out;
}

std::vector<std::uint64_t> FileSessionStore::append_batch(std::string_view id, const std::vector<NewEntry>& entries) {
  std::unique_lock lock(mu_);
  auto& s = slot(id);
  std::lock_guard session_lock(*s.mu);
  if (s.record.status == SessionStatus::closed) throw SessionClosedError("session '" + s.record.id + "' is closed");
  auto& tail = tail_of(s);
  lock.unlock();  // the session mutex keeps this writer exclusive; other sessions may proceed

  std::vector<std::uint64_t> seqs;
  std::string data;
  bool report = false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto seq = tail.next_seq + i;
    nlohmann::ordered_json line;
    line["seq"] = seq;
    line["kind"] = entry_kind_name(e.kind);
    line["ts"] = format_timestamp(e.ts);
    line["payload"] = e.payload;
    if (i + 1 == entries.size()) line["batch_end"] = true;
    data += line.dump() + "\n";
    seqs.push_back(seq);
    report = report || e.kind == EntryKind::report;
  }
  if (entries.empty()) return seqs;
  write_at(log_path(id), tail.valid_bytes, data);
  tail.valid_bytes += data.size();
  tail.next_seq += entries.size();
  tail.has_report = tail.has_report || report;
  return seqs;
}

LogRead FileSessionStore::read_log(std::string_view id) const {
  std::string path_id;
  {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFoundError("unknown session '" + std::string(id) + "'");
    path_id = it->first;
  }
  const auto bytes = read_file(log_path(path_id));
  auto scan = scan_log(bytes);
  return {std::move(scan.entries), scan.truncated, bytes.size() - scan.valid_bytes};
}

SessionRecord FileSessionStore::close(std::string_view id, Timestamp at) {
  std::lock_guard lock(mu_);
  auto& s = slot(id);
  std::lock_guard session_lock(*s.mu);
  if (s.record.status == SessionStatus::closed) throw SessionClosedError("session '" + s.record.id + "' is closed");
  if (!tail_of(s).has_report) throw ValidationError("session '" + s.record.id + "' has no final report");
  auto r = s.record;
  r.status = SessionStatus::closed;
  r.closed = at;
  append_index(r);
  s.record = r;
  return r;
}

}  // namespace fsup::store
