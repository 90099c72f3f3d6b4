#include "fsup/time.hpp"

#include <cctype>
#include <cstdio>
#include <ctime>

#include "fsup/error.hpp"

namespace fsup {

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto secs = floor<seconds>(ts);
  const auto millis = (ts - secs).count();
  const std::time_t t = system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(millis));
  return buf;
}

namespace {

bool read_digits(std::string_view text, std::size_t& pos, int count, int& out) {
  out = 0;
  for (int i = 0; i < count; ++i) {
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) return false;
    out = out * 10 + (text[pos] - '0');
    ++pos;
  }
  return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) return false;
  ++pos;
  return true;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  std::size_t pos = 0;
  int year, month, day, hour, minute, second;
  const bool ok = read_digits(text, pos, 4, year) && expect(text, pos, '-') && read_digits(text, pos, 2, month) &&
                  expect(text, pos, '-') && read_digits(text, pos, 2, day) && expect(text, pos, 'T') &&
                  read_digits(text, pos, 2, hour) && expect(text, pos, ':') && read_digits(text, pos, 2, minute) &&
                  expect(text, pos, ':') && read_digits(text, pos, 2, second);
  if (!ok) throw ValidationError("invalid timestamp '" + std::string(text) + "'");

  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int scale = 100;
    bool any = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      millis += (text[pos] - '0') * scale;
      scale /= 10;
      ++pos;
      any = true;
    }
    if (!any) throw ValidationError("invalid timestamp fraction in '" + std::string(text) + "'");
  }
  const auto rest = text.substr(pos);
  if (rest != "Z" && rest != "+00:00") throw ValidationError("timestamp must be UTC: '" + std::string(text) + "'");

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) {
    throw ValidationError("timestamp out of range: '" + std::string(text) + "'");
  }
  return sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second} + milliseconds{millis};
}

Timestamp now_utc() {
  return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

double seconds_between(Timestamp from, Timestamp to) {
  return std::chrono::duration<double>(to - from).count();
}

}  // namespace fsup
