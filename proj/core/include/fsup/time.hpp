#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace fsup {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Formats as ISO-8601 UTC with millisecond precision, e.g. 2026-03-01T09:15:00.000Z.
std::string format_timestamp(Timestamp ts);

/// Accepts YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00). Throws ValidationError otherwise.
Timestamp parse_timestamp(std::string_view text);

Timestamp now_utc();

/// Seconds between two instants as a double.
double seconds_between(Timestamp from, Timestamp to);

}  // namespace fsup
