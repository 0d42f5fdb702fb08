#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace sdprofile {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// RFC 3339 date-time ("2011-05-01T12:00:00Z", optional fraction, Z or +hh:mm).
// Normalized to UTC, truncated to milliseconds. Throws InvalidTimestamp.
Timestamp parse_rfc3339(std::string_view text);

// Always UTC with a trailing Z; the fraction is printed only when nonzero.
std::string format_rfc3339(Timestamp t);

// YYYY-MM-DD (UTC).
std::string format_date(Timestamp t);

Timestamp now_utc();

}  // namespace sdprofile
