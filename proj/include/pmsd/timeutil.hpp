#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pmsd {

/// UTC instant with one-second resolution.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Accepts `YYYY-MM-DDTHH:MM:SS` and `YYYY-MM-DD HH:MM:SS`, each with an
/// optional fractional part (truncated) and an optional `Z` or `±HH:MM` /
/// `±HHMM` offset. Values without an offset are taken as UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(Timestamp ts);

inline double to_minutes(Seconds s) { return static_cast<double>(s.count()) / 60.0; }

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);
std::optional<double> parse_number(std::string_view text);

}  // namespace pmsd
