#pragma once

#include "pmsd/event_log.hpp"
#include "pmsd/timeutil.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pmsd {

enum class TimeUnit { minute, hour, day, week };

struct TimeWindowSpec {
  int duration = 1;
  TimeUnit unit = TimeUnit::hour;
  /// Start of step 0. Defaults to the first event start truncated to `unit`
  /// (weeks truncate to Monday 00:00 UTC).
  std::optional<Timestamp> origin;

  Seconds length() const;
  bool operator==(const TimeWindowSpec&) const = default;
};

/// Parses "1h", "7 hours", "1d", "30min", "2w", "1 day" and similar.
TimeWindowSpec parse_window(std::string_view text);
std::string window_label(const TimeWindowSpec& window);
Timestamp truncate_to_unit(Timestamp ts, TimeUnit unit);

enum class Aspect { general, organizational, activity };

std::string_view to_string(Aspect aspect);
Aspect parse_aspect(std::string_view text);

struct AspectSpec {
  Aspect aspect = Aspect::general;
  /// Restricts per-entity expansion; events of other entities pool into `_other`.
  std::optional<std::vector<std::string>> entities;
  /// Without `entities`, the top-N entities by event count get their own columns.
  std::size_t top_n = 10;
};

inline constexpr std::string_view kOtherEntity = "_other";

/// k steps by m variables, stored column-wise.
struct SDLog {
  TimeWindowSpec window;
  std::vector<Timestamp> step_starts;
  std::vector<std::string> variables;
  std::vector<std::vector<double>> columns;
  std::vector<bool> active_mask;
  /// Set when inactive steps were removed; step spacing is then irregular.
  bool filtered = false;

  std::size_t steps() const { return step_starts.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool has(std::string_view name) const { return index_of(name).has_value(); }
  /// Throws UnknownVariable.
  std::span<const double> column(std::string_view name) const;

  bool operator==(const SDLog&) const = default;
};

/// Checks the structural invariants; throws InvalidArgument.
void check_sdlog(const SDLog& sdlog);

SDLog generate_sdlog(const EventLog& log, const TimeWindowSpec& window, const AspectSpec& aspect = {});

/// Throws AllStepsInactive when nothing is left.
SDLog filter_active(const SDLog& sdlog);

std::string export_sdlog_csv(const SDLog& sdlog);

/// The CSV does not carry the window or the filtered flag; the caller
/// supplies them. A window without origin gets the first step start.
SDLog parse_sdlog_csv(std::string_view text, TimeWindowSpec window, bool filtered = false);

}  // namespace pmsd
