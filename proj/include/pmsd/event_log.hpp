#pragma once

#include "pmsd/timeutil.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pmsd {

struct Event {
  std::string case_id;
  std::string activity;
  std::optional<std::string> resource;
  Timestamp start;
  Timestamp complete;

  bool operator==(const Event&) const = default;
};

/// Source column names. `resource` and `start` are used only when the header
/// contains them.
struct ColumnMapping {
  std::string case_id = "case:concept:name";
  std::string activity = "concept:name";
  std::string resource = "org:resource";
  std::string complete = "time:timestamp";
  std::string start = "start_timestamp";

  bool operator==(const ColumnMapping&) const = default;
};

struct EventLog {
  /// Sorted by (start, complete, input order).
  std::vector<Event> events;
  ColumnMapping column_mapping;
  /// Rows dropped in lenient mode.
  std::size_t skipped_rows = 0;

  bool operator==(const EventLog&) const = default;
};

struct ParseOptions {
  /// Skip and count unparseable rows instead of failing on the first one.
  bool lenient = false;
};

EventLog parse_event_log(std::string_view csv_text, const ColumnMapping& mapping = {},
                         const ParseOptions& options = {});

/// Writes every event with all five columns, named per `log.column_mapping`.
std::string write_event_log_csv(const EventLog& log);

struct LogSummary {
  std::size_t num_events = 0;
  std::size_t num_cases = 0;
  std::size_t num_activities = 0;
  std::size_t num_resources = 0;
  Timestamp first_start;
  Timestamp last_complete;
  double avg_events_per_case = 0.0;
  double avg_case_duration_minutes = 0.0;
};

LogSummary summarize(const EventLog& log);

struct DirectlyFollowsGraph {
  std::map<std::pair<std::string, std::string>, std::size_t> edges;
  std::map<std::string, std::size_t> start_activities;
  std::map<std::string, std::size_t> end_activities;
};

DirectlyFollowsGraph build_dfg(const EventLog& log);

/// Case ids in order of first appearance in the sorted log, each with the
/// indices of its events in log order.
std::vector<std::pair<std::string, std::vector<std::size_t>>> group_by_case(const EventLog& log);

}  // namespace pmsd
