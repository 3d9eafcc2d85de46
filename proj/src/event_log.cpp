#include "pmsd/event_log.hpp"

#include "pmsd/csv.hpp"
#include "pmsd/error.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace pmsd {

namespace {

std::optional<std::size_t> find_column(const csv::Row& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::size_t require_column(const csv::Row& header, const std::string& name) {
  auto idx = find_column(header, name);
  if (!idx) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found in header", name);
  return *idx;
}

std::string_view cell(const csv::Row& row, std::size_t idx) {
  return idx < row.size() ? std::string_view(row[idx]) : std::string_view();
}

}  // namespace

EventLog parse_event_log(std::string_view csv_text, const ColumnMapping& mapping, const ParseOptions& options) {
  auto rows = csv::parse(csv_text);
  if (rows.empty()) throw Error(ErrorCode::EmptyLog, "event log has no header row");

  const csv::Row& header = rows.front();
  const std::size_t case_idx = require_column(header, mapping.case_id);
  const std::size_t act_idx = require_column(header, mapping.activity);
  const std::size_t complete_idx = require_column(header, mapping.complete);
  const auto res_idx = find_column(header, mapping.resource);
  const auto start_idx = find_column(header, mapping.start);

  EventLog log;
  log.column_mapping = mapping;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    // data rows are numbered from 1, the header is row 0
    auto reject = [&](ErrorCode code, const std::string& what, std::string_view value) {
      if (options.lenient) {
        ++log.skipped_rows;
        return;
      }
      throw Error(code, "row " + std::to_string(r) + ": " + what + " '" + std::string(value) + "'",
                  std::to_string(r));
    };

    const auto case_id = cell(row, case_idx);
    const auto activity = cell(row, act_idx);
    if (case_id.empty()) {
      reject(ErrorCode::InvalidArgument, "empty case id", case_id);
      continue;
    }
    if (activity.empty()) {
      reject(ErrorCode::InvalidArgument, "empty activity", activity);
      continue;
    }
    const auto complete_text = cell(row, complete_idx);
    const auto complete = parse_timestamp(complete_text);
    if (!complete) {
      reject(ErrorCode::BadTimestamp, "unparseable complete timestamp", complete_text);
      continue;
    }
    Timestamp start = *complete;
    if (start_idx) {
      const auto start_text = cell(row, *start_idx);
      if (!start_text.empty()) {
        const auto parsed = parse_timestamp(start_text);
        if (!parsed) {
          reject(ErrorCode::BadTimestamp, "unparseable start timestamp", start_text);
          continue;
        }
        if (*parsed > *complete) {
          reject(ErrorCode::BadTimestamp, "start after complete", start_text);
          continue;
        }
        start = *parsed;
      }
    }
    Event ev{std::string(case_id), std::string(activity), std::nullopt, start, *complete};
    if (res_idx && !cell(row, *res_idx).empty()) ev.resource = std::string(cell(row, *res_idx));
    log.events.push_back(std::move(ev));
  }

  if (log.events.empty()) throw Error(ErrorCode::EmptyLog, "event log contains no parseable rows");

  std::stable_sort(log.events.begin(), log.events.end(), [](const Event& a, const Event& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.complete < b.complete;
  });
  return log;
}

std::string write_event_log_csv(const EventLog& log) {
  const auto& m = log.column_mapping;
  std::string out = csv::join({m.case_id, m.activity, m.resource, m.start, m.complete});
  out.push_back('\n');
  for (const auto& ev : log.events) {
    out += csv::join({ev.case_id, ev.activity, ev.resource.value_or(""), format_timestamp(ev.start),
                      format_timestamp(ev.complete)});
    out.push_back('\n');
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> group_by_case(const EventLog& log) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const auto& id = log.events[i].case_id;
    auto [it, inserted] = slot.try_emplace(id, groups.size());
    if (inserted) groups.emplace_back(id, std::vector<std::size_t>{});
    groups[it->second].second.push_back(i);
  }
  return groups;
}

LogSummary summarize(const EventLog& log) {
  if (log.events.empty()) throw Error(ErrorCode::EmptyLog, "cannot summarize an empty log");

  LogSummary s;
  s.num_events = log.events.size();
  std::set<std::string> activities, resources;
  s.first_start = log.events.front().start;
  s.last_complete = log.events.front().complete;
  for (const auto& ev : log.events) {
    activities.insert(ev.activity);
    if (ev.resource) resources.insert(*ev.resource);
    s.first_start = std::min(s.first_start, ev.start);
    s.last_complete = std::max(s.last_complete, ev.complete);
  }
  s.num_activities = activities.size();
  s.num_resources = resources.size();

  const auto cases = group_by_case(log);
  s.num_cases = cases.size();
  double total_minutes = 0.0;
  for (const auto& [id, idx] : cases) {
    Timestamp first = log.events[idx.front()].start;
    Timestamp last = log.events[idx.front()].complete;
    for (auto i : idx) {
      first = std::min(first, log.events[i].start);
      last = std::max(last, log.events[i].complete);
    }
    total_minutes += to_minutes(last - first);
  }
  s.avg_events_per_case = static_cast<double>(s.num_events) / static_cast<double>(s.num_cases);
  s.avg_case_duration_minutes = total_minutes / static_cast<double>(s.num_cases);
  return s;
}

DirectlyFollowsGraph build_dfg(const EventLog& log) {
  DirectlyFollowsGraph dfg;
  for (const auto& [id, idx] : group_by_case(log)) {
    ++dfg.start_activities[log.events[idx.front()].activity];
    ++dfg.end_activities[log.events[idx.back()].activity];
    for (std::size_t i = 1; i < idx.size(); ++i) {
      ++dfg.edges[{log.events[idx[i - 1]].activity, log.events[idx[i]].activity}];
    }
  }
  return dfg;
}

}  // namespace pmsd
