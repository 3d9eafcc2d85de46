#include "pmsd/sdlog.hpp"

#include "pmsd/csv.hpp"
#include "pmsd/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace pmsd {

Seconds TimeWindowSpec::length() const {
  using namespace std::chrono;
  switch (unit) {
    case TimeUnit::minute: return minutes{duration};
    case TimeUnit::hour: return hours{duration};
    case TimeUnit::day: return days{duration};
    case TimeUnit::week: return weeks{duration};
  }
  return Seconds{0};
}

TimeWindowSpec parse_window(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::tolower(c)));
  }
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits == 0 || digits > 6) throw Error(ErrorCode::InvalidArgument, "bad window '" + std::string(text) + "'");
  TimeWindowSpec w;
  w.duration = std::stoi(s.substr(0, digits));
  if (w.duration < 1) throw Error(ErrorCode::InvalidArgument, "window duration must be >= 1");
  const std::string unit = s.substr(digits);
  static const std::map<std::string, TimeUnit> units = {
      {"m", TimeUnit::minute},   {"min", TimeUnit::minute}, {"mins", TimeUnit::minute},
      {"minute", TimeUnit::minute}, {"minutes", TimeUnit::minute},
      {"h", TimeUnit::hour},     {"hr", TimeUnit::hour},    {"hrs", TimeUnit::hour},
      {"hour", TimeUnit::hour},  {"hours", TimeUnit::hour},
      {"d", TimeUnit::day},      {"day", TimeUnit::day},    {"days", TimeUnit::day},
      {"w", TimeUnit::week},     {"wk", TimeUnit::week},    {"week", TimeUnit::week},
      {"weeks", TimeUnit::week},
  };
  auto it = units.find(unit);
  if (it == units.end()) throw Error(ErrorCode::InvalidArgument, "unknown window unit in '" + std::string(text) + "'");
  w.unit = it->second;
  return w;
}

std::string window_label(const TimeWindowSpec& window) {
  std::string unit;
  switch (window.unit) {
    case TimeUnit::minute: unit = "minute"; break;
    case TimeUnit::hour: unit = "hour"; break;
    case TimeUnit::day: unit = "day"; break;
    case TimeUnit::week: unit = "week"; break;
  }
  return std::to_string(window.duration) + " " + unit + (window.duration == 1 ? "" : "s");
}

Timestamp truncate_to_unit(Timestamp ts, TimeUnit unit) {
  using namespace std::chrono;
  switch (unit) {
    case TimeUnit::minute: return floor<minutes>(ts);
    case TimeUnit::hour: return floor<hours>(ts);
    case TimeUnit::day: return floor<days>(ts);
    case TimeUnit::week: {
      const sys_days d = floor<days>(ts);
      const weekday wd{d};
      // iso_encoding: Monday = 1 ... Sunday = 7
      return d - days{wd.iso_encoding() - 1};
    }
  }
  return ts;
}

std::string_view to_string(Aspect aspect) {
  switch (aspect) {
    case Aspect::general: return "general";
    case Aspect::organizational: return "organizational";
    case Aspect::activity: return "activity";
  }
  return "general";
}

Aspect parse_aspect(std::string_view text) {
  if (text == "general") return Aspect::general;
  if (text == "organizational" || text == "organisational" || text == "resource") return Aspect::organizational;
  if (text == "activity") return Aspect::activity;
  throw Error(ErrorCode::InvalidArgument, "unknown aspect '" + std::string(text) + "'");
}

std::optional<std::size_t> SDLog::index_of(std::string_view name) const {
  auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) return std::nullopt;
  return static_cast<std::size_t>(it - variables.begin());
}

std::span<const double> SDLog::column(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw Error(ErrorCode::UnknownVariable, "unknown variable '" + std::string(name) + "'", std::string(name));
  return columns[*idx];
}

void check_sdlog(const SDLog& sd) {
  const std::size_t k = sd.steps();
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "sd-log has no steps");
  if (sd.active_mask.size() != k) throw Error(ErrorCode::InvalidArgument, "active mask length mismatch");
  if (sd.columns.size() != sd.variables.size()) throw Error(ErrorCode::InvalidArgument, "column count mismatch");
  for (const auto& col : sd.columns) {
    if (col.size() != k) throw Error(ErrorCode::InvalidArgument, "column length mismatch");
  }
  std::set<std::string> names(sd.variables.begin(), sd.variables.end());
  if (names.size() != sd.variables.size()) throw Error(ErrorCode::InvalidArgument, "duplicate variable names");
  for (std::size_t t = 1; t < k; ++t) {
    const auto gap = sd.step_starts[t] - sd.step_starts[t - 1];
    if (gap <= Seconds{0}) throw Error(ErrorCode::InvalidArgument, "step starts not increasing");
    if (!sd.filtered && gap != sd.window.length()) {
      throw Error(ErrorCode::InvalidArgument, "step spacing differs from the window length");
    }
  }
}

namespace {

// Running mean accumulator per step; empty steps read as 0.
struct StepMean {
  std::vector<double> sum;
  std::vector<double> count;
  explicit StepMean(std::size_t k) : sum(k, 0.0), count(k, 0.0) {}
  void add(std::size_t t, double v) {
    sum[t] += v;
    count[t] += 1.0;
  }
  std::vector<double> values() const {
    std::vector<double> out(sum.size(), 0.0);
    for (std::size_t t = 0; t < sum.size(); ++t) {
      if (count[t] > 0.0) out[t] = sum[t] / count[t];
    }
    return out;
  }
};

std::vector<std::string> select_entities(const std::map<std::string, std::size_t>& counts, const AspectSpec& aspect) {
  std::vector<std::string> chosen;
  if (aspect.entities) {
    std::set<std::string> uniq(aspect.entities->begin(), aspect.entities->end());
    chosen.assign(uniq.begin(), uniq.end());
    return chosen;
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; i < ranked.size() && i < aspect.top_n; ++i) chosen.push_back(ranked[i].first);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

SDLog generate_sdlog(const EventLog& log, const TimeWindowSpec& window, const AspectSpec& aspect) {
  if (log.events.empty()) throw Error(ErrorCode::EmptyLog, "cannot aggregate an empty log");
  if (window.duration < 1) throw Error(ErrorCode::InvalidArgument, "window duration must be >= 1");
  if (aspect.aspect == Aspect::general && aspect.entities) {
    throw Error(ErrorCode::InvalidArgument, "entity restriction applies only to organizational/activity aspects");
  }

  Timestamp first_start = log.events.front().start;
  Timestamp last_complete = log.events.front().complete;
  for (const auto& ev : log.events) {
    first_start = std::min(first_start, ev.start);
    last_complete = std::max(last_complete, ev.complete);
  }

  SDLog sd;
  sd.window = window;
  if (!sd.window.origin) sd.window.origin = truncate_to_unit(first_start, window.unit);
  const Timestamp origin = *sd.window.origin;
  if (origin > first_start) throw Error(ErrorCode::InvalidArgument, "window origin lies after the first event");

  const auto width = window.length().count();
  const std::size_t k = static_cast<std::size_t>((last_complete - origin).count() / width) + 1;
  auto step_of = [&](Timestamp ts) { return static_cast<std::size_t>((ts - origin).count() / width); };

  sd.step_starts.resize(k);
  for (std::size_t t = 0; t < k; ++t) sd.step_starts[t] = origin + Seconds{static_cast<long long>(t) * width};

  sd.active_mask.assign(k, false);
  for (const auto& ev : log.events) {
    for (std::size_t t = step_of(ev.start); t <= step_of(ev.complete); ++t) sd.active_mask[t] = true;
  }

  auto add = [&](std::string name, std::vector<double> values) {
    sd.variables.push_back(std::move(name));
    sd.columns.push_back(std::move(values));
  };

  if (aspect.aspect == Aspect::general) {
    std::vector<double> arrivals(k, 0.0), finishes(k, 0.0), in_process(k, 0.0), num_events(k, 0.0);
    StepMean service(k), waiting(k);
    std::vector<std::set<std::string>> resources(k);

    for (const auto& ev : log.events) {
      const auto t = step_of(ev.complete);
      num_events[t] += 1.0;
      service.add(t, to_minutes(ev.complete - ev.start));
      if (ev.resource) {
        for (std::size_t s = step_of(ev.start); s <= t; ++s) resources[s].insert(*ev.resource);
      }
    }
    for (const auto& [id, idx] : group_by_case(log)) {
      Timestamp first = log.events[idx.front()].start;
      Timestamp last = log.events[idx.front()].complete;
      for (auto i : idx) {
        first = std::min(first, log.events[i].start);
        last = std::max(last, log.events[i].complete);
      }
      arrivals[step_of(first)] += 1.0;
      finishes[step_of(last)] += 1.0;
      for (std::size_t j = 1; j < idx.size(); ++j) {
        const auto& prev = log.events[idx[j - 1]];
        const auto& next = log.events[idx[j]];
        const double gap = std::max(0.0, to_minutes(next.start - prev.complete));
        waiting.add(step_of(next.start), gap);
      }
    }
    double stock = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      stock += arrivals[t] - finishes[t];
      in_process[t] = stock;
    }
    std::vector<double> unique_resources(k);
    for (std::size_t t = 0; t < k; ++t) unique_resources[t] = static_cast<double>(resources[t].size());

    add("arrival_rate", std::move(arrivals));
    add("finish_rate", std::move(finishes));
    add("num_in_process", std::move(in_process));
    add("avg_service_time", service.values());
    add("avg_waiting_time", waiting.values());
    add("num_unique_resources", std::move(unique_resources));
    add("num_events", std::move(num_events));
  } else {
    const bool by_resource = aspect.aspect == Aspect::organizational;
    auto key_of = [&](const Event& ev) -> std::optional<std::string> {
      if (by_resource) return ev.resource;
      return ev.activity;
    };

    std::map<std::string, std::size_t> counts;
    for (const auto& ev : log.events) {
      if (auto key = key_of(ev)) ++counts[*key];
    }
    std::vector<std::string> entities = select_entities(counts, aspect);
    const std::set<std::string> selected(entities.begin(), entities.end());
    bool pooled = false;
    for (const auto& [name, n] : counts) {
      if (!selected.count(name)) pooled = true;
    }
    if (pooled) entities.emplace_back(kOtherEntity);

    std::map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < entities.size(); ++i) slot[entities[i]] = i;

    std::vector<std::vector<double>> freq(entities.size(), std::vector<double>(k, 0.0));
    std::vector<StepMean> durations(entities.size(), StepMean(k));
    for (const auto& ev : log.events) {
      auto key = key_of(ev);
      if (!key) continue;  // events without a resource carry no organizational signal
      const std::size_t e = selected.count(*key) ? slot[*key] : slot[std::string(kOtherEntity)];
      const auto t = step_of(ev.complete);
      freq[e][t] += 1.0;
      durations[e].add(t, to_minutes(ev.complete - ev.start));
    }
    const std::string count_prefix = by_resource ? "workload_" : "frequency_";
    const std::string mean_prefix = by_resource ? "avg_service_time_" : "avg_duration_";
    for (std::size_t e = 0; e < entities.size(); ++e) {
      add(count_prefix + entities[e], std::move(freq[e]));
      add(mean_prefix + entities[e], durations[e].values());
    }
  }

  check_sdlog(sd);
  return sd;
}

SDLog filter_active(const SDLog& sd) {
  SDLog out;
  out.window = sd.window;
  out.variables = sd.variables;
  out.columns.assign(sd.columns.size(), {});
  for (std::size_t t = 0; t < sd.steps(); ++t) {
    if (!sd.active_mask[t]) continue;
    out.step_starts.push_back(sd.step_starts[t]);
    out.active_mask.push_back(true);
    for (std::size_t j = 0; j < sd.columns.size(); ++j) out.columns[j].push_back(sd.columns[j][t]);
  }
  if (out.step_starts.empty()) throw Error(ErrorCode::AllStepsInactive, "no active steps in sd-log");
  out.filtered = sd.filtered || out.steps() != sd.steps();
  return out;
}

std::string export_sdlog_csv(const SDLog& sd) {
  csv::Row header = {"step_start", "active"};
  header.insert(header.end(), sd.variables.begin(), sd.variables.end());
  std::string out = csv::join(header);
  out.push_back('\n');
  for (std::size_t t = 0; t < sd.steps(); ++t) {
    csv::Row row = {format_timestamp(sd.step_starts[t]), sd.active_mask[t] ? "1" : "0"};
    for (const auto& col : sd.columns) row.push_back(format_number(col[t]));
    out += csv::join(row);
    out.push_back('\n');
  }
  return out;
}

SDLog parse_sdlog_csv(std::string_view text, TimeWindowSpec window, bool filtered) {
  auto rows = csv::parse(text);
  if (rows.size() < 2) throw Error(ErrorCode::InvalidArgument, "sd-log csv needs a header and at least one row");
  const auto& header = rows.front();
  if (header.size() < 2 || header[0] != "step_start" || header[1] != "active") {
    throw Error(ErrorCode::InvalidArgument, "sd-log csv header must start with step_start,active");
  }
  SDLog sd;
  sd.filtered = filtered;
  sd.variables.assign(header.begin() + 2, header.end());
  sd.columns.assign(sd.variables.size(), {});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::InvalidArgument, "sd-log csv row " + std::to_string(r) + " has wrong field count");
    }
    auto ts = parse_timestamp(row[0]);
    if (!ts) throw Error(ErrorCode::BadTimestamp, "sd-log csv row " + std::to_string(r) + ": bad step_start", row[0]);
    sd.step_starts.push_back(*ts);
    if (row[1] != "0" && row[1] != "1") {
      throw Error(ErrorCode::InvalidArgument, "sd-log csv row " + std::to_string(r) + ": active must be 0 or 1");
    }
    sd.active_mask.push_back(row[1] == "1");
    for (std::size_t j = 2; j < row.size(); ++j) {
      auto v = parse_number(row[j]);
      if (!v) throw Error(ErrorCode::InvalidArgument, "sd-log csv row " + std::to_string(r) + ": bad value '" + row[j] + "'");
      sd.columns[j - 2].push_back(*v);
    }
  }
  if (!window.origin) window.origin = sd.step_starts.front();
  sd.window = window;
  check_sdlog(sd);
  return sd;
}

}  // namespace pmsd
