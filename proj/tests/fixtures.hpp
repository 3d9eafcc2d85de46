#pragma once

// Shared fixtures and brute-force oracles for the unit and acceptance tests.
// Oracles deliberately avoid the library's own helpers where they compute
// the value under test.

#include "pmsd/event_log.hpp"
#include "pmsd/model.hpp"
#include "pmsd/relations.hpp"
#include "pmsd/sdlog.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fx {

inline pmsd::Timestamp ts(const std::string& text) { return *pmsd::parse_timestamp(text); }

inline std::string l1_csv() {
  return "case:concept:name,concept:name,org:resource,start_timestamp,time:timestamp\n"
         "c1,A,r1,2020-01-01T08:10:00Z,2020-01-01T08:20:00Z\n"
         "c1,B,r2,2020-01-01T08:30:00Z,2020-01-01T08:50:00Z\n"
         "c2,A,r1,2020-01-01T08:40:00Z,2020-01-01T08:55:00Z\n"
         "c2,B,r2,2020-01-01T09:05:00Z,2020-01-01T09:30:00Z\n"
         "c3,A,r1,2020-01-01T09:10:00Z,2020-01-01T09:25:00Z\n";
}

inline pmsd::EventLog l1() { return pmsd::parse_event_log(l1_csv()); }

// Up to `max_events` events over a few cases within two days; per case the
// events are sequential, occasionally overlapping or without a resource.
inline pmsd::EventLog random_log(std::mt19937_64& rng, std::size_t max_events = 50) {
  std::uniform_int_distribution<int> n_events(1, static_cast<int>(max_events));
  std::uniform_int_distribution<int> offset(0, 2 * 24 * 3600);
  std::uniform_int_distribution<int> dur(0, 3 * 3600);
  std::uniform_int_distribution<int> gap(-600, 2 * 3600);
  std::uniform_int_distribution<int> act(0, 4);
  std::uniform_int_distribution<int> res(0, 4);
  const pmsd::Timestamp base = ts("2021-03-01T00:00:00Z");

  const int total = n_events(rng);
  std::uniform_int_distribution<int> n_cases(1, std::max(1, total / 2));
  const int cases = n_cases(rng);
  std::vector<int> per_case(cases, 1);
  std::uniform_int_distribution<int> pick(0, cases - 1);
  for (int i = cases; i < total; ++i) ++per_case[pick(rng)];

  pmsd::EventLog log;
  for (int c = 0; c < cases; ++c) {
    pmsd::Timestamp t = base + pmsd::Seconds{offset(rng)};
    for (int e = 0; e < per_case[c]; ++e) {
      pmsd::Event ev;
      ev.case_id = "case" + std::to_string(c);
      ev.activity = std::string(1, static_cast<char>('A' + act(rng)));
      const int r = res(rng);
      if (r > 0) ev.resource = "res" + std::to_string(r);
      ev.start = t;
      ev.complete = t + pmsd::Seconds{dur(rng)};
      log.events.push_back(ev);
      t = std::max(base, ev.complete + pmsd::Seconds{gap(rng)});
    }
  }
  std::stable_sort(log.events.begin(), log.events.end(), [](const auto& a, const auto& b) {
    return a.start != b.start ? a.start < b.start : a.complete < b.complete;
  });
  return log;
}

inline std::string to_csv(const pmsd::EventLog& log) { return pmsd::write_event_log_csv(log); }

// Hourly SD-log, all steps active, from named columns.
inline pmsd::SDLog make_sdlog(const std::vector<std::pair<std::string, std::vector<double>>>& cols) {
  pmsd::SDLog sd;
  sd.window = pmsd::parse_window("1h");
  const auto origin = ts("2020-01-01T00:00:00Z");
  sd.window.origin = origin;
  const std::size_t k = cols.front().second.size();
  for (std::size_t t = 0; t < k; ++t) sd.step_starts.push_back(origin + pmsd::Seconds{3600 * static_cast<long long>(t)});
  sd.active_mask.assign(k, true);
  for (const auto& [name, values] : cols) {
    sd.variables.push_back(name);
    sd.columns.push_back(values);
  }
  return sd;
}

// ---------------------------------------------------------------------------
// Synthetic linear system as an event log. Hourly steps; the origin is one
// step before the first event so that step 0 is empty. Every case arrives in
// step t and finishes in step t + 1, hence finish_rate[t] = arrival_rate[t-1]
// and num_in_process[t] = arrival_rate[t].

struct LinearSystemLog {
  std::string csv;
  pmsd::Timestamp origin;
  std::vector<double> arrivals;  // per step, step 0 included
};

inline LinearSystemLog linear_system_log(std::size_t steps = 40, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_int_distribution<int> within(0, 1799);
  LinearSystemLog out;
  out.origin = ts("2022-05-02T00:00:00Z");
  out.arrivals.assign(steps + 2, 0.0);
  std::ostringstream csv;
  csv << "case:concept:name,concept:name,org:resource,start_timestamp,time:timestamp\n";
  int id = 0;
  for (std::size_t t = 1; t <= steps; ++t) {
    const int n = count(rng);
    out.arrivals[t] = n;
    for (int i = 0; i < n; ++i) {
      const auto start = out.origin + pmsd::Seconds{3600 * static_cast<long long>(t) + within(rng)};
      const auto end = out.origin + pmsd::Seconds{3600 * static_cast<long long>(t + 1) + within(rng)};
      csv << "k" << id++ << ",serve,desk," << pmsd::format_timestamp(start) << "," << pmsd::format_timestamp(end) << "\n";
    }
  }
  out.csv = csv.str();
  return out;
}

// Selections and mapping that describe the system above.
inline std::string linear_system_selections() {
  return R"({
  "relations": [
    {"source": "arrival_rate", "target": "num_in_process", "lag": 0},
    {"source": "arrival_rate", "target": "finish_rate", "lag": 1}
  ],
  "mapping": {
    "arrival_rate": {"kind": "flow", "inflow_to": "num_in_process"},
    "finish_rate": {"kind": "flow", "outflow_from": "num_in_process"},
    "num_in_process": {"kind": "stock", "initial_value": 0}
  }
})";
}

// ---------------------------------------------------------------------------
// Poisson arrivals during office hours (08:00-18:00, peak mid-day), with
// weekends at 30% of the weekday volume. Nothing arrives at night.

inline pmsd::EventLog daily_profile_log(int days = 30, std::uint64_t seed = 20240601) {
  std::mt19937_64 rng(seed);
  const pmsd::Timestamp base = ts("2023-01-02T00:00:00Z");  // a Monday
  pmsd::EventLog log;
  int id = 0;
  std::uniform_real_distribution<double> at(0.0, 3600.0);
  std::exponential_distribution<double> service(1.0 / 20.0);
  for (int d = 0; d < days; ++d) {
    const double day_factor = d % 7 >= 5 ? 0.3 : 1.0;
    for (int h = 8; h < 18; ++h) {
      std::poisson_distribution<int> arrivals(day_factor * (6.0 + 4.0 * std::sin((h - 8) * 3.14159265358979 / 10.0)));
      const int n = arrivals(rng);
      for (int i = 0; i < n; ++i) {
        pmsd::Event ev;
        ev.case_id = "d" + std::to_string(id++);
        ev.activity = "handle";
        ev.resource = "agent" + std::to_string(id % 3);
        ev.start = base + pmsd::Seconds{static_cast<long long>((d * 24 + h) * 3600 + at(rng))};
        ev.complete = ev.start + pmsd::Seconds{static_cast<long long>(60.0 * service(rng))};
        log.events.push_back(ev);
      }
    }
  }
  std::stable_sort(log.events.begin(), log.events.end(), [](const auto& a, const auto& b) {
    return a.start != b.start ? a.start < b.start : a.complete < b.complete;
  });
  return log;
}

// ---------------------------------------------------------------------------
// Model-level fixtures

inline pmsd::Link link_of(std::string s, std::string t, int lag = 0) {
  return {std::move(s), std::move(t), pmsd::Polarity::positive, lag, pmsd::RelationKind::linear};
}

// Known linear lagged system, generated with the engine's conventions:
// stock inputs read the start-of-step level, reads before step 0 take the
// step-0 value.
//   x        exogenous
//   y[t]   = 2 + 0.5 x[t] - 0.3 x[t-1]
//   in[t]  = 1 + 0.2 y[t-2]
//   out[t] = 0.5 + 0.1 S_start[t]
//   S_end[t] = S_start[t] + in[t] - out[t], S_start[0] = 10
struct ClosedLoop {
  pmsd::SFD sfd;
  pmsd::SDLog sd;
};

inline ClosedLoop closed_loop(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<double> x(k), y(k), in(k), out(k), s(k);
  for (auto& v : x) v = u(rng);
  auto at = [](const std::vector<double>& v, long i) { return v[i < 0 ? 0 : static_cast<std::size_t>(i)]; };
  double level = 10;
  for (std::size_t t = 0; t < k; ++t) {
    const long i = static_cast<long>(t);
    y[t] = 2 + 0.5 * x[t] - 0.3 * at(x, i - 1);
    in[t] = 1 + 0.2 * at(y, i - 2);
    out[t] = 0.5 + 0.1 * level;
    level = level + in[t] - out[t];
    s[t] = level;
  }
  ClosedLoop c;
  c.sfd.stocks = {{"S", 10}};
  c.sfd.flows = {{"in", std::string("S"), std::nullopt}, {"out", std::nullopt, std::string("S")}};
  c.sfd.auxiliaries = {"x", "y"};
  c.sfd.links = {link_of("x", "y"), link_of("x", "y", 1), link_of("y", "in", 2), link_of("S", "out")};
  pmsd::canonicalize(c.sfd);
  c.sd = make_sdlog({{"x", x}, {"y", y}, {"in", in}, {"out", out}, {"S", s}});
  return c;
}

// Columns with planted structure plus noise, for the property tests.
inline pmsd::SDLog planted_sdlog(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kk(16, 30), mm(2, 4), lag(0, 3);
  std::normal_distribution<double> n01(0, 1);
  const int k = kk(rng), m = mm(rng);
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  std::vector<double> base(k);
  for (auto& v : base) v = n01(rng);
  cols.push_back({"v0", base});
  for (int j = 1; j < m; ++j) {
    std::vector<double> c(k);
    const int l = lag(rng);
    const int form = j % 3;
    for (int t = 0; t < k; ++t) {
      const double src = base[(t - l + k) % k];
      const double signal = form == 0 ? src : form == 1 ? -2 * src + 1 : src * src;
      c[t] = signal + 0.3 * n01(rng);
    }
    cols.push_back({"v" + std::to_string(j), c});
  }
  return make_sdlog(cols);
}

// ---------------------------------------------------------------------------
// Oracles

// Direct enumeration of the general-aspect variables of one step [s, e).
struct StepOracle {
  double arrivals = 0, finishes = 0, service = 0, waiting = 0, resources = 0, events = 0;
  bool active = false;
};

inline std::vector<StepOracle> brute_force_general(const pmsd::EventLog& log, pmsd::Timestamp origin, long long width,
                                                   std::size_t k) {
  std::vector<StepOracle> out(k);
  for (std::size_t t = 0; t < k; ++t) {
    const auto s = origin + pmsd::Seconds{width * static_cast<long long>(t)};
    const auto e = s + pmsd::Seconds{width};
    auto in = [&](pmsd::Timestamp x) { return x >= s && x < e; };
    std::map<std::string, std::pair<pmsd::Timestamp, pmsd::Timestamp>> span;
    std::map<std::string, std::vector<const pmsd::Event*>> by_case;
    double svc_sum = 0, svc_n = 0, wait_sum = 0, wait_n = 0;
    std::set<std::string> res;
    for (const auto& ev : log.events) {
      auto [it, fresh] = span.try_emplace(ev.case_id, ev.start, ev.complete);
      if (!fresh) {
        it->second.first = std::min(it->second.first, ev.start);
        it->second.second = std::max(it->second.second, ev.complete);
      }
      by_case[ev.case_id].push_back(&ev);
      if (in(ev.complete)) {
        out[t].events += 1;
        svc_sum += (ev.complete - ev.start).count() / 60.0;
        svc_n += 1;
      }
      // overlap of the closed event interval with the half-open step
      if (ev.start < e && ev.complete >= s) {
        out[t].active = true;
        if (ev.resource) res.insert(*ev.resource);
      }
    }
    for (const auto& [c, sp] : span) {
      if (in(sp.first)) out[t].arrivals += 1;
      if (in(sp.second)) out[t].finishes += 1;
    }
    for (auto& [c, evs] : by_case) {
      for (std::size_t j = 1; j < evs.size(); ++j) {
        if (in(evs[j]->start)) {
          wait_sum += std::max(0.0, (evs[j]->start - evs[j - 1]->complete).count() / 60.0);
          wait_n += 1;
        }
      }
    }
    out[t].service = svc_n > 0 ? svc_sum / svc_n : 0.0;
    out[t].waiting = wait_n > 0 ? wait_sum / wait_n : 0.0;
    out[t].resources = static_cast<double>(res.size());
  }
  return out;
}

inline double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nan("");
  return sxy / std::sqrt(sxx * syy);
}

inline std::vector<double> naive_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) less += 1;
      if (w == v[i]) equal += 1;
    }
    r[i] = less + (equal + 1) / 2.0;
  }
  return r;
}

inline double naive_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return naive_pearson(naive_ranks(x), naive_ranks(y));
}

// Signed sqrt(R^2) of y ~ a x^2 + b x + c by explicit 3x3 normal equations
// with Cramer's rule on centred x.
inline double naive_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0;
  for (double v : x) mx += v;
  mx /= n;
  double lo = x[0], hi = x[0];
  for (double v : x) lo = std::min(lo, v), hi = std::max(hi, v);
  double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] - mx;
    double p = 1;
    for (int d = 0; d < 5; ++d) {
      s[d] += p;
      if (d < 3) t[d] += p * y[i];
      p *= u;
    }
  }
  // unknowns (c, b, a) for powers (0, 1, 2)
  auto det3 = [](double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  double A[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
  const double D = det3(A);
  double coef[3];
  for (int c = 0; c < 3; ++c) {
    double M[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M[i][j] = j == c ? t[i] : A[i][j];
    coef[c] = det3(M) / D;
  }
  double my = 0;
  for (double v : y) my += v;
  my /= n;
  double ssr = 0, sst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] - mx;
    const double f = coef[0] + coef[1] * u + coef[2] * u * u;
    ssr += (y[i] - f) * (y[i] - f);
    sst += (y[i] - my) * (y[i] - my);
  }
  if (sst == 0) return std::nan("");
  const double r2 = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
  auto fit = [&](double v) { return coef[0] + coef[1] * (v - mx) + coef[2] * (v - mx) * (v - mx); };
  const double diff = fit(hi) - fit(lo);
  const double scale = std::max({std::abs(fit(hi)), std::abs(fit(lo)), 1.0});
  const double sign = std::abs(diff) <= 1e-9 * scale ? 1.0 : (diff > 0 ? 1.0 : -1.0);
  return sign * std::sqrt(r2);
}

// Exhaustive relation detection: every (x, y, lag, kind), keep the best lag
// per (pair, kind), then drop kinds beaten by a higher-precedence kind at
// the same lag.
inline std::vector<pmsd::RelationCandidate> naive_relations(const pmsd::SDLog& sd, const pmsd::RelationOptions& o) {
  using pmsd::RelationKind;
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < sd.columns.size(); ++j) {
    const auto& c = sd.columns[j];
    if (std::any_of(c.begin(), c.end(), [&](double v) { return v != c.front(); })) live.push_back(j);
  }
  std::vector<pmsd::RelationCandidate> out;
  const std::size_t k = sd.steps();
  for (auto i : live) {
    for (auto j : live) {
      std::map<int, pmsd::RelationCandidate> best;  // by kind
      for (int lag = (i == j ? 1 : 0); lag <= o.max_lag; ++lag) {
        if (static_cast<std::size_t>(lag) >= k) break;
        std::vector<double> x(sd.columns[i].begin(), sd.columns[i].end() - lag);
        std::vector<double> y(sd.columns[j].begin() + lag, sd.columns[j].end());
        if (x.size() < o.min_support) continue;
        const double vals[3] = {naive_pearson(x, y), naive_spearman(x, y), naive_quadratic(x, y)};
        for (int kind = 0; kind < 3; ++kind) {
          const double v = vals[kind];
          if (std::isnan(v) || std::abs(v) < o.threshold) continue;
          auto it = best.find(kind);
          if (it == best.end() || std::abs(v) > it->second.strength + 1e-12) {
            pmsd::RelationCandidate c;
            c.source = sd.variables[i];
            c.target = sd.variables[j];
            c.lag = lag;
            c.kind = static_cast<RelationKind>(kind);
            c.coefficient = v;
            c.polarity = pmsd::polarity_of(v);
            c.strength = std::abs(v);
            c.support = x.size();
            c.auto_relation = i == j;
            best[kind] = c;
          }
        }
      }
      for (int kind = 0; kind < 3; ++kind) {
        auto it = best.find(kind);
        if (it == best.end()) continue;
        bool shadowed = false;
        for (int better = 0; better < kind; ++better) {
          auto b = best.find(better);
          if (b != best.end() && b->second.lag == it->second.lag) shadowed = true;
        }
        if (!shadowed) out.push_back(it->second);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source, a.target, a.lag, a.kind) < std::tie(b.source, b.target, b.lag, b.kind);
  });
  return out;
}

// Two-sample KS by evaluating both empirical CDFs at every pooled point.
inline double naive_ks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pts(a);
  pts.insert(pts.end(), b.begin(), b.end());
  double d = 0;
  for (double p : pts) {
    double fa = 0, fb = 0;
    for (double v : a) fa += v <= p;
    for (double v : b) fb += v <= p;
    d = std::max(d, std::abs(fa / a.size() - fb / b.size()));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Random models for .mdl round trips (at most 10 elements).

inline std::string random_name(std::mt19937_64& rng, std::size_t i) {
  static const char* stems[] = {"arrival rate", "queue", "Workload", "speed", "x", "backlog_2", "Time", "a-b", "cap",
                                "service time"};
  std::uniform_int_distribution<int> pick(0, 9);
  return std::string(stems[pick(rng)]) + "_" + std::to_string(i);
}

inline pmsd::CLD random_cld(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_nodes(2, 10), lag(0, 4), kind(0, 2), sign(0, 1);
  std::uniform_real_distribution<double> strength(0.5, 1.0);
  const int n = n_nodes(rng);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(random_name(rng, i));
  std::uniform_int_distribution<int> node(0, n - 1);
  std::vector<pmsd::RelationCandidate> rels;
  const int edges = std::uniform_int_distribution<int>(1, 2 * n)(rng);
  for (int e = 0; e < edges; ++e) {
    pmsd::RelationCandidate c;
    c.source = names[node(rng)];
    c.target = names[node(rng)];
    c.lag = lag(rng);
    if (c.source == c.target && c.lag == 0) c.lag = 1;
    c.kind = static_cast<pmsd::RelationKind>(kind(rng));
    c.strength = std::round(strength(rng) * 1e6) / 1e6;
    c.polarity = sign(rng) ? pmsd::Polarity::positive : pmsd::Polarity::negative;
    c.coefficient = c.polarity == pmsd::Polarity::positive ? c.strength : -c.strength;
    rels.push_back(c);
  }
  return pmsd::build_cld(rels);
}

inline pmsd::SFD random_sfd(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_stocks(1, 3), n_flows(1, 3), n_aux(0, 2), n_const(0, 2);
  std::uniform_int_distribution<int> lag(0, 3), sign(0, 1), kind(0, 2);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  pmsd::SFD sfd;
  std::size_t idx = 0;
  const int ns = n_stocks(rng), nf = n_flows(rng), na = n_aux(rng), nc = n_const(rng);
  for (int i = 0; i < ns; ++i) sfd.stocks.push_back({random_name(rng, idx++), std::round(value(rng) * 100) / 100});
  std::uniform_int_distribution<int> stock(0, ns - 1), attach(0, 2);
  for (int i = 0; i < nf; ++i) {
    pmsd::Flow f{random_name(rng, idx++), std::nullopt, std::nullopt};
    const int a = attach(rng);
    const int s1 = stock(rng);
    if (a == 0 || a == 2) f.inflow_to = sfd.stocks[s1].name;
    if (a == 1 || a == 2) {
      int s2 = stock(rng);
      if (a == 2 && ns > 1) {
        while (s2 == s1) s2 = stock(rng);
      }
      if (a == 2 && ns == 1) {
        f.outflow_from.reset();
      } else {
        f.outflow_from = sfd.stocks[s2].name;
      }
    }
    sfd.flows.push_back(f);
  }
  for (int i = 0; i < na; ++i) sfd.auxiliaries.push_back(random_name(rng, idx++));
  for (int i = 0; i < nc; ++i) sfd.constants.push_back({random_name(rng, idx++), std::round(value(rng) * 1000) / 1000});

  const auto names = sfd.element_names();
  // Links only go "forward" in a random order of non-stock elements at lag 0,
  // which keeps the lag-0 graph acyclic; lagged links may go anywhere.
  std::vector<std::string> order = names;
  std::shuffle(order.begin(), order.end(), rng);
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
  const int links = std::uniform_int_distribution<int>(0, static_cast<int>(2 * names.size()))(rng);
  std::set<std::tuple<std::string, std::string, int>> seen;
  for (int l = 0; l < links; ++l) {
    pmsd::Link link;
    link.source = names[pick(rng)];
    link.target = names[pick(rng)];
    if (sfd.find_constant(link.target)) continue;  // constants take no inputs
    link.lag = lag(rng);
    if (link.lag == 0 && rank[link.source] >= rank[link.target]) link.lag = 1;
    link.polarity = sign(rng) ? pmsd::Polarity::positive : pmsd::Polarity::negative;
    link.kind = static_cast<pmsd::RelationKind>(kind(rng));
    if (!seen.insert({link.source, link.target, link.lag}).second) continue;
    sfd.links.push_back(link);
  }
  pmsd::canonicalize(sfd);
  return sfd;
}

}  // namespace fx
