// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "fixtures.hpp"

#include "pmsd/error.hpp"
#include "pmsd/json_io.hpp"
#include "pmsd/mdl.hpp"
#include "pmsd/project.hpp"
#include "pmsd/simulation.hpp"
#include "pmsd/validation.hpp"
#include "pmsd/window_select.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <unistd.h>

using namespace pmsd;
namespace fs = std::filesystem;

namespace {

// Collects failure reasons for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

int failed = 0;

void criterion(const std::string& name, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  if (c.failures.empty()) {
    std::cout << "PASS  " << name << "\n";
    return;
  }
  ++failed;
  std::cout << "FAIL  " << name << "\n";
  const std::size_t shown = std::min<std::size_t>(c.failures.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) std::cout << "        " << c.failures[i] << "\n";
  if (c.failures.size() > shown) std::cout << "        ... " << c.failures.size() - shown << " more\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> col(const SDLog& sd, std::string_view name) {
  const auto c = sd.column(name);
  return {c.begin(), c.end()};
}

std::string str(double v) { return format_number(v); }

fs::path scratch(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("pmsd-acceptance-" + std::to_string(::getpid()) + "-" + tag);
  fs::remove_all(p);
  return p;
}

const RelationCandidate* find(const RelationReport& r, std::string_view s, std::string_view t) {
  for (const auto& c : r.candidates) {
    if (c.source == s && c.target == t) return &c;
  }
  return nullptr;
}

void l1_end_to_end(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  auto p = Project::open(scratch("l1"));
  run_step(p, "ingest", {{"csv", fx::l1_csv()}});
  const auto summary = Json::parse(p.read(run_step(p, "summary").front()));
  const auto dfg = Json::parse(p.read(run_step(p, "dfg").front()));
  run_step(p, "sdlog", {{"window", "1h"}, {"aspect", "general"}});
  const auto sd = load_sdlog(p, ArtifactKind::sdlog_all);
  const double elapsed = seconds_since(t0);

  c.expect(summary.at("num_events") == 5, "num_events " + summary.at("num_events").dump());
  c.expect(summary.at("num_cases") == 3, "num_cases " + summary.at("num_cases").dump());
  const Json edges = Json::array({{{"source", "A"}, {"target", "B"}, {"count", 2}}});
  c.expect(dfg.at("edges") == edges, "DFG edges " + dfg.at("edges").dump());
  // hand enumeration, 08:00-09:00 and 09:00-10:00:
  // arrivals c1,c2 | c3; finishes c1 | c2,c3; services (10+20+15)/3 | (25+15)/2
  c.expect(col(sd, "arrival_rate") == std::vector<double>{2, 1}, "arrival_rate");
  c.expect(col(sd, "finish_rate") == std::vector<double>{1, 2}, "finish_rate");
  c.expect(col(sd, "avg_service_time") == std::vector<double>{15, 20}, "avg_service_time");
  c.expect(elapsed < 1.0, "runtime " + str(elapsed) + " s");
  fs::remove_all(p.root());
}

void conservation(Check& c) {
  std::mt19937_64 rng(20240101);
  const char* windows[] = {"1h", "30min", "2h", "1d"};
  for (int i = 0; i < 100; ++i) {
    const auto log = fx::random_log(rng, 50);
    const std::string tag = "log " + std::to_string(i) + ": ";
    c.expect(log.events.size() <= 50, tag + "more than 50 events");
    const auto s = summarize(log);
    const auto sd = generate_sdlog(log, parse_window(windows[i % 4]));
    const auto arr = col(sd, "arrival_rate"), fin = col(sd, "finish_rate"), nip = col(sd, "num_in_process");
    double sa = 0, sf = 0, prev = 0;
    for (std::size_t t = 0; t < sd.steps(); ++t) {
      sa += arr[t];
      sf += fin[t];
      c.expect(nip[t] == prev + arr[t] - fin[t], tag + "stock recurrence at step " + std::to_string(t));
      prev = nip[t];
    }
    c.expect(sa == static_cast<double>(s.num_cases), tag + "sum arrival_rate " + str(sa));
    c.expect(sf == static_cast<double>(s.num_cases), tag + "sum finish_rate " + str(sf));

    // edges counted straight from the per-case orderings
    std::size_t edges = 0;
    for (const auto& [e, n] : build_dfg(log).edges) edges += n;
    std::map<std::string, std::size_t> per_case;
    for (const auto& ev : log.events) ++per_case[ev.case_id];
    c.expect(edges == log.events.size() - per_case.size(), tag + "DFG edge sum " + std::to_string(edges));
    c.expect(s.num_cases == per_case.size(), tag + "num_cases");
  }
}

void relation_detection(Check& c) {
  auto strong = [&](const RelationCandidate* r, const std::string& what, RelationKind kind, int lag, Polarity pol) {
    if (!r) {
      c.expect(false, what + ": not detected");
      return;
    }
    c.expect(r->strength >= 0.999, what + ": strength " + str(r->strength));
    c.expect(r->kind == kind, what + ": kind " + std::string(to_string(r->kind)));
    c.expect(r->lag == lag, what + ": lag " + std::to_string(r->lag));
    c.expect(r->polarity == pol, what + ": polarity");
  };

  std::vector<double> x, y2x, ysq;
  for (int i = 1; i <= 12; ++i) {
    x.push_back(i);
    y2x.push_back(2.0 * i);
  }
  RelationOptions lag0;
  lag0.max_lag = 0;
  strong(find(detect_relations(fx::make_sdlog({{"x", x}, {"y", y2x}}), lag0), "x", "y"), "y=2x", RelationKind::linear,
         0, Polarity::positive);

  // y[t] = x[t-2] on a non-monotone driver so other lags do not tie
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n01(0, 1);
  std::vector<double> drv(30), shifted(30);
  for (auto& v : drv) v = n01(rng);
  for (std::size_t t = 0; t < 30; ++t) shifted[t] = t >= 2 ? drv[t - 2] : n01(rng);
  RelationOptions lag2;
  lag2.max_lag = 3;
  strong(find(detect_relations(fx::make_sdlog({{"x", drv}, {"y", shifted}}), lag2), "x", "y"), "y[t]=x[t-2]",
         RelationKind::linear, 2, Polarity::positive);

  const std::vector<double> sym{-3, -2, -1, 0, 1, 2, 3, -3, -2, -1, 0, 1, 2, 3};
  for (double v : sym) ysq.push_back(v * v);
  strong(find(detect_relations(fx::make_sdlog({{"x", sym}, {"y", ysq}}), lag0), "x", "y"), "y=x^2",
         RelationKind::nonlinear, 0, Polarity::positive);

  // affine rescaling of one column keeps every strength, flips polarity on negative scale
  std::uniform_real_distribution<double> scale(0.01, 100), shift(-1000, 1000);
  std::uniform_int_distribution<int> coin(0, 1);
  RelationOptions o;
  o.max_lag = 3;
  o.threshold = 0.5;
  for (int i = 0; i < 100; ++i) {
    const auto sd = fx::planted_sdlog(rng);
    const auto base = detect_relations(sd, o);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, sd.variables.size() - 1)(rng);
    const double a = (coin(rng) ? 1.0 : -1.0) * scale(rng), b = shift(rng);
    auto moved = sd;
    for (auto& v : moved.columns[j]) v = a * v + b;
    const auto r = detect_relations(moved, o);
    const std::string tag = "rescaling " + std::to_string(i) + ": ";
    if (r.candidates.size() != base.candidates.size()) {
      c.expect(false, tag + "candidate count changed");
      continue;
    }
    for (std::size_t q = 0; q < r.candidates.size(); ++q) {
      const auto& p0 = base.candidates[q];
      const auto& p1 = r.candidates[q];
      c.expect(p0.source == p1.source && p0.target == p1.target && p0.lag == p1.lag && p0.kind == p1.kind,
               tag + "candidate identity changed");
      c.expect(std::abs(p0.strength - p1.strength) <= 1e-9, tag + "strength moved by " + str(p1.strength - p0.strength));
      const bool touches = (p0.source == sd.variables[j]) != (p0.target == sd.variables[j]);
      const bool monotone = p0.kind != RelationKind::nonlinear;
      if (monotone) c.expect((p0.polarity == p1.polarity) == !(a < 0 && touches), tag + "polarity");
    }
  }
}

void stability(Check& c) {
  const auto log = fx::daily_profile_log(30, 20240601);
  const std::vector<WindowCandidate> cands{{parse_window("1 day"), "1 day"}, {parse_window("7 hours"), "7 hours"}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = assess_windows(log, cands, ModelKind::ar_p);
  const double elapsed = seconds_since(t0);
  const auto& day = report.candidates[0];
  const auto& seven = report.candidates[1];
  c.expect(day.viable && seven.viable, "candidate not viable");
  c.expect(day.aggregate_score < seven.aggregate_score,
           "score(1 day) " + str(day.aggregate_score) + " >= score(7 hours) " + str(seven.aggregate_score));
  c.expect(elapsed < 30.0, "runtime " + str(elapsed) + " s");

  const std::vector<double> flat(12, 5.0);
  for (auto kind : {ModelKind::naive_last, ModelKind::mean}) {
    const auto e = rolling_forecast_errors(flat, 9, kind);
    c.expect(e.rmse == 0.0 && e.mape == 0.0, std::string(to_string(kind)) + ": constant series error " + str(e.rmse));
  }

  // one single-event case every hour: arrival_rate is constant on 1h windows
  EventLog hourly;
  const auto base = fx::ts("2021-03-01T00:00:00Z");
  for (int h = 0; h < 48; ++h) {
    Event ev;
    ev.case_id = "h" + std::to_string(h);
    ev.activity = "tick";
    ev.start = base + Seconds{h * 3600 + 600};
    ev.complete = ev.start + Seconds{600};
    hourly.events.push_back(ev);
  }
  for (auto kind : {ModelKind::naive_last, ModelKind::mean}) {
    const auto r = assess_windows(hourly, {{parse_window("1h"), "1h"}}, kind);
    for (const auto& [name, e] : r.candidates[0].per_variable) {
      c.expect(e.rmse == 0.0, std::string(to_string(kind)) + ": " + name + " error " + str(e.rmse));
    }
  }
}

void simulation(Check& c) {
  SFD tank;
  tank.stocks = {{"S", 0}};
  tank.flows = {{"f", std::string("S"), std::nullopt}};
  SimulationConfig cfg;
  cfg.horizon = 4;
  const auto cum = simulate(tank, {{"f", Equation{ConstantValue{3.0}, false}}}, fx::make_sdlog({{"f", {3, 3, 3, 3}}}),
                            cfg);
  const auto s = cum.column("S");
  c.expect(std::vector<double>(s.begin(), s.end()) == std::vector<double>{0, 3, 6, 9, 12}, "constant inflow levels");

  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto loop = fx::closed_loop(60, seed);
    const auto eqs = fit_equations(loop.sfd, loop.sd);
    SimulationConfig lc;
    lc.horizon = loop.sd.steps();
    const auto a = simulate(loop.sfd, eqs, loop.sd, lc);
    const auto b = simulate(loop.sfd, fit_equations(loop.sfd, loop.sd), loop.sd, lc);
    for (const auto& name : loop.sd.variables) {
      const auto sim = a.column(name).subspan(1);
      const auto real = loop.sd.column(name);
      double sq = 0;
      for (std::size_t t = 0; t < real.size(); ++t) sq += (sim[t] - real[t]) * (sim[t] - real[t]);
      const double rmse = std::sqrt(sq / static_cast<double>(real.size()));
      c.expect(rmse <= 1e-6, "seed " + std::to_string(seed) + ": " + name + " rmse " + str(rmse));
    }
    c.expect(export_trace_csv(a) == export_trace_csv(b), "seed " + std::to_string(seed) + ": trace bytes differ");
    c.expect(to_json(eqs).dump() == to_json(fit_equations(loop.sfd, loop.sd)).dump(),
             "seed " + std::to_string(seed) + ": equation bytes differ");
  }
}

void validation_metrics(Check& c) {
  const std::vector<double> one_two{1, 2}, one_three{1, 3}, four_five{4, 5};
  c.expect(ks_statistic(one_two, one_three) == 0.5, "ks([1,2],[1,3]) = " + str(ks_statistic(one_two, one_three)));
  c.expect(ks_statistic(one_two, one_two) == 0.0, "ks identical");
  c.expect(ks_statistic(one_two, four_five) == 1.0, "ks disjoint");

  // real 100..109 against scaled and shifted copies; mape and ks worked out by hand
  std::vector<double> real;
  for (int i = 0; i < 10; ++i) real.push_back(100 + i);
  auto verdict = [&](const std::vector<double>& sim) {
    SimulationTrace trace;
    trace.elements = {"v"};
    trace.values = {{0.0}};
    trace.values[0].insert(trace.values[0].end(), sim.begin(), sim.end());
    return validate(trace, fx::make_sdlog({{"v", real}}), {"v"}).variables.front();
  };
  auto mapped = [&](auto fn) {
    std::vector<double> out;
    for (double v : real) out.push_back(fn(v));
    return out;
  };
  // +1: mape <= 0.01, ks = 0.1 -> pass
  const auto close = verdict(mapped([](double v) { return v + 1; }));
  c.expect(close.pass && std::abs(close.ks_statistic - 0.1) < 1e-12, "small offset should pass");
  // x1.25: mape = 0.25 > 0.2 -> fail
  const auto biased = verdict(mapped([](double v) { return 1.25 * v; }));
  c.expect(!biased.pass && std::abs(biased.mape - 0.25) < 1e-12, "mape 0.25 should fail");
  // +5: mape < 0.05 but ks = 0.5 > 0.3 -> fail
  const auto shifted = verdict(mapped([](double v) { return v + 5; }));
  c.expect(!shifted.pass && shifted.mape < 0.05 && std::abs(shifted.ks_statistic - 0.5) < 1e-12,
           "ks 0.5 should fail");
  // reversed order: same distribution (ks 0) but mape = mean |9-2i|/(100+i) < 0.2 -> pass
  std::vector<double> rev(real.rbegin(), real.rend());
  const auto reversed = verdict(rev);
  c.expect(reversed.pass && reversed.ks_statistic == 0.0, "reversed series should pass");
}

void mdl_round_trip(Check& c) {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 200; ++i) {
    const std::string tag = "model " + std::to_string(i) + ": ";
    if (i % 2 == 0) {
      const auto cld = fx::random_cld(rng);
      c.expect(cld.nodes.size() <= 10, tag + "too many elements");
      const auto text = export_mdl(cld);
      c.expect(std::get<CLD>(parse_mdl(text)) == cld, tag + "CLD round trip");
      c.expect(export_mdl(cld) == text, tag + "CLD export not deterministic");
    } else {
      const auto sfd = fx::random_sfd(rng);
      c.expect(sfd.element_names().size() <= 10, tag + "too many elements");
      const auto text = export_mdl(sfd);
      c.expect(std::get<SFD>(parse_mdl(text)) == sfd, tag + "SFD round trip");
      c.expect(export_mdl(sfd) == text, tag + "SFD export not deterministic");
    }
  }
}

void batch_pipeline(Check& c) {
  const auto sys = fx::linear_system_log();
  PipelineRequest req;
  req.log_csv = sys.csv;
  req.window = parse_window("1h");
  req.window.origin = sys.origin;
  req.selections = Json::parse(fx::linear_system_selections());
  auto p = Project::open(scratch("pipeline"));
  const auto report = full_pipeline(p, req);

  const auto sfd = load_sfd(p);
  const auto eqs = load_equations(p);
  const auto endo = endogenous_variables(sfd, eqs, load_sdlog(p, ArtifactKind::sdlog_all));
  c.expect(!endo.empty(), "no endogenous variables");
  for (const auto& name : endo) {
    const auto it = std::find_if(report.variables.begin(), report.variables.end(),
                                 [&](const VariableValidation& v) { return v.name == name; });
    if (it == report.variables.end()) {
      c.expect(false, name + ": not validated");
      continue;
    }
    c.expect(it->pass, name + ": mape " + str(it->mape) + ", ks " + str(it->ks_statistic));
  }
  fs::remove_all(p.root());
}

}  // namespace

int main() {
  criterion("L1 end-to-end: summary, DFG, 1h SD-log, runtime < 1 s", l1_end_to_end);
  criterion("conservation on 100 random logs", conservation);
  criterion("relation detection: planted fixtures and affine invariance", relation_detection);
  criterion("stability test: 1 day beats 7 hours, constant series exact, runtime < 30 s", stability);
  criterion("simulation: cumulative sum, closed-loop fidelity, determinism", simulation);
  criterion("validation metrics: KS values and verdict thresholds", validation_metrics);
  criterion(".mdl round trip on 200 random models, deterministic output", mdl_round_trip);
  criterion("batch pipeline on the synthetic linear system passes", batch_pipeline);
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
