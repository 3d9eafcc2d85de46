#include "pmsd/simulation.hpp"

#include "pmsd/csv.hpp"
#include "pmsd/error.hpp"
#include "pmsd/stats.hpp"
#include "pmsd/timeutil.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace pmsd {

std::string_view to_string(ExogenousPolicy policy) {
  return policy == ExogenousPolicy::replay ? "replay" : "hold_mean";
}

ExogenousPolicy parse_exogenous_policy(std::string_view text) {
  if (text == "replay") return ExogenousPolicy::replay;
  if (text == "hold_mean" || text == "mean") return ExogenousPolicy::hold_mean;
  throw Error(ErrorCode::InvalidArgument, "unknown exogenous policy '" + std::string(text) + "'");
}

std::optional<std::size_t> SimulationTrace::index_of(std::string_view name) const {
  auto it = std::find(elements.begin(), elements.end(), name);
  if (it == elements.end()) return std::nullopt;
  return static_cast<std::size_t>(it - elements.begin());
}

std::span<const double> SimulationTrace::column(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw Error(ErrorCode::UnknownVariable, "trace has no element '" + std::string(name) + "'", std::string(name));
  return values[*idx];
}

namespace {

std::vector<double> input_series(const SFD& sfd, const SDLog& sd, const std::string& name) {
  if (!sd.has(name)) {
    throw Error(ErrorCode::UnmatchedElement, "element '" + name + "' has no SD-log column", name);
  }
  const auto col = sd.column(name);
  std::vector<double> series(col.begin(), col.end());
  if (const Stock* stock = sfd.find_stock(name)) {
    // start-of-step level: previous end-of-step value
    std::vector<double> level(series.size());
    level[0] = stock->initial_value;
    for (std::size_t t = 1; t < series.size(); ++t) level[t] = series[t - 1];
    return level;
  }
  return series;
}

}  // namespace

EquationSet fit_equations(const SFD& sfd, const SDLog& sd, ExogenousPolicy policy) {
  check_sfd(sfd);
  EquationSet eqs;
  const std::size_t k = sd.steps();

  for (const auto& name : sfd.element_names()) {
    const auto kind = *sfd.kind_of(name);
    if (kind == ElementKind::stock) continue;
    if (kind == ElementKind::constant) {
      eqs[name] = Equation{ConstantValue{sfd.find_constant(name)->value}, false};
      continue;
    }
    if (!sd.has(name)) {
      throw Error(ErrorCode::UnmatchedElement, "element '" + name + "' matches no SD-log variable or constant", name);
    }
    const auto own = sd.column(name);

    std::vector<const Link*> inputs;
    for (const auto& l : sfd.links) {
      if (l.target == name && !sfd.find_constant(l.source)) inputs.push_back(&l);
    }
    if (inputs.empty()) {
      if (policy == ExogenousPolicy::replay) {
        eqs[name] = Equation{Replay{name}, false};
      } else {
        eqs[name] = Equation{ConstantValue{stats::mean(own)}, false};
      }
      continue;
    }

    struct Column {
      Term term;
      std::vector<double> series;
    };
    std::vector<Column> columns;
    int max_lag = 0;
    for (const auto* l : inputs) {
      auto series = input_series(sfd, sd, l->source);
      max_lag = std::max(max_lag, l->lag);
      columns.push_back({Term{l->source, l->lag, 0.0, false}, series});
      if (l->kind == RelationKind::nonlinear) columns.push_back({Term{l->source, l->lag, 0.0, true}, series});
    }

    const std::size_t first = static_cast<std::size_t>(max_lag);
    const std::size_t rows = first < k ? k - first : 0;
    const std::size_t params = columns.size() + 1;
    bool singular = rows < params;
    LinearForm form;
    if (!singular) {
      Eigen::MatrixXd design(rows, params);
      Eigen::VectorXd target(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;
        design(r, 0) = 1.0;
        for (std::size_t c = 0; c < columns.size(); ++c) {
          const double x = columns[c].series[t - static_cast<std::size_t>(columns[c].term.lag)];
          design(r, c + 1) = columns[c].term.squared ? x * x : x;
        }
        target(r) = own[t];
      }
      const auto ls = stats::least_squares(design, target);
      singular = ls.rank_deficient;
      form.intercept = ls.coefficients(0);
      for (std::size_t c = 0; c < columns.size(); ++c) {
        Term term = columns[c].term;
        term.coefficient = ls.coefficients(c + 1);
        form.terms.push_back(term);
      }
    }
    if (singular) {
      eqs[name] = Equation{ConstantValue{stats::mean(own)}, true};
    } else {
      eqs[name] = Equation{std::move(form), false};
    }
  }
  return eqs;
}

SimulationTrace simulate(const SFD& sfd, const EquationSet& eqs, const SDLog& sd, const SimulationConfig& config) {
  check_sfd(sfd);
  const std::size_t H = config.horizon;
  if (H < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");

  const auto names = sfd.element_names();
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < names.size(); ++i) slot[names[i]] = i;

  std::vector<std::size_t> dynamic;  // non-stock element slots
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (*sfd.kind_of(names[i]) == ElementKind::stock) continue;
    if (!eqs.count(names[i])) throw Error(ErrorCode::MissingEquation, "no equation for '" + names[i] + "'", names[i]);
    dynamic.push_back(i);
  }

  // Resolve exogenous policy, check inputs.
  std::map<std::size_t, Equation> resolved;
  for (auto i : dynamic) {
    Equation eq = eqs.at(names[i]);
    if (const auto* rep = std::get_if<Replay>(&eq.form)) {
      if (!sd.has(rep->variable)) {
        throw Error(ErrorCode::UnmatchedElement, "replay variable '" + rep->variable + "' not in SD-log", rep->variable);
      }
      if (config.exogenous == ExogenousPolicy::hold_mean) {
        eq.form = ConstantValue{stats::mean(sd.column(rep->variable))};
      } else if (H > sd.steps()) {
        throw Error(ErrorCode::InvalidArgument, "replay needs horizon <= SD-log length (" + std::to_string(sd.steps()) + ")");
      }
    } else if (const auto* lin = std::get_if<LinearForm>(&eq.form)) {
      for (const auto& term : lin->terms) {
        if (!slot.count(term.input)) {
          throw Error(ErrorCode::UnmatchedElement, "equation of '" + names[i] + "' reads undeclared '" + term.input + "'",
                      term.input);
        }
        if (term.lag < 0) throw Error(ErrorCode::InvalidArgument, "negative lag in equation of '" + names[i] + "'");
      }
    }
    resolved.emplace(i, std::move(eq));
  }

  // Lag-0 evaluation order among non-stock elements.
  std::vector<std::size_t> order;
  {
    std::map<std::size_t, int> state;
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
      state[i] = 1;
      if (const auto* lin = std::get_if<LinearForm>(&resolved.at(i).form)) {
        for (const auto& term : lin->terms) {
          const auto j = slot.at(term.input);
          if (term.lag != 0 || !resolved.count(j)) continue;
          if (state[j] == 1) {
            throw Error(ErrorCode::Lag0AlgebraicCycle, "lag-0 cycle through '" + names[j] + "'", names[j]);
          }
          if (state[j] == 0) visit(j);
        }
      }
      state[i] = 2;
      order.push_back(i);
    };
    for (auto i : dynamic) {
      if (state[i] == 0) visit(i);
    }
  }

  SimulationTrace trace;
  trace.elements = names;
  std::vector<std::vector<double>> during(names.size(), std::vector<double>(H, 0.0));  // non-stock, per step
  std::vector<std::vector<double>> level(names.size());                             // stocks, H+1 levels
  for (const auto& s : sfd.stocks) {
    auto it = config.initial_stocks.find(s.name);
    level[slot[s.name]].assign(H + 1, 0.0);
    level[slot[s.name]][0] = it == config.initial_stocks.end() ? s.initial_value : it->second;
  }

  auto guard = [&](double v, std::size_t element, std::size_t step) {
    if (!std::isfinite(v) || std::abs(v) > config.overflow_guard) {
      throw Error(ErrorCode::Diverged,
                  "'" + names[element] + "' left the finite range at step " + std::to_string(step),
                  names[element] + "@" + std::to_string(step));
    }
  };

  // Step-0 value used for reads before the start of the run.
  auto seed = [&](std::size_t j) -> double {
    if (!level[j].empty()) return level[j][0];
    const auto& form = resolved.at(j).form;
    if (const auto* c = std::get_if<ConstantValue>(&form)) return c->value;
    if (const auto* r = std::get_if<Replay>(&form)) return sd.column(r->variable)[0];
    if (!sd.has(names[j])) {
      throw Error(ErrorCode::UnmatchedElement, "no step-0 observation for '" + names[j] + "'", names[j]);
    }
    return sd.column(names[j])[0];
  };

  auto read = [&](std::size_t j, long idx) -> double {
    if (idx < 0) {
      trace.prehistory_reads = true;
      return seed(j);
    }
    const auto t = static_cast<std::size_t>(idx);
    return level[j].empty() ? during[j][t] : level[j][t];
  };

  for (std::size_t s = 0; s < H; ++s) {
    for (auto i : order) {
      const auto& form = resolved.at(i).form;
      double v = 0.0;
      if (const auto* c = std::get_if<ConstantValue>(&form)) {
        v = c->value;
      } else if (const auto* r = std::get_if<Replay>(&form)) {
        v = sd.column(r->variable)[s];
      } else {
        const auto& lin = std::get<LinearForm>(form);
        v = lin.intercept;
        for (const auto& term : lin.terms) {
          const double x = read(slot.at(term.input), static_cast<long>(s) - term.lag);
          v += term.coefficient * (term.squared ? x * x : x);
        }
      }
      guard(v, i, s);
      during[i][s] = v;
    }
    for (const auto& st : sfd.stocks) {
      const auto i = slot[st.name];
      double net = 0.0;
      for (const auto& f : sfd.flows) {
        if (f.inflow_to == st.name) net += during[slot[f.name]][s];
        if (f.outflow_from == st.name) net -= during[slot[f.name]][s];
      }
      level[i][s + 1] = level[i][s] + net;
      guard(level[i][s + 1], i, s + 1);
    }
  }

  trace.values.resize(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!level[i].empty()) {
      trace.values[i] = level[i];
    } else {
      auto& col = trace.values[i];
      col.reserve(H + 1);
      col.push_back(during[i][0]);
      col.insert(col.end(), during[i].begin(), during[i].end());
    }
  }
  return trace;
}

std::string export_trace_csv(const SimulationTrace& trace) {
  csv::Row header = {"step"};
  header.insert(header.end(), trace.elements.begin(), trace.elements.end());
  std::string out = csv::join(header) + "\n";
  for (std::size_t t = 0; t < trace.rows(); ++t) {
    csv::Row row = {std::to_string(t)};
    for (const auto& col : trace.values) row.push_back(format_number(col[t]));
    out += csv::join(row) + "\n";
  }
  return out;
}

SimulationTrace parse_trace_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.size() < 2 || rows[0].empty() || rows[0][0] != "step") {
    throw Error(ErrorCode::InvalidArgument, "trace csv needs a 'step' header and at least one row");
  }
  SimulationTrace trace;
  trace.elements.assign(rows[0].begin() + 1, rows[0].end());
  trace.values.assign(trace.elements.size(), {});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw Error(ErrorCode::InvalidArgument, "trace csv row " + std::to_string(r) + " has wrong field count");
    for (std::size_t j = 1; j < rows[r].size(); ++j) {
      const auto v = parse_number(rows[r][j]);
      if (!v) throw Error(ErrorCode::InvalidArgument, "trace csv row " + std::to_string(r) + ": bad value");
      trace.values[j - 1].push_back(*v);
    }
  }
  return trace;
}

}  // namespace pmsd
