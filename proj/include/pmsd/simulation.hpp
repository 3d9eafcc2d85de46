#pragma once

#include "pmsd/model.hpp"
#include "pmsd/sdlog.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pmsd {

enum class ExogenousPolicy { replay, hold_mean };

std::string_view to_string(ExogenousPolicy policy);
ExogenousPolicy parse_exogenous_policy(std::string_view text);

struct Term {
  std::string input;
  int lag = 0;
  double coefficient = 0.0;
  bool squared = false;  // x^2 regressor of a nonlinear link
  bool operator==(const Term&) const = default;
};

struct LinearForm {
  double intercept = 0.0;
  std::vector<Term> terms;
  bool operator==(const LinearForm&) const = default;
};

struct Replay {
  std::string variable;
  bool operator==(const Replay&) const = default;
};

struct ConstantValue {
  double value = 0.0;
  bool operator==(const ConstantValue&) const = default;
};

struct Equation {
  std::variant<LinearForm, Replay, ConstantValue> form;
  /// A singular least-squares fit fell back to the sample mean.
  bool fallback = false;
  bool operator==(const Equation&) const = default;
};

/// Non-stock element name -> equation. Stocks are integrated, never fitted.
using EquationSet = std::map<std::string, Equation>;

/// Elements with incoming links get an OLS linear form over the rows valid
/// at every lag; nonlinear links add a squared regressor; links from
/// constants fold into the intercept. Elements without inputs replay their
/// SD-log column (replay) or hold its mean (hold_mean). A stock used as an
/// input contributes its level at the start of a step: the SD-log value of
/// the previous step, or the declared initial value at step 0.
EquationSet fit_equations(const SFD& sfd, const SDLog& sdlog, ExogenousPolicy policy = ExogenousPolicy::replay);

struct SimulationConfig {
  std::size_t horizon = 1;
  /// Overrides of the declared initial stock values.
  std::map<std::string, double> initial_stocks;
  ExogenousPolicy exogenous = ExogenousPolicy::replay;
  double overflow_guard = 1e12;
};

/// Row 0 is the initial state; row t (t >= 1) holds the stock levels after
/// step t-1 and the values the other elements took during step t-1, so row
/// t lines up with SD-log row t-1.
struct SimulationTrace {
  std::vector<std::string> elements;
  std::vector<std::vector<double>> values;  // per element, horizon + 1 entries
  /// Some lagged input reached before step 0 and read the step-0 value.
  bool prehistory_reads = false;

  std::size_t rows() const { return values.empty() ? 0 : values.front().size(); }
  std::size_t horizon() const { return rows() == 0 ? 0 : rows() - 1; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Throws UnknownVariable.
  std::span<const double> column(std::string_view name) const;

  bool operator==(const SimulationTrace&) const = default;
};

/// Explicit Euler with dt = 1 step: S[t+1] = S[t] + sum(inflows[t]) - sum(outflows[t]).
/// Lagged reads before step 0 take the step-0 value: the initial level for
/// stocks, the element's own step-0 value for replayed and constant
/// elements, and the SD-log row-0 observation for fitted elements.
SimulationTrace simulate(const SFD& sfd, const EquationSet& equations, const SDLog& sdlog,
                         const SimulationConfig& config);

std::string export_trace_csv(const SimulationTrace& trace);
SimulationTrace parse_trace_csv(std::string_view text);

}  // namespace pmsd
