#pragma once

#include "pmsd/sdlog.hpp"
#include "pmsd/simulation.hpp"

#include <span>
#include <string>
#include <vector>

namespace pmsd {

/// Two-sample Kolmogorov-Smirnov statistic sup|F_a - F_b| (no p-value).
double ks_statistic(std::span<const double> a, std::span<const double> b);

struct ValidationThresholds {
  double mape_max = 0.2;  // tau
  double ks_max = 0.3;    // kappa
};

struct VariableValidation {
  std::string name;
  double rmse = 0.0;
  /// Fraction, not percent. Steps with a real value of 0 are skipped; when
  /// every step is skipped it is 0 if the series agree and +inf otherwise.
  double mape = 0.0;
  std::size_t mape_skipped = 0;
  double mean_real = 0.0;
  double mean_sim = 0.0;
  double std_real = 0.0;
  double std_sim = 0.0;
  double ks_statistic = 0.0;
  bool pass = false;
};

struct ValidationReport {
  ValidationThresholds thresholds;
  std::size_t aligned_steps = 0;
  std::vector<VariableValidation> variables;

  bool all_pass() const;
};

/// Compares trace rows 1..n with SD-log rows 0..n-1, n = min(horizon, k).
/// Throws UnknownVariable or NotEnoughSteps (n < 2).
ValidationReport validate(const SimulationTrace& trace, const SDLog& sdlog, const std::vector<std::string>& variables,
                          const ValidationThresholds& thresholds = {});

/// Stocks and fitted elements that also appear in the SD-log.
std::vector<std::string> endogenous_variables(const SFD& sfd, const EquationSet& equations, const SDLog& sdlog);

}  // namespace pmsd
