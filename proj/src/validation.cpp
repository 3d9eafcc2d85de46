#include "pmsd/validation.hpp"

#include "pmsd/error.hpp"
#include "pmsd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pmsd {

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "KS statistic needs two non-empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

bool ValidationReport::all_pass() const {
  return std::all_of(variables.begin(), variables.end(), [](const VariableValidation& v) { return v.pass; });
}

ValidationReport validate(const SimulationTrace& trace, const SDLog& sd, const std::vector<std::string>& variables,
                          const ValidationThresholds& thresholds) {
  const std::size_t n = std::min(trace.horizon(), sd.steps());
  if (n < 2) throw Error(ErrorCode::NotEnoughSteps, "validation needs at least 2 aligned steps, got " + std::to_string(n));

  ValidationReport report;
  report.thresholds = thresholds;
  report.aligned_steps = n;
  for (const auto& name : variables) {
    const auto sim_full = trace.column(name);
    const auto real = sd.column(name).first(n);
    const auto sim = sim_full.subspan(1, n);

    VariableValidation v;
    v.name = name;
    double sq = 0.0, pct = 0.0;
    std::size_t pct_n = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double err = sim[t] - real[t];
      sq += err * err;
      if (real[t] == 0.0) {
        ++v.mape_skipped;
      } else {
        pct += std::abs(err / real[t]);
        ++pct_n;
      }
    }
    v.rmse = std::sqrt(sq / static_cast<double>(n));
    if (pct_n > 0) {
      v.mape = pct / static_cast<double>(pct_n);
    } else {
      v.mape = v.rmse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    v.mean_real = stats::mean(real);
    v.mean_sim = stats::mean(sim);
    v.std_real = stats::stddev(real);
    v.std_sim = stats::stddev(sim);
    v.ks_statistic = ks_statistic(real, sim);
    v.pass = v.mape <= thresholds.mape_max && v.ks_statistic <= thresholds.ks_max;
    report.variables.push_back(std::move(v));
  }
  return report;
}

std::vector<std::string> endogenous_variables(const SFD& sfd, const EquationSet& equations, const SDLog& sd) {
  std::vector<std::string> out;
  for (const auto& name : sfd.element_names()) {
    if (!sd.has(name)) continue;
    const auto kind = *sfd.kind_of(name);
    if (kind == ElementKind::stock) {
      out.push_back(name);
      continue;
    }
    auto it = equations.find(name);
    if (it != equations.end() && std::holds_alternative<LinearForm>(it->second.form)) out.push_back(name);
  }
  return out;
}

}  // namespace pmsd
