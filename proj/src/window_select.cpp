#include "pmsd/window_select.hpp"

#include "pmsd/error.hpp"
#include "pmsd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace pmsd {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::naive_last: return "naive_last";
    case ModelKind::mean: return "mean";
    case ModelKind::linear_trend: return "linear_trend";
    case ModelKind::ar_p: return "ar_p";
  }
  return "mean";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "naive" || text == "naive_last") return ModelKind::naive_last;
  if (text == "mean") return ModelKind::mean;
  if (text == "linear" || text == "linear_trend" || text == "trend") return ModelKind::linear_trend;
  if (text == "ar" || text == "ar_p") return ModelKind::ar_p;
  throw Error(ErrorCode::InvalidArgument, "unknown model kind '" + std::string(text) + "'");
}

double Forecaster::forecast(std::span<const double> history) const {
  if (history.empty()) throw Error(ErrorCode::InvalidArgument, "forecast needs a non-empty history");
  switch (kind_) {
    case ModelKind::naive_last:
      return history.back();
    case ModelKind::mean:
      return intercept_;
    case ModelKind::linear_trend:
      return intercept_ + slope_ * static_cast<double>(history.size());
    case ModelKind::ar_p: {
      if (history.size() < ar_.size()) throw Error(ErrorCode::InvalidArgument, "history shorter than AR order");
      double y = intercept_;
      for (std::size_t i = 0; i < ar_.size(); ++i) y += ar_[i] * history[history.size() - 1 - i];
      return y;
    }
  }
  return intercept_;
}

Forecaster fit_forecaster(std::span<const double> series, ModelKind kind, std::optional<int> ar_order) {
  const std::size_t n = series.size();
  if (n < 4) throw Error(ErrorCode::SeriesTooShort, "series needs at least 4 points, got " + std::to_string(n));

  Forecaster f;
  f.kind_ = kind;
  switch (kind) {
    case ModelKind::naive_last:
      break;
    case ModelKind::mean:
      f.intercept_ = stats::mean(series);
      break;
    case ModelKind::linear_trend: {
      std::vector<double> t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i);
      const auto line = stats::fit_line(t, series);
      f.intercept_ = line.intercept;
      f.slope_ = line.slope;
      break;
    }
    case ModelKind::ar_p: {
      const int p = ar_order.value_or(std::min<int>(5, static_cast<int>(n / 4)));
      if (p < 1) throw Error(ErrorCode::InvalidArgument, "AR order must be >= 1");
      const std::size_t up = static_cast<std::size_t>(p);
      if (n < 2 * up + 2) {
        throw Error(ErrorCode::SeriesTooShort,
                    "AR(" + std::to_string(p) + ") needs " + std::to_string(2 * up + 2) + " points, got " +
                        std::to_string(n));
      }
      const std::size_t rows = n - up;
      Eigen::MatrixXd design(rows, up + 1);
      Eigen::VectorXd target(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + up;
        design(r, 0) = 1.0;
        for (std::size_t i = 0; i < up; ++i) design(r, i + 1) = series[t - 1 - i];
        target(r) = series[t];
      }
      const auto ls = stats::least_squares(design, target);
      if (ls.rank_deficient) {
        f.kind_ = ModelKind::mean;
        f.fell_back_ = true;
        f.intercept_ = stats::mean(series);
        break;
      }
      f.intercept_ = ls.coefficients(0);
      f.ar_.resize(up);
      for (std::size_t i = 0; i < up; ++i) f.ar_[i] = ls.coefficients(i + 1);
      break;
    }
  }
  return f;
}

ForecastErrors rolling_forecast_errors(std::span<const double> series, std::size_t train, ModelKind kind) {
  if (train >= series.size()) throw Error(ErrorCode::InvalidArgument, "no test steps after the training prefix");
  const auto model = fit_forecaster(series.first(train), kind);
  ForecastErrors out;
  out.fell_back = model.fell_back();
  double sq = 0.0, pct = 0.0;
  std::size_t pct_n = 0;
  for (std::size_t t = train; t < series.size(); ++t) {
    const double err = series[t] - model.forecast(series.first(t));
    sq += err * err;
    if (series[t] == 0.0) {
      ++out.mape_skipped;
    } else {
      pct += std::abs(err / series[t]);
      ++pct_n;
    }
    ++out.tested;
  }
  out.rmse = std::sqrt(sq / static_cast<double>(out.tested));
  out.mape = pct_n ? pct / static_cast<double>(pct_n) : 0.0;
  return out;
}

std::vector<double> smooth3(std::span<const double> s) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(s.size() - 1, i + 1);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += s[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

namespace {

CandidateResult assess_one(const EventLog& log, const WindowCandidate& cand, ModelKind kind,
                           const StabilityOptions& opt) {
  CandidateResult res;
  res.label = cand.label;
  res.spec = cand.spec;

  SDLog merged;
  for (const auto& aspect : opt.aspects) {
    SDLog part = generate_sdlog(log, cand.spec, aspect);
    if (merged.variables.empty()) {
      merged = std::move(part);
    } else {
      for (std::size_t j = 0; j < part.variables.size(); ++j) {
        if (merged.has(part.variables[j])) continue;
        merged.variables.push_back(part.variables[j]);
        merged.columns.push_back(std::move(part.columns[j]));
      }
    }
  }
  res.total_steps = merged.steps();

  std::optional<SDLog> active;
  try {
    active = filter_active(merged);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AllStepsInactive) throw;
  }
  res.k = active ? active->steps() : 0;
  res.active_fraction = static_cast<double>(res.k) / static_cast<double>(res.total_steps);
  if (res.k < opt.min_steps) {
    res.viable = false;
    res.aggregate_score = std::numeric_limits<double>::infinity();
    return res;
  }

  const auto train = static_cast<std::size_t>(std::ceil(opt.split_ratio * static_cast<double>(res.k)));
  if (train < 4 || train >= res.k) {
    throw Error(ErrorCode::InvalidArgument, "split ratio leaves no usable train/test split for '" + cand.label + "'");
  }

  res.viable = true;
  double score = 0.0;
  for (std::size_t j = 0; j < active->variables.size(); ++j) {
    std::vector<double> series = active->columns[j];
    if (opt.smooth) series = smooth3(series);
    const auto errors = rolling_forecast_errors(series, train, kind);
    const double sd = stats::stddev(series);
    if (sd > 0.0) {
      score += errors.rmse / sd;
    } else if (errors.rmse > 0.0) {
      score = std::numeric_limits<double>::infinity();
    }
    res.per_variable.emplace_back(active->variables[j], errors);
  }
  res.aggregate_score = res.per_variable.empty() ? 0.0 : score / static_cast<double>(res.per_variable.size());
  return res;
}

}  // namespace

StabilityReport assess_windows(const EventLog& log, const std::vector<WindowCandidate>& candidates, ModelKind kind,
                               const StabilityOptions& options) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no window candidates given");
  if (!(options.split_ratio > 0.0 && options.split_ratio < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split ratio must lie in (0, 1)");
  }
  std::set<std::string> labels;
  for (const auto& c : candidates) {
    if (!labels.insert(c.label).second) throw Error(ErrorCode::InvalidArgument, "duplicate candidate label '" + c.label + "'");
  }

  StabilityReport report;
  report.model = kind;
  report.split_ratio = options.split_ratio;
  for (const auto& c : candidates) report.candidates.push_back(assess_one(log, c, kind, options));

  const bool any = std::any_of(report.candidates.begin(), report.candidates.end(),
                               [](const CandidateResult& c) { return c.viable; });
  if (!any) throw Error(ErrorCode::NoViableCandidate, "every candidate window has fewer than " +
                                                          std::to_string(options.min_steps) + " active steps");
  return report;
}

std::vector<std::string> rank_windows(const StabilityReport& report) {
  std::vector<const CandidateResult*> viable;
  for (const auto& c : report.candidates) {
    if (c.viable) viable.push_back(&c);
  }
  if (viable.empty()) throw Error(ErrorCode::NoViableCandidate, "no viable candidate to rank");
  std::stable_sort(viable.begin(), viable.end(), [](const CandidateResult* a, const CandidateResult* b) {
    if (a->aggregate_score != b->aggregate_score) return a->aggregate_score < b->aggregate_score;
    return a->k > b->k;
  });
  std::vector<std::string> out;
  for (const auto* c : viable) out.push_back(c->label);
  return out;
}

}  // namespace pmsd
