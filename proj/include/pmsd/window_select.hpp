#pragma once

#include "pmsd/event_log.hpp"
#include "pmsd/sdlog.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pmsd {

enum class ModelKind { naive_last, mean, linear_trend, ar_p };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// One-step-ahead predictor fitted on a training prefix.
class Forecaster {
 public:
  ModelKind kind() const { return kind_; }
  /// Set when an autoregressive fit was singular and the mean model is used instead.
  bool fell_back() const { return fell_back_; }
  int order() const { return static_cast<int>(ar_.size()); }
  double intercept() const { return intercept_; }
  double slope() const { return slope_; }
  const std::vector<double>& ar_coefficients() const { return ar_; }

  /// Forecast for the step right after `history`. `history` is a prefix of
  /// the series the model was fitted on (or of its continuation).
  double forecast(std::span<const double> history) const;

 private:
  friend Forecaster fit_forecaster(std::span<const double>, ModelKind, std::optional<int>);

  ModelKind kind_ = ModelKind::mean;
  bool fell_back_ = false;
  double intercept_ = 0.0;  // mean level, line intercept, or AR constant
  double slope_ = 0.0;
  std::vector<double> ar_;  // ar_[i] multiplies x[t-1-i]
};

/// `ar_order` overrides the default order min(5, n/4) for ar_p.
Forecaster fit_forecaster(std::span<const double> series, ModelKind kind, std::optional<int> ar_order = std::nullopt);

struct ForecastErrors {
  double rmse = 0.0;
  double mape = 0.0;
  std::size_t mape_skipped = 0;  // test steps whose true value was 0
  std::size_t tested = 0;
  bool fell_back = false;
};

/// Fits on series[0, train) and forecasts each later step from the true history.
ForecastErrors rolling_forecast_errors(std::span<const double> series, std::size_t train, ModelKind kind);

/// Centered moving average of width 3; the ends average their two available points.
std::vector<double> smooth3(std::span<const double> series);

struct WindowCandidate {
  TimeWindowSpec spec;
  std::string label;
};

struct CandidateResult {
  std::string label;
  TimeWindowSpec spec;
  std::size_t k = 0;            // active steps used for scoring
  std::size_t total_steps = 0;  // all steps of the window
  double active_fraction = 0.0;
  std::vector<std::pair<std::string, ForecastErrors>> per_variable;
  /// Mean over variables of rmse / stddev. Constant variables predicted
  /// exactly contribute 0; missed ones make the score infinite.
  double aggregate_score = 0.0;
  bool viable = false;  // false means insufficient_data
};

struct StabilityOptions {
  double split_ratio = 0.8;
  bool smooth = false;
  std::size_t min_steps = 10;
  /// General only by default; other aspects add their variables to the score.
  std::vector<AspectSpec> aspects = {AspectSpec{}};
};

struct StabilityReport {
  ModelKind model = ModelKind::ar_p;
  double split_ratio = 0.8;
  std::vector<CandidateResult> candidates;
};

StabilityReport assess_windows(const EventLog& log, const std::vector<WindowCandidate>& candidates, ModelKind kind,
                               const StabilityOptions& options = {});

/// Viable candidates by ascending score; equal scores prefer more steps.
std::vector<std::string> rank_windows(const StabilityReport& report);

}  // namespace pmsd
