#pragma once

#include "pmsd/sdlog.hpp"
#include "pmsd/stats.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pmsd {

enum class RelationKind { linear, monotonic, nonlinear };
enum class Polarity { positive, negative };

std::string_view to_string(RelationKind kind);
RelationKind parse_relation_kind(std::string_view text);
/// "+" or "-"
std::string_view to_string(Polarity polarity);
Polarity parse_polarity(std::string_view text);
inline Polarity polarity_of(double coefficient) { return coefficient < 0.0 ? Polarity::negative : Polarity::positive; }

/// source[t] is related to target[t + lag].
struct RelationCandidate {
  std::string source;
  std::string target;
  int lag = 0;
  RelationKind kind = RelationKind::linear;
  /// Pearson r (linear), Spearman rho (monotonic), or signed sqrt(R^2) of
  /// the quadratic fit (nonlinear).
  double coefficient = 0.0;
  Polarity polarity = Polarity::positive;
  double strength = 0.0;
  std::size_t support = 0;
  /// Self relation at a positive lag.
  bool auto_relation = false;

  bool operator==(const RelationCandidate&) const = default;
};

struct RelationOptions {
  int max_lag = 5;
  double threshold = 0.7;
  std::size_t min_support = 10;
};

struct RelationReport {
  std::vector<std::string> skipped_constant;
  std::vector<RelationCandidate> candidates;
};

/// Aligns x[0, k-lag) with y[lag, k).
std::pair<std::span<const double>, std::span<const double>> align_lagged(std::span<const double> x,
                                                                         std::span<const double> y, int lag);

/// Signed coefficient of a relation kind on an aligned sample; nullopt when
/// the statistic is undefined (constant side).
std::optional<double> relation_coefficient(RelationKind kind, std::span<const double> x, std::span<const double> y);

/// Per (pair, kind) the strongest lag is kept (the smaller lag on ties).
/// When several kinds peak at the same lag of a pair, linear wins over
/// monotonic, monotonic over nonlinear.
RelationReport detect_relations(const SDLog& sdlog, const RelationOptions& options = {});

struct PairDetail {
  std::string source;
  std::string target;
  int lag = 0;
  std::optional<double> pearson;   // nullopt: undefined (zero variance)
  std::optional<double> spearman;
  stats::LinearFit linear;
  stats::QuadraticFit quadratic;
  std::vector<std::pair<double, double>> points;
};

PairDetail detail_pair(const SDLog& sdlog, std::string_view source, std::string_view target, int lag);

}  // namespace pmsd
