#include "pmsd/relations.hpp"

#include "pmsd/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

namespace pmsd {

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::linear: return "linear";
    case RelationKind::monotonic: return "monotonic";
    case RelationKind::nonlinear: return "nonlinear";
  }
  return "linear";
}

RelationKind parse_relation_kind(std::string_view text) {
  if (text == "linear") return RelationKind::linear;
  if (text == "monotonic") return RelationKind::monotonic;
  if (text == "nonlinear") return RelationKind::nonlinear;
  throw Error(ErrorCode::InvalidArgument, "unknown relation kind '" + std::string(text) + "'");
}

std::string_view to_string(Polarity polarity) { return polarity == Polarity::negative ? "-" : "+"; }

Polarity parse_polarity(std::string_view text) {
  if (text == "+" || text == "positive") return Polarity::positive;
  if (text == "-" || text == "negative") return Polarity::negative;
  throw Error(ErrorCode::InvalidArgument, "unknown polarity '" + std::string(text) + "'");
}

std::pair<std::span<const double>, std::span<const double>> align_lagged(std::span<const double> x,
                                                                         std::span<const double> y, int lag) {
  const std::size_t k = std::min(x.size(), y.size());
  const auto l = static_cast<std::size_t>(lag);
  if (lag < 0 || l >= k) return {};
  return {x.subspan(0, k - l), y.subspan(l, k - l)};
}

std::optional<double> relation_coefficient(RelationKind kind, std::span<const double> x, std::span<const double> y) {
  switch (kind) {
    case RelationKind::linear:
      return stats::pearson(x, y);
    case RelationKind::monotonic:
      return stats::spearman(x, y);
    case RelationKind::nonlinear: {
      if (x.size() < 3 || stats::is_constant(x) || stats::is_constant(y)) return std::nullopt;
      const auto q = stats::fit_quadratic(x, y);
      const double r = std::sqrt(q.r2);
      return q.trend_sign < 0 ? -r : r;
    }
  }
  return std::nullopt;
}

RelationReport detect_relations(const SDLog& sd, const RelationOptions& opt) {
  if (opt.max_lag < 0) throw Error(ErrorCode::InvalidArgument, "max_lag must be >= 0");
  if (opt.threshold < 0.0 || opt.threshold > 1.0) throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0, 1]");
  const std::size_t k = sd.steps();
  if (k < opt.min_support + static_cast<std::size_t>(opt.max_lag)) {
    throw Error(ErrorCode::TooFewSteps, "relation detection needs at least " +
                                            std::to_string(opt.min_support + opt.max_lag) + " steps, got " +
                                            std::to_string(k));
  }

  RelationReport report;
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < sd.variables.size(); ++j) {
    if (stats::is_constant(sd.columns[j])) {
      report.skipped_constant.push_back(sd.variables[j]);
    } else {
      live.push_back(j);
    }
  }
  if (live.empty()) throw Error(ErrorCode::AllColumnsConstant, "every sd-log column is constant");

  constexpr std::array kinds = {RelationKind::linear, RelationKind::monotonic, RelationKind::nonlinear};
  constexpr double kTieTolerance = 1e-12;

  for (auto i : live) {
    for (auto j : live) {
      struct Best {
        int lag = -1;
        double coefficient = 0.0;
        std::size_t support = 0;
      };
      std::array<Best, kinds.size()> best{};
      for (int lag = 0; lag <= opt.max_lag; ++lag) {
        if (i == j && lag == 0) continue;
        auto [x, y] = align_lagged(sd.columns[i], sd.columns[j], lag);
        if (x.size() < opt.min_support) continue;
        for (std::size_t kk = 0; kk < kinds.size(); ++kk) {
          const auto c = relation_coefficient(kinds[kk], x, y);
          if (!c) continue;
          if (best[kk].lag < 0 || std::abs(*c) > std::abs(best[kk].coefficient) + kTieTolerance) {
            best[kk] = {lag, *c, x.size()};
          }
        }
      }

      std::vector<int> claimed_lags;
      for (std::size_t kk = 0; kk < kinds.size(); ++kk) {
        const auto& b = best[kk];
        if (b.lag < 0 || std::abs(b.coefficient) < opt.threshold) continue;
        if (std::find(claimed_lags.begin(), claimed_lags.end(), b.lag) != claimed_lags.end()) continue;
        claimed_lags.push_back(b.lag);
        RelationCandidate cand;
        cand.source = sd.variables[i];
        cand.target = sd.variables[j];
        cand.lag = b.lag;
        cand.kind = kinds[kk];
        cand.coefficient = b.coefficient;
        cand.polarity = polarity_of(b.coefficient);
        cand.strength = std::min(1.0, std::abs(b.coefficient));
        cand.support = b.support;
        cand.auto_relation = i == j;
        report.candidates.push_back(std::move(cand));
      }
    }
  }

  std::sort(report.candidates.begin(), report.candidates.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source, a.target, a.lag) < std::tie(b.source, b.target, b.lag);
  });
  return report;
}

PairDetail detail_pair(const SDLog& sd, std::string_view source, std::string_view target, int lag) {
  const auto x_full = sd.column(source);
  const auto y_full = sd.column(target);
  if (lag < 0) throw Error(ErrorCode::InvalidArgument, "lag must be >= 0");
  if (static_cast<std::size_t>(lag) + 3 > sd.steps()) {
    throw Error(ErrorCode::InsufficientSupport, "fewer than 3 aligned observations at lag " + std::to_string(lag));
  }
  auto [x, y] = align_lagged(x_full, y_full, lag);

  PairDetail d;
  d.source = std::string(source);
  d.target = std::string(target);
  d.lag = lag;
  d.pearson = stats::pearson(x, y);
  d.spearman = stats::spearman(x, y);
  d.linear = stats::fit_line(x, y);
  d.quadratic = stats::fit_quadratic(x, y);
  d.points.reserve(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) d.points.emplace_back(x[t], y[t]);
  return d;
}

}  // namespace pmsd
