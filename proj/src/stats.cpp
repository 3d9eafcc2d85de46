#include "pmsd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pmsd::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2 || is_constant(xs)) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

bool is_constant(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs.front(); });
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  x = x.first(n);
  y = y.first(n);
  if (n < 2 || is_constant(x) || is_constant(y)) return std::nullopt;
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  auto rx = average_ranks(x.first(n));
  auto ry = average_ranks(y.first(n));
  return pearson(rx, ry);
}

LeastSquares least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  LeastSquares out;
  out.coefficients = qr.solve(target);
  out.rank_deficient = qr.rank() < design.cols();
  return out;
}

double r_squared(std::span<const double> y, std::span<const double> fitted) {
  if (y.size() < 2 || is_constant(y)) return 0.0;
  const double my = mean(y);
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - my) * (y[i] - my);
    ss_res += (y[i] - fitted[i]) * (y[i] - fitted[i]);
  }
  if (ss_tot == 0.0) return 0.0;
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  x = x.first(n);
  y = y.first(n);
  LinearFit fit;
  fit.intercept = mean(y);
  if (n < 2 || is_constant(x)) return fit;
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) fitted[i] = fit.intercept + fit.slope * x[i];
  fit.r2 = r_squared(y, fitted);
  return fit;
}

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  x = x.first(n);
  y = y.first(n);
  QuadraticFit fit;
  fit.c = mean(y);
  if (n < 2 || is_constant(x)) return fit;

  const double mu = mean(x);
  const double sigma = stddev(x);
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd target(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (x[i] - mu) / sigma;
    design(i, 0) = 1.0;
    design(i, 1) = z;
    design(i, 2) = z * z;
    target(i) = y[i];
  }
  const Eigen::VectorXd coef = least_squares(design, target).coefficients;
  const Eigen::VectorXd fitted_v = design * coef;
  std::vector<double> fitted(fitted_v.data(), fitted_v.data() + n);
  fit.r2 = r_squared(y, fitted);

  // back to the original x scale
  const double c0 = coef(0), c1 = coef(1), c2 = coef(2);
  fit.a = c2 / (sigma * sigma);
  fit.b = c1 / sigma - 2.0 * c2 * mu / (sigma * sigma);
  fit.c = c0 - c1 * mu / sigma + c2 * mu * mu / (sigma * sigma);

  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  auto eval_z = [&](double xv) {
    const double z = (xv - mu) / sigma;
    return c0 + c1 * z + c2 * z * z;
  };
  const double f_hi = eval_z(*hi), f_lo = eval_z(*lo);
  const double diff = f_hi - f_lo;
  const double scale = std::max({std::abs(f_hi), std::abs(f_lo), stddev(y)});
  if (std::abs(diff) <= 1e-9 * scale) {
    fit.trend_sign = 0;
  } else {
    fit.trend_sign = diff > 0 ? 1 : -1;
  }
  return fit;
}

}  // namespace pmsd::stats
