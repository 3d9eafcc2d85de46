#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace pmsd::stats {

double mean(std::span<const double> xs);

/// Population standard deviation (divides by n).
double stddev(std::span<const double> xs);

/// True when every element compares equal to the first one.
bool is_constant(std::span<const double> xs);

/// Pearson correlation; nullopt when either side is constant or n < 2.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> xs);

/// Pearson correlation of the average ranks.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct LeastSquares {
  Eigen::VectorXd coefficients;
  bool rank_deficient = false;
};

/// Minimises ||X b - y|| with a column-pivoting QR. A rank-deficient design
/// still yields a least-squares solution, with the flag set.
LeastSquares least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// y = slope*x + intercept. A constant x gives slope 0, intercept mean(y), r2 0.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct QuadraticFit {
  double a = 0.0;  // x^2
  double b = 0.0;  // x
  double c = 0.0;  // 1
  double r2 = 0.0;
  /// sign of fitted(max x) - fitted(min x); 0 when the ends are level.
  int trend_sign = 0;
};

/// y = a x^2 + b x + c, fitted on standardised x for conditioning.
QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y);

/// 1 - SSres/SStot clamped to [0,1]; 0 when y is constant.
double r_squared(std::span<const double> y, std::span<const double> fitted);

}  // namespace pmsd::stats
