#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace levelgauss {

/// Pairwise (tree) summation. The result depends only on the order of the
/// input, which keeps parallel reductions reproducible.
double pairwise_sum(std::span<const double> values);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  double sd = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> values);

double median(std::vector<double> values);
/// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double slope_ci_low = 0.0;   // 95% two-sided, Student t with n-2 dof
  double slope_ci_high = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs n >= 3 for a
/// finite confidence interval; with n == 2 the interval is infinite.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Cluster bootstrap standard error of the ratio sum(num) / sum(den), where
/// entries are per-cluster totals. Resampling is driven by a counter RNG.
double bootstrap_ratio_se(std::span<const double> num, std::span<const double> den,
                          std::size_t resamples, std::uint64_t key);

/// Gauss-Legendre nodes and weights on [lo, hi].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n, double lo,
                                                                   double hi);

}  // namespace levelgauss
