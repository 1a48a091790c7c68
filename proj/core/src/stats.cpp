#include "levelgauss/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "levelgauss/error.hpp"
#include "levelgauss/rng.hpp"

namespace levelgauss {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 32;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  out.n = values.size();
  if (out.n == 0) return out;
  out.mean = pairwise_sum(values) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(),
                 [m = out.mean](double v) { return (v - m) * (v - m); });
  out.sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(out.n - 1));
  out.se = out.sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - t) + values[hi] * t;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidInput("spearman: need two equally sized samples with n >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidInput("linear_fit: need two equally sized samples with n >= 2");
  LinearFit fit;
  fit.n = x.size();
  const double n = static_cast<double>(fit.n);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidInput("linear_fit: x values are all equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (fit.n < 3) {
    fit.slope_se = std::numeric_limits<double>::infinity();
    fit.slope_ci_low = -fit.slope_se;
    fit.slope_ci_high = fit.slope_se;
    return fit;
  }
  double ssr = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  const double dof = n - 2.0;
  fit.slope_se = std::sqrt(ssr / dof / sxx);
  const boost::math::students_t dist(dof);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.slope_ci_low = fit.slope - t * fit.slope_se;
  fit.slope_ci_high = fit.slope + t * fit.slope_se;
  return fit;
}

double bootstrap_ratio_se(std::span<const double> num, std::span<const double> den,
                          std::size_t resamples, std::uint64_t key) {
  if (num.size() != den.size() || num.empty())
    throw InvalidInput("bootstrap_ratio_se: mismatched or empty clusters");
  const CounterRng rng(key);
  const std::size_t n = num.size();
  std::vector<double> ratios;
  ratios.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    double sn = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto pick = static_cast<std::size_t>(rng.uniform(r, i) * static_cast<double>(n));
      const std::size_t k = std::min(pick, n - 1);
      sn += num[k];
      sd += den[k];
    }
    if (sd > 0.0) ratios.push_back(sn / sd);
  }
  return mean_se(ratios).sd;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n, double lo,
                                                                   double hi) {
  if (n == 0) throw InvalidInput("gauss_legendre: n must be positive");
  std::vector<double> x(n), w(n);
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        const double kk = static_cast<double>(k);
        p0 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p2) / kk;
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = mid - half * z;
    x[n - 1 - i] = mid + half * z;
    w[i] = w[n - 1 - i] = 2.0 * half / ((1.0 - z * z) * dp * dp);
  }
  return {std::move(x), std::move(w)};
}

}  // namespace levelgauss
