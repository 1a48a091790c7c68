#include "levelgauss/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "levelgauss/error.hpp"

namespace levelgauss {

namespace {

constexpr double kSeriesLimit = 2.0;
constexpr double kAsymptoticLimit = 25.0;

// K0(x) = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} (x^2/4)^k / (k!)^2 * H_k
double k0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;  // (x^2/4)^k / (k!)^2
  double i0 = 1.0;
  double harmonic = 0.0;
  double tail = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    harmonic += 1.0 / static_cast<double>(k);
    i0 += term;
    tail += term * harmonic;
    if (term * harmonic < 1e-17 * tail) break;
  }
  return -(std::log(0.5 * x) + std::numbers::egamma) * i0 + tail;
}

// e^x K0(x) = int_0^inf exp(-x (cosh t - 1)) dt. The integrand extends
// analytically to the strip |Im t| < pi/2, so the trapezoidal rule with step
// h converges like exp(-pi^2 / h).
double k0_scaled_integral(double x) {
  constexpr double h = 0.125;
  double sum = 0.5;
  for (int k = 1; k < 2000; ++k) {
    const double t = h * static_cast<double>(k);
    const double e = x * (std::cosh(t) - 1.0);
    if (e > 45.0) break;
    sum += std::exp(-e);
  }
  return h * sum;
}

// e^x K0(x) ~ sqrt(pi / 2x) sum_k prod_{j<=k} (-(2j-1)^2) / (k! (8x)^k),
// truncated before the smallest term.
double k0_scaled_asymptotic(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * odd * odd / (static_cast<double>(k) * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * sum;
}

void check_argument(double x) {
  if (!(x >= 0.0)) throw InvalidInput("bessel_k0: argument must be non-negative");
}

}  // namespace

double bessel_k0(double x) {
  check_argument(x);
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (x <= kSeriesLimit) return k0_series(x);
  if (x < kAsymptoticLimit) return std::exp(-x) * k0_scaled_integral(x);
  return std::exp(-x) * k0_scaled_asymptotic(x);
}

double bessel_k0_scaled(double x) {
  check_argument(x);
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (x <= kSeriesLimit) return std::exp(x) * k0_series(x);
  if (x < kAsymptoticLimit) return k0_scaled_integral(x);
  return k0_scaled_asymptotic(x);
}

}  // namespace levelgauss
