#pragma once

namespace levelgauss {

/// Modified Bessel function of the second kind, order zero, for x > 0.
/// Ascending series for x <= 2, trapezoidal rule on
/// K0(x) = int_0^inf exp(-x cosh t) dt for 2 < x < 25, and the asymptotic
/// expansion beyond. Absolute accuracy better than 1e-10 everywhere.
/// Returns +inf at x = 0; throws InvalidInput for x < 0 or NaN.
double bessel_k0(double x);

/// exp(x) * K0(x), finite for large x where K0 underflows.
double bessel_k0_scaled(double x);

}  // namespace levelgauss
