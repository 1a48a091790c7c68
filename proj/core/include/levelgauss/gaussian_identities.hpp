#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "levelgauss/domain.hpp"
#include "levelgauss/spectral_measure.hpp"

namespace levelgauss {

/// Correlation of a standard Gaussian pair (X, Y); Z = XY.
struct ProductGaussianParams {
  double rho = 0.0;
};

/// P(XY > 0) = (pi - arccos rho) / pi. Accepts rho in [-1, 1]; the values
/// for rho and -rho add up to exactly one.
double product_positive_prob(double rho);
double product_positive_prob(const ProductGaussianParams& p);

/// Density of Z = XY,
///   psi(z) = exp(rho z / (1 - rho^2)) K0(|z| / (1 - rho^2)) / (pi sqrt(1 - rho^2)).
/// Empty at z = 0 (logarithmic singularity). Throws InvalidInput unless
/// |rho| < 1.
std::optional<double> product_density(double rho, double z);

/// int_lo^hi psi(z) dz by double-exponential quadrature, lo < hi. Intervals
/// straddling zero are split there.
double product_density_integral(double rho, double lo, double hi);

/// int_0^inf psi(z) dz.
double product_positive_integral(double rho);

struct GradientNormEstimate {
  double value = 0.0;
  double se = 0.0;          // zero for the closed form
  bool closed_form = false;
  std::size_t draws = 0;
};

/// E|G| for G ~ N(0, Lambda). Closed form sqrt(c pi / 2) when d = 2 and
/// Lambda = c I (relative tolerance 1e-12), otherwise Monte Carlo with n_mc
/// draws from a counter RNG keyed by `key`. Throws InvalidInput if Lambda is
/// not positive definite.
GradientNormEstimate expected_gradient_norm(const Eigen::MatrixXd& lambda, std::size_t n_mc = 1000000,
                                            std::uint64_t key = 0x6a7c3e11);
GradientNormEstimate expected_gradient_norm(const SpectralMeasure& m, std::size_t n_mc = 1000000,
                                            std::uint64_t key = 0x6a7c3e11);

/// Standard normal density.
double normal_pdf(double a);

struct KacRiceOracle {
  SpectralMeasure measure;
  double exp_grad_norm = 0.0;

  explicit KacRiceOracle(const SpectralMeasure& m);
  double density_at(double a) const { return normal_pdf(a); }
  /// Expected level-set length in D at level a.
  double expected_measure(const Domain& dom, double a) const;
};

/// (2R)^2 p(a) E|grad f|. Throws InvalidInput for d != 2 or a degenerate
/// measure.
double kac_rice_expected_measure(const SpectralMeasure& m, const Domain& dom, double a);

/// Contiguous range of realisation seeds.
struct SeedRange {
  std::uint64_t first = 0;
  std::size_t count = 1;
};

struct ConditionalCurvatureEstimate {
  double level = 0.0;
  double bandwidth = 0.0;
  double estimate = 0.0;  // NaN when the band is empty
  double se = 0.0;        // cluster bootstrap over seeds
  std::size_t n_accepted = 0;
  std::size_t n_total = 0;
  bool empty_band = false;
};

struct ConditionalCurvatureOptions {
  int points_per_axis = 512;         // lattice size per realisation
  std::size_t bootstrap_resamples = 400;
  std::uint64_t bootstrap_key = 0xb0075712;
  unsigned threads = 1;
};

/// mean[kappa 1{|f - a| <= h}] / mean[1{|f - a| <= h}] over the seeds in
/// `seeds`. Each realisation is sampled on a randomly shifted
/// points_per_axis^2 lattice in D, so every sample point is uniform in D.
/// Points with |grad f| < kGradientFloor are dropped.
std::vector<ConditionalCurvatureEstimate> conditional_curvature_estimates(
    const SpectralMeasure& m, const Domain& dom, std::span<const double> levels, double bandwidth,
    SeedRange seeds, const ConditionalCurvatureOptions& options = {});

ConditionalCurvatureEstimate conditional_curvature_estimate(
    const SpectralMeasure& m, const Domain& dom, double a, double bandwidth, SeedRange seeds,
    const ConditionalCurvatureOptions& options = {});

struct CurvatureMoment {
  double mean = 0.0;  // mean |kappa|^p
  double se = 0.0;
  std::size_t n = 0;
};

/// Empirical mean of |kappa(x)|^p over n_points samples. Sample i is a
/// uniform point of D on the realisation with seed
/// seeds.first + i / points_per_seed, so a smaller n is a prefix of a larger
/// one. Non-critical points only.
CurvatureMoment curvature_power_mean(const SpectralMeasure& m, const Domain& dom, double p,
                                     std::size_t n_points, std::uint64_t first_seed,
                                     std::size_t points_per_seed, unsigned threads = 1);

}  // namespace levelgauss
