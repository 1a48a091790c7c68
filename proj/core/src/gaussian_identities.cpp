#include "levelgauss/gaussian_identities.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "levelgauss/bessel.hpp"
#include "levelgauss/error.hpp"
#include "levelgauss/field.hpp"
#include "levelgauss/levelset.hpp"
#include "levelgauss/parallel.hpp"
#include "levelgauss/rng.hpp"
#include "levelgauss/stats.hpp"

namespace levelgauss {

namespace {

constexpr std::uint64_t kLatticeShiftTag = 0x1a77ce5;
constexpr std::uint64_t kMomentPointTag = 0x30e27a;

void require_open_correlation(double rho) {
  if (!(std::abs(rho) < 1.0)) throw InvalidInput("product density needs |rho| < 1");
}

// psi without the singular-point check; 0 at z = 0 so quadrature never sees
// the marker (nodes do not hit the endpoints anyway).
double psi_or_zero(double rho, double z) {
  auto v = product_density(rho, z);
  return v ? *v : 0.0;
}

}  // namespace

double product_positive_prob(double rho) {
  if (!(std::abs(rho) <= 1.0)) throw InvalidInput("product_positive_prob: |rho| > 1");
  if (rho < 0.0) return 1.0 - product_positive_prob(-rho);
  return (std::numbers::pi - std::acos(rho)) / std::numbers::pi;
}

double product_positive_prob(const ProductGaussianParams& p) { return product_positive_prob(p.rho); }

std::optional<double> product_density(double rho, double z) {
  require_open_correlation(rho);
  if (z == 0.0) return std::nullopt;
  const double s = 1.0 - rho * rho;
  const double az = std::abs(z);
  // exp(rho z / s) K0(|z| / s) = exp((rho z - |z|) / s) * (e^x K0(x))
  return std::exp((rho * z - az) / s) * bessel_k0_scaled(az / s) /
         (std::numbers::pi * std::sqrt(s));
}

double product_density_integral(double rho, double lo, double hi) {
  require_open_correlation(rho);
  if (!(lo < hi)) throw InvalidInput("product_density_integral: need lo < hi");
  auto f = [rho](double z) { return psi_or_zero(rho, z); };
  boost::math::quadrature::tanh_sinh<double> ts;
  if (lo < 0.0 && hi > 0.0) return ts.integrate(f, lo, 0.0) + ts.integrate(f, 0.0, hi);
  return ts.integrate(f, lo, hi);
}

double product_positive_integral(double rho) {
  require_open_correlation(rho);
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate([rho](double z) { return psi_or_zero(rho, z); }, 0.0,
                      std::numeric_limits<double>::infinity());
}

GradientNormEstimate expected_gradient_norm(const Eigen::MatrixXd& lambda, std::size_t n_mc,
                                            std::uint64_t key) {
  const auto d = lambda.rows();
  if (d == 0 || lambda.cols() != d) throw InvalidInput("expected_gradient_norm: Lambda not square");
  const double trace = lambda.trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lambda, Eigen::EigenvaluesOnly);
  if (!(trace > 0.0) || eig.eigenvalues().minCoeff() <= 1e-12 * trace)
    throw InvalidInput("expected_gradient_norm: Lambda is singular");

  GradientNormEstimate out;
  if (d == 2) {
    const double c = 0.5 * trace;
    if (std::abs(lambda(0, 1)) <= 1e-12 * c && std::abs(lambda(1, 0)) <= 1e-12 * c &&
        std::abs(lambda(0, 0) - lambda(1, 1)) <= 1e-12 * c) {
      out.value = std::sqrt(c * std::numbers::pi / 2.0);
      out.closed_form = true;
      return out;
    }
  }
  if (n_mc < 2) throw InvalidInput("expected_gradient_norm: n_mc must be at least 2");
  const Eigen::MatrixXd L = lambda.llt().matrixL();
  const CounterRng rng(key);
  std::vector<double> norms(n_mc);
  Eigen::VectorXd z(d);
  for (std::size_t i = 0; i < n_mc; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal(i, static_cast<std::uint64_t>(j));
    norms[i] = (L * z).norm();
  }
  const MeanSe ms = mean_se(norms);
  out.value = ms.mean;
  out.se = ms.se;
  out.draws = n_mc;
  return out;
}

GradientNormEstimate expected_gradient_norm(const SpectralMeasure& m, std::size_t n_mc,
                                            std::uint64_t key) {
  return expected_gradient_norm(second_moments(m).second_moment, n_mc, key);
}

double normal_pdf(double a) { return std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi); }

namespace {

double gate_and_gradient_norm(const SpectralMeasure& m) {
  if (m.dim() != 2) throw InvalidInput("Kac-Rice oracle is implemented for d = 2");
  const auto report = validate_nondegenerate(m);
  if (!report.passed) throw InvalidInput("Kac-Rice oracle: degenerate spectral measure");
  return expected_gradient_norm(m).value;
}

}  // namespace

KacRiceOracle::KacRiceOracle(const SpectralMeasure& m)
    : measure(m), exp_grad_norm(gate_and_gradient_norm(m)) {}

double KacRiceOracle::expected_measure(const Domain& dom, double a) const {
  dom.validate();
  const double side = 2.0 * dom.R;
  return side * side * density_at(a) * exp_grad_norm;
}

double kac_rice_expected_measure(const SpectralMeasure& m, const Domain& dom, double a) {
  return KacRiceOracle(m).expected_measure(dom, a);
}

std::vector<ConditionalCurvatureEstimate> conditional_curvature_estimates(
    const SpectralMeasure& m, const Domain& dom, std::span<const double> levels, double bandwidth,
    SeedRange seeds, const ConditionalCurvatureOptions& options) {
  dom.validate();
  if (m.dim() != 2) throw InvalidInput("conditional curvature: d = 2 only");
  if (!(bandwidth > 0.0)) throw InvalidInput("conditional curvature: bandwidth must be positive");
  if (seeds.count == 0) throw InvalidInput("conditional curvature: empty seed range");
  if (options.points_per_axis < 2) throw InvalidInput("conditional curvature: lattice too small");

  const std::size_t nl = levels.size();
  const int n = options.points_per_axis;
  const double step = 2.0 * dom.R / n;
  // per seed, per level: sum of kappa and count of accepted points
  std::vector<std::vector<double>> num(nl, std::vector<double>(seeds.count, 0.0));
  std::vector<std::vector<double>> den(nl, std::vector<double>(seeds.count, 0.0));
  std::vector<std::size_t> totals(seeds.count, 0);

  parallel_for(seeds.count, options.threads, [&](std::size_t s) {
    const std::uint64_t seed = seeds.first + s;
    const SampledField field = SampledField::sample(m, seed);
    const CounterRng shift(derive_key(seed, kLatticeShiftTag));
    const double ux = shift.uniform(0, 0), uy = shift.uniform(0, 1);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = -dom.R + (i + ux) * step;
      ys[i] = -dom.R + (i + uy) * step;
    }
    const GridJet g = field.sample_grid(xs, ys, JetOrder::kHessian);
    std::vector<std::vector<double>> kappas(nl);
    std::size_t total = 0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        ++total;
        const double f = g.f(i, j);
        bool in_any = false;
        for (std::size_t l = 0; l < nl; ++l) in_any |= std::abs(f - levels[l]) <= bandwidth;
        if (!in_any) continue;
        const auto k = curvature(g.at(i, j));
        if (!k) continue;
        for (std::size_t l = 0; l < nl; ++l)
          if (std::abs(f - levels[l]) <= bandwidth) kappas[l].push_back(*k);
      }
    }
    for (std::size_t l = 0; l < nl; ++l) {
      num[l][s] = pairwise_sum(kappas[l]);
      den[l][s] = static_cast<double>(kappas[l].size());
    }
    totals[s] = total;
  });

  std::size_t n_total = 0;
  for (auto t : totals) n_total += t;
  std::vector<ConditionalCurvatureEstimate> out(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    auto& e = out[l];
    e.level = levels[l];
    e.bandwidth = bandwidth;
    e.n_total = n_total;
    const double accepted = pairwise_sum(den[l]);
    e.n_accepted = static_cast<std::size_t>(accepted);
    if (e.n_accepted == 0) {
      e.empty_band = true;
      e.estimate = std::numeric_limits<double>::quiet_NaN();
      e.se = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    e.estimate = pairwise_sum(num[l]) / accepted;
    e.se = seeds.count > 1 ? bootstrap_ratio_se(num[l], den[l], options.bootstrap_resamples,
                                                derive_key(options.bootstrap_key, l))
                           : std::numeric_limits<double>::infinity();
  }
  return out;
}

ConditionalCurvatureEstimate conditional_curvature_estimate(
    const SpectralMeasure& m, const Domain& dom, double a, double bandwidth, SeedRange seeds,
    const ConditionalCurvatureOptions& options) {
  const double levels[] = {a};
  return conditional_curvature_estimates(m, dom, levels, bandwidth, seeds, options).front();
}

CurvatureMoment curvature_power_mean(const SpectralMeasure& m, const Domain& dom, double p,
                                     std::size_t n_points, std::uint64_t first_seed,
                                     std::size_t points_per_seed, unsigned threads) {
  dom.validate();
  if (m.dim() != 2) throw InvalidInput("curvature_power_mean: d = 2 only");
  if (!(p > 0.0) || n_points == 0 || points_per_seed == 0)
    throw InvalidInput("curvature_power_mean: invalid sample parameters");

  const std::size_t n_seeds = (n_points + points_per_seed - 1) / points_per_seed;
  std::vector<std::vector<double>> per_seed(n_seeds);
  parallel_for(n_seeds, threads, [&](std::size_t s) {
    const std::uint64_t seed = first_seed + s;
    const SampledField field = SampledField::sample(m, seed);
    const CounterRng rng(derive_key(seed, kMomentPointTag));
    const std::size_t begin = s * points_per_seed;
    const std::size_t end = std::min(n_points, begin + points_per_seed);
    auto& out = per_seed[s];
    out.reserve(end - begin);
    for (std::size_t i = 0; i < end - begin; ++i) {
      const Vec2 x(-dom.R + 2.0 * dom.R * rng.uniform(i, 0), -dom.R + 2.0 * dom.R * rng.uniform(i, 1));
      if (auto k = curvature(field.jet(x))) out.push_back(std::pow(std::abs(*k), p));
    }
  });
  std::vector<double> all;
  all.reserve(n_points);
  for (const auto& v : per_seed) all.insert(all.end(), v.begin(), v.end());
  const MeanSe ms = mean_se(all);
  return {ms.mean, ms.se, ms.n};
}

}  // namespace levelgauss
