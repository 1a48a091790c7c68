#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "levelgauss/analytic_fields.hpp"
#include "levelgauss/error.hpp"
#include "levelgauss/field.hpp"
#include "levelgauss/spectral_measure.hpp"
#include "levelgauss/stats.hpp"

namespace lg = levelgauss;

namespace {

lg::SampledField unit_cosine() {
  const auto m = lg::atomic_measure({{{1.0, 0.0}, 1.0}});
  Eigen::VectorXd a(1), b(1);
  a << 1.0;
  b << 0.0;
  return lg::SampledField::with_coefficients(m, a, b);
}

}  // namespace

TEST(Sample, SameSeedBitIdentical) {
  const auto m = lg::rpw_circle(64);
  const auto f1 = lg::SampledField::sample(m, 123);
  const auto f2 = lg::SampledField::sample(m, 123);
  const lg::Vec2 x(0.3, -1.7);
  EXPECT_EQ(f1.value(x), f2.value(x));
  EXPECT_EQ(f1.value(x), f1.value(x));
  const auto j1 = f1.jet(x), j2 = f2.jet(x);
  EXPECT_EQ(j1.grad, j2.grad);
  EXPECT_EQ(j1.hess, j2.hess);
  EXPECT_NE(f1.value(x), lg::SampledField::sample(m, 124).value(x));
}

TEST(Sample, ForcedCoefficientsGiveCosine) {
  const auto f = unit_cosine();
  for (double x1 : {-2.0, 0.0, 0.7, 3.0}) {
    const auto j = f.jet(lg::Vec2(x1, 0.4));
    EXPECT_NEAR(j.f, std::cos(x1), 1e-15);
    EXPECT_NEAR(j.grad(0), -std::sin(x1), 1e-15);
    EXPECT_NEAR(j.grad(1), 0.0, 1e-15);
  }
}

TEST(Sample, VarianceAtOriginIsOne) {
  const auto m = lg::rpw_circle(64);
  const int n = 100000;
  std::vector<double> sq(n);
  for (int s = 0; s < n; ++s) {
    const double v = lg::SampledField::sample(m, s).value(lg::Vec2::Zero());
    sq[s] = v * v;
  }
  const auto ms = lg::mean_se(sq);
  EXPECT_NEAR(ms.mean, 1.0, 3.0 * ms.se);
}

TEST(Sample, KurtosisAtOriginIsGaussian) {
  const auto m = lg::rpw_circle(64);
  const int n = 100000;
  std::vector<double> v(n);
  for (int s = 0; s < n; ++s) v[s] = lg::SampledField::sample(m, s).value(lg::Vec2::Zero());
  const auto ms = lg::mean_se(v);
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double c = x - ms.mean;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  m2 /= n;
  m4 /= n;
  const double kurt = m4 / (m2 * m2);
  EXPECT_GE(kurt, 2.9);
  EXPECT_LE(kurt, 3.1);
}

TEST(Sample, StationaryProductMoments) {
  const auto m = lg::rpw_circle(64);
  const lg::Vec2 t(0.8, -0.3);
  const lg::Vec2 xs[] = {lg::Vec2(0.0, 0.0), lg::Vec2(3.0, -2.0), lg::Vec2(-7.5, 11.0)};
  const int n = 10000;
  std::vector<lg::MeanSe> stats;
  for (const auto& x : xs) {
    std::vector<double> prod(n);
    for (int s = 0; s < n; ++s) {
      const auto f = lg::SampledField::sample(m, 1000000 + s);
      prod[s] = f.value(x) * f.value(x + t);
    }
    stats.push_back(lg::mean_se(prod));
  }
  for (std::size_t i = 0; i < stats.size(); ++i)
    for (std::size_t j = i + 1; j < stats.size(); ++j)
      EXPECT_LE(std::abs(stats[i].mean - stats[j].mean),
                4.0 * std::hypot(stats[i].se, stats[j].se));
  const double tt[] = {t(0), t(1)};
  for (const auto& s : stats) EXPECT_NEAR(s.mean, lg::kernel_eval(m, tt), 4.0 * s.se);
}

TEST(EvalJet, CosineAtOrigin) {
  const auto j = unit_cosine().jet(lg::Vec2(0.0, 0.0));
  EXPECT_DOUBLE_EQ(j.f, 1.0);
  EXPECT_DOUBLE_EQ(j.grad(0), 0.0);
  EXPECT_DOUBLE_EQ(j.grad(1), 0.0);
  EXPECT_DOUBLE_EQ(j.hess(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(j.hess(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(j.hess(1, 1), 0.0);
}

TEST(EvalJet, CosineAtQuarterPeriod) {
  const auto j = unit_cosine().jet(lg::Vec2(std::numbers::pi / 2.0, 0.0));
  EXPECT_NEAR(j.f, 0.0, 1e-15);
  EXPECT_NEAR(j.grad(0), -1.0, 1e-15);
  EXPECT_NEAR(j.grad(1), 0.0, 1e-15);
}

TEST(EvalJet, MatchesFiniteDifferences) {
  const double h = 1e-5;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = lg::SampledField::sample(lg::rpw_circle(64), seed);
    const lg::Vec2 x(0.37 * seed - 1.0, 2.0 - 0.21 * seed);
    const auto j = f.jet(x);
    const lg::Vec2 e[2] = {lg::Vec2(h, 0.0), lg::Vec2(0.0, h)};
    for (int i = 0; i < 2; ++i) {
      const double g = (f.value(x + e[i]) - f.value(x - e[i])) / (2.0 * h);
      EXPECT_NEAR(j.grad(i), g, 1e-6 * std::max(1.0, std::abs(g)));
      for (int k = 0; k < 2; ++k) {
        const double hk = (f.jet(x + e[k]).grad(i) - f.jet(x - e[k]).grad(i)) / (2.0 * h);
        EXPECT_NEAR(j.hess(i, k), hk, 1e-6 * std::max(1.0, std::abs(hk)));
      }
    }
    EXPECT_EQ(j.hess(0, 1), j.hess(1, 0));
  }
}

TEST(EvalJet, GeneralDimension) {
  const auto m = lg::atomic_measure({{{1.0, 0.0, 0.0}, 0.25},
                                     {{0.0, 1.0, 0.0}, 0.25},
                                     {{0.0, 0.0, 1.0}, 0.25},
                                     {{1.0, 1.0, 1.0}, 0.25}});
  const auto f = lg::SampledField::sample(m, 5);
  const double x[] = {0.2, -0.4, 1.1};
  const auto j = f.eval_jet(x);
  ASSERT_EQ(j.grad.size(), 3);
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    double xp[] = {x[0], x[1], x[2]}, xm[] = {x[0], x[1], x[2]};
    xp[i] += h;
    xm[i] -= h;
    EXPECT_NEAR(j.grad(i), (f.eval_jet(xp).f - f.eval_jet(xm).f) / (2.0 * h), 1e-6);
  }
  EXPECT_TRUE(j.hess.isApprox(j.hess.transpose(), 0.0));
  EXPECT_THROW(f.value(lg::Vec2::Zero()), lg::InvalidInput);
  const double bad[] = {0.0, 0.0};
  EXPECT_THROW(f.eval_jet(bad), lg::InvalidInput);
}

TEST(SampleGrid, MatchesPointwiseJets) {
  const auto f = lg::SampledField::sample(lg::rpw_circle(32), 77);
  const std::vector<double> xs{-3.0, -1.2, 0.0, 0.5, 2.75};
  const std::vector<double> ys{-2.0, 0.1, 4.0};
  const auto g = f.sample_grid(xs, ys, lg::JetOrder::kHessian);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const auto p = f.jet(lg::Vec2(xs[i], ys[j]));
      const auto q = g.at(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      EXPECT_NEAR(p.f, q.f, 1e-12);
      EXPECT_NEAR((p.grad - q.grad).norm(), 0.0, 1e-12);
      EXPECT_NEAR((p.hess - q.hess).norm(), 0.0, 1e-12);
    }
  const auto v = f.sample_grid(xs, ys, lg::JetOrder::kValue);
  EXPECT_EQ(v.fx.size(), 0);
  EXPECT_NEAR((v.f - g.f).norm(), 0.0, 1e-13);
}

TEST(SampleGrid, AnalyticFieldsDefaultPath) {
  const lg::QuadraticRadialField q(0.5);
  const std::vector<double> xs{-1.0, 2.0};
  const auto g = q.sample_grid(xs, xs, lg::JetOrder::kHessian);
  EXPECT_DOUBLE_EQ(g.f(1, 0), 0.5 * (4.0 + 1.0));
  EXPECT_DOUBLE_EQ(g.fx(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(g.fxx(0, 0), 1.0);
  const lg::NegatedField n(q);
  EXPECT_DOUBLE_EQ(n.sample_grid(xs, xs, lg::JetOrder::kValue).f(1, 0), -2.5);
}

TEST(Negated, FlipsEveryComponent) {
  const auto f = lg::SampledField::sample(lg::rpw_circle(16), 3);
  const auto g = f.negated();
  const lg::Vec2 x(0.4, -0.9);
  const auto a = f.jet(x), b = g.jet(x);
  EXPECT_EQ(a.f, -b.f);
  EXPECT_EQ(a.grad, -b.grad);
  EXPECT_EQ(a.hess, -b.hess);
}
