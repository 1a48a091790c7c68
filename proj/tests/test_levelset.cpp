#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "levelgauss/analytic_fields.hpp"
#include "levelgauss/coupling.hpp"
#include "levelgauss/error.hpp"
#include "levelgauss/levelset.hpp"
#include "levelgauss/rng.hpp"
#include "levelgauss/stats.hpp"
#include "levelgauss/transport.hpp"

namespace lg = levelgauss;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

lg::SampledField rpw(std::uint64_t seed) { return lg::SampledField::sample(lg::rpw_circle(64), seed); }

}  // namespace

TEST(Curvature, RadialFieldIsInverseRadius) {
  const lg::QuadraticRadialField f(0.5);
  for (double r : {0.25, 1.0, 2.5}) {
    for (double th : {0.0, 1.0, 4.0}) {
      const auto c = lg::curvature_at(f, lg::Vec2(r * std::cos(th), r * std::sin(th)));
      ASSERT_TRUE(c.kappa.has_value());
      EXPECT_NEAR(*c.kappa, 1.0 / r, 1e-13);
      EXPECT_NEAR(c.grad_norm, r, 1e-13);
    }
  }
}

TEST(Curvature, LinearFieldIsFlat) {
  const lg::LinearField f(lg::Vec2(0.6, -0.8), 0.3);
  for (double x : {-1.0, 0.0, 2.0}) EXPECT_EQ(*lg::curvature_at(f, lg::Vec2(x, 1.0)).kappa, 0.0);
}

TEST(Curvature, UndefinedAtCriticalPoint) {
  const lg::QuadraticRadialField f(0.5, lg::Vec2(0.3, 0.1));
  const auto c = lg::curvature_at(f, lg::Vec2(0.3, 0.1));
  EXPECT_FALSE(c.kappa.has_value());
  EXPECT_EQ(c.grad_norm, 0.0);
}

TEST(Curvature, AntisymmetricUnderNegationExactly) {
  const auto f = rpw(5);
  const auto g = f.negated();
  const lg::CounterRng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const lg::Vec2 x(8.0 * rng.uniform(i, 0) - 4.0, 8.0 * rng.uniform(i, 1) - 4.0);
    const auto a = lg::curvature_at(f, x), b = lg::curvature_at(g, x);
    ASSERT_TRUE(a.kappa && b.kappa);
    ASSERT_EQ(*a.kappa, -*b.kappa);
  }
}

TEST(LevelLength, LinearFieldGivesSideLength) {
  const lg::LinearField f(lg::Vec2(1.0, 0.0));
  for (int n : {64, 65, 256, 257}) {
    const auto m = lg::level_length(f, lg::Domain{1.0, 2, n}, 0.0);
    EXPECT_NEAR(m.length, 2.0, 1e-12) << n;
    EXPECT_EQ(m.grid_n, n);
  }
}

TEST(LevelLength, CircleCircumference) {
  const lg::QuadraticRadialField f(1.0);
  const auto m = lg::level_length(f, lg::Domain{2.0, 2, 512}, 1.0);
  EXPECT_NEAR(m.length, kTwoPi, 0.005 * kTwoPi);
  EXPECT_GT(m.segment_count, 0u);
}

TEST(LevelLength, AboveMaximumIsZero) {
  const auto f = rpw(1);
  const auto m = lg::level_length(f, lg::Domain{3.0, 2, 128}, 100.0);
  EXPECT_EQ(m.length, 0.0);
  EXPECT_EQ(m.segment_count, 0u);
}

TEST(LevelLength, AdditiveOverSubrectangles) {
  const auto f = rpw(2);
  const lg::Rect whole{-4.0, 4.0, -4.0, 4.0};
  const double h = 8.0 / 512;
  const double total = lg::level_length(f, whole, 513, 513, 0.0).length;
  const double left = lg::level_length(f, lg::Rect{-4.0, 0.0, -4.0, 4.0}, 257, 513, 0.0).length;
  const double right = lg::level_length(f, lg::Rect{0.0, 4.0, -4.0, 4.0}, 257, 513, 0.0).length;
  EXPECT_NEAR(left + right, total, h);
}

TEST(LevelLength, RefinementConsistency) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto f = rpw(s);
    const double a = lg::level_length(f, lg::Domain{4.0, 2, 256}, 0.0).length;
    const double b = lg::level_length(f, lg::Domain{4.0, 2, 512}, 0.0).length;
    EXPECT_NEAR(a, b, 0.01 * b);
  }
}

TEST(LevelSegments, SaddleResolvedByCentreValue) {
  // f = x y on a single cell centred on the origin; level slightly above 0
  // makes the cell a saddle with two corners inside.
  class Saddle final : public lg::Field2 {
   public:
    double value(const lg::Vec2& x) const override { return x.x() * x.y() + c; }
    lg::Jet2 jet(const lg::Vec2& x) const override {
      lg::Jet2 j;
      j.f = value(x);
      j.grad = lg::Vec2(x.y(), x.x());
      j.hess << 0.0, 1.0, 1.0, 0.0;
      return j;
    }
    double c = 0.0;
  };
  Saddle s;
  const lg::Rect r{-1.0, 1.0, -1.0, 1.0};
  s.c = 0.1;  // centre inside: positive corners (1,1), (-1,-1) joined
  auto segs = lg::level_segments(s, r, 2, 2, 0.0);
  ASSERT_EQ(segs.size(), 2u);
  for (const auto& g : segs) {
    // each segment separates a negative corner from the centre
    EXPECT_GT(std::abs(g.p.x() + g.q.x()) + std::abs(g.p.y() + g.q.y()), 0.0);
    const lg::Vec2 mid = 0.5 * (g.p + g.q);
    EXPECT_LT(mid.x() * mid.y(), 0.0);
  }
  s.c = -0.1;  // centre outside: negative corners joined
  segs = lg::level_segments(s, r, 2, 2, 0.0);
  ASSERT_EQ(segs.size(), 2u);
  for (const auto& g : segs) {
    const lg::Vec2 mid = 0.5 * (g.p + g.q);
    EXPECT_GT(mid.x() * mid.y(), 0.0);
  }
}

TEST(BulkIntegral, LinearFieldVanishes) {
  const lg::LinearField f(lg::Vec2(0.28, 0.96));
  const auto b = lg::bulk_curvature_integral(f, lg::Domain{1.0, 2, 64}, -0.3, 0.4);
  EXPECT_EQ(b.value, 0.0);
}

TEST(BulkIntegral, RadialBandIsTwoPi) {
  const lg::QuadraticRadialField f(0.5);
  const auto b = lg::bulk_curvature_integral(f, lg::Domain{3.0, 2, 512}, 0.5, 2.0);
  EXPECT_NEAR(b.value, kTwoPi, 0.005 * kTwoPi);
}

TEST(BulkIntegral, NegationWithMirroredBand) {
  const auto f = rpw(4);
  const auto g = f.negated();
  const lg::Domain dom{3.0, 2, 128};
  const double a = lg::bulk_curvature_integral(f, dom, 0.1, 0.6).value;
  const double b = lg::bulk_curvature_integral(g, dom, -0.6, -0.1).value;
  EXPECT_NEAR(a, -b, 1e-12 * std::max(1.0, std::abs(a)));
}

TEST(BulkIntegral, OneSidedSetAndRejection) {
  const lg::QuadraticRadialField f(0.5);
  const lg::Domain dom{3.0, 2, 256};
  // {f <= 2} is the disc of radius 2; int 1/r over it = 2 pi * 2
  const auto b = lg::bulk_curvature_integral(f, dom, -std::numeric_limits<double>::infinity(), 2.0);
  EXPECT_NEAR(b.value, 2.0 * kTwoPi, 0.01 * 2.0 * kTwoPi);
  EXPECT_GT(b.near_critical_volume, 0.0);
  EXPECT_THROW(lg::bulk_curvature_integral(f, dom, 1.0, 1.0), lg::InvalidInput);
}

TEST(BoundaryFlux, LinearFieldExamples) {
  const lg::LinearField f(lg::Vec2(1.0, 0.0));
  const lg::Domain dom{1.0, 2, 64};
  EXPECT_NEAR(lg::boundary_flux(f, dom, -0.5, 0.5).value, 0.0, 1e-14);
  EXPECT_NEAR(lg::boundary_flux(f, dom, -2.0, 2.0).value, 0.0, 1e-14);
  // only the right face x = 1 (f = 1) is in the band [0.5, 2]: +2
  EXPECT_NEAR(lg::boundary_flux(f, dom, 0.5, 2.0).value, 2.0, 1e-12);
  // only the left face: <e1, -e1> * 2
  EXPECT_NEAR(lg::boundary_flux(f, dom, -2.0, -0.5).value, -2.0, 1e-12);
}

TEST(BoundaryFlux, RadialBandMissesBoundary) {
  const lg::QuadraticRadialField f(0.5);
  const auto b = lg::boundary_flux(f, lg::Domain{3.0, 2, 512}, 0.5, 2.0);
  EXPECT_EQ(b.value, 0.0);
  EXPECT_EQ(b.flagged_nodes, 0u);
}

TEST(BoundaryFlux, CriticalBoundaryNodeIsJittered) {
  // critical point on the right face at the middle panel's midpoint
  const lg::QuadraticRadialField f(0.5, lg::Vec2(1.0, 0.0));
  const auto b = lg::boundary_flux(f, lg::Domain{1.0, 2, 17}, -1.0, 10.0, {}, 7);
  EXPECT_EQ(b.jittered_nodes, 1u);
  EXPECT_EQ(b.flagged_nodes, 0u);
  EXPECT_TRUE(std::isfinite(b.value));
}

TEST(BoundaryFlux, CriticalFaceIsFlagged) {
  // f = (x - 1)^2 / 2 has zero gradient along the whole face x = 1
  class Trough final : public lg::Field2 {
   public:
    double value(const lg::Vec2& x) const override { return 0.5 * (x.x() - 1.0) * (x.x() - 1.0); }
    lg::Jet2 jet(const lg::Vec2& x) const override {
      lg::Jet2 j;
      j.f = value(x);
      j.grad = lg::Vec2(x.x() - 1.0, 0.0);
      j.hess << 1.0, 0.0, 0.0, 0.0;
      return j;
    }
  } f;
  const auto b = lg::boundary_flux(f, lg::Domain{1.0, 2, 16}, -1.0, 10.0, {}, 7);
  EXPECT_EQ(b.flagged_nodes, 16u);
  EXPECT_EQ(b.jittered_nodes, 16u);
  const auto r = lg::identity_report(f, lg::Domain{1.0, 2, 16}, -1.0, 10.0, {}, 7);
  EXPECT_EQ(r.boundary_flags, 16u);
}

TEST(IdentityReport, LinearFieldResidualVanishes) {
  const lg::LinearField f(lg::Vec2(std::cos(0.7), std::sin(0.7)));
  const auto r = lg::identity_report(f, lg::Domain{2.0, 2, 256}, -0.5, 0.8);
  EXPECT_EQ(r.bulk_integral, 0.0);
  EXPECT_GT(std::abs(r.measure_b - r.measure_a), 0.1);
  EXPECT_NEAR(r.measure_b - r.measure_a, -r.boundary_flux, 1e-9);
  EXPECT_NEAR(r.residual, 0.0, 1e-9);
}

TEST(IdentityReport, RadialClosedForm) {
  const lg::QuadraticRadialField f(0.5);
  const auto r = lg::identity_report(f, lg::Domain{3.0, 2, 512}, 0.5, 2.0);
  EXPECT_NEAR(r.measure_b, 2.0 * kTwoPi, 0.005 * 2.0 * kTwoPi);
  EXPECT_NEAR(r.measure_a, kTwoPi, 0.005 * kTwoPi);
  EXPECT_NEAR(r.measure_b - r.measure_a, kTwoPi, 0.005 * kTwoPi);
  EXPECT_NEAR(r.bulk_integral, kTwoPi, 0.005 * kTwoPi);
  EXPECT_EQ(r.boundary_flux, 0.0);
  EXPECT_NEAR(r.residual, 0.0, 0.005 * kTwoPi);
  EXPECT_THROW(lg::identity_report(f, lg::Domain{3.0, 2, 64}, 2.0, 0.5), lg::InvalidInput);
}

TEST(IdentityReport, RandomFieldResidualSmallAndConverging) {
  std::vector<double> coarse, fine;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = rpw(s);
    coarse.push_back(lg::identity_report(f, lg::Domain{4.0, 2, 128}, 0.0, 0.5, {}, s).normalized_residual());
    fine.push_back(lg::identity_report(f, lg::Domain{4.0, 2, 512}, 0.0, 0.5, {}, s).normalized_residual());
  }
  EXPECT_LE(lg::median(fine), 0.02);
  EXPECT_LE(lg::median(fine), lg::median(coarse));
}

TEST(IdentityReport, HoldsOnBargmannFockField) {
  const auto f = lg::SampledField::sample(lg::bargmann_fock(16, 4.0, 8), 3);
  const auto r = lg::identity_report(f, lg::Domain{3.0, 2, 512}, -0.25, 0.25, {}, 3);
  EXPECT_LE(r.normalized_residual(), 0.02);
}

TEST(LevelContinuity, LinearGapsVanish) {
  const lg::LinearField f(lg::Vec2(1.0, 0.0));
  const std::vector<double> deltas{0.5, 0.25, 0.125};
  for (const auto& [d, gap] : lg::level_continuity_scan(f, lg::Domain{1.0, 2, 64}, 0.0, deltas))
    EXPECT_NEAR(gap, 0.0, 1e-12) << d;
}

TEST(LevelContinuity, CircleGapsFollowSquareRoot) {
  const lg::QuadraticRadialField f(1.0);
  const std::vector<double> deltas{0.5, 0.25, 0.125, 0.0625};
  const auto scan = lg::level_continuity_scan(f, lg::Domain{2.0, 2, 512}, 1.0, deltas);
  ASSERT_EQ(scan.size(), deltas.size());
  for (const auto& [d, gap] : scan) EXPECT_NEAR(gap, kTwoPi * (std::sqrt(1.0 + d) - 1.0), 2e-4) << d;
}

TEST(Decomposition, IdentityCouplingHasNoCrossTerms) {
  const auto m = lg::rpw_circle(32);
  const auto cp = lg::couple(m, m, lg::optimal_coupling(m, m), 4);
  const auto r = lg::bulk_difference_decomposition(cp, lg::Domain{3.0, 2, 128});
  EXPECT_EQ(r.bulk_both_negative, 0.0);
  EXPECT_EQ(r.bulk_kappa1_disagree, 0.0);
  EXPECT_EQ(r.bulk_kappa2_disagree, 0.0);
  EXPECT_EQ(r.disagreement_area, 0.0);
  EXPECT_EQ(r.boundary_both_negative, 0.0);
  EXPECT_EQ(r.boundary1_only, 0.0);
  EXPECT_EQ(r.boundary2_only, 0.0);
  EXPECT_EQ(r.length1, r.length2);
}

TEST(Decomposition, PiecesAreConsistent) {
  const auto m1 = lg::rpw_circle(32);
  const auto m2 = lg::dilate(m1, 1.1);
  const auto cp = lg::couple(m1, m2, lg::optimal_coupling(m1, m2), 8);
  const auto r = lg::bulk_difference_decomposition(cp, lg::Domain{3.0, 2, 512});
  EXPECT_NEAR(r.boundary_total, r.boundary_both_negative + r.boundary1_only - r.boundary2_only, 1e-9);
  // one-sided identity for each field: H(f^{-1}(0)) = int k 1{f<=0} - oint <n,eta> 1{f<=0}
  EXPECT_NEAR(r.length1 - r.length2, r.bulk_total - r.boundary_total,
              0.02 * (1.0 + std::abs(r.length1 - r.length2)));
  EXPECT_GT(r.disagreement_area, 0.0);
}

TEST(Decomposition, DisagreementAreaMatchesArccosOracle) {
  const auto m1 = lg::rpw_circle(32);
  const auto m2 = lg::dilate(m1, 1.3);
  const auto plan = lg::optimal_coupling(m1, m2);
  const lg::Domain dom{3.0, 2, 64};
  std::vector<double> frac;
  for (int s = 0; s < 100; ++s) {
    const auto cp = lg::couple(m1, m2, plan, s);
    frac.push_back(lg::bulk_difference_decomposition(cp, dom).disagreement_area / 36.0);
  }
  const auto ms = lg::mean_se(frac);
  const auto cp = lg::couple(m1, m2, plan, 0);
  double oracle = 0.0;
  const int n = 201;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const lg::Vec2 x(-3.0 + 6.0 * (i + 0.5) / n, -3.0 + 6.0 * (j + 0.5) / n);
      oracle += std::acos(std::clamp(lg::correlation_at(cp, x), -1.0, 1.0)) / std::numbers::pi;
    }
  oracle /= n * n;
  EXPECT_NEAR(ms.mean, oracle, 3.0 * ms.se);
}

TEST(CriticalPoints, RadialMinimum) {
  const lg::QuadraticRadialField f(0.5, lg::Vec2(0.3, -0.2));
  const auto cps = lg::critical_points(f, lg::Domain{2.0, 2, 64});
  ASSERT_EQ(cps.size(), 1u);
  EXPECT_NEAR(cps[0].point.x(), 0.3, 1e-12);
  EXPECT_NEAR(cps[0].point.y(), -0.2, 1e-12);
  EXPECT_DOUBLE_EQ(cps[0].hessian_det, 1.0);
}

TEST(CriticalPoints, SaddleGrid) {
  // f = -sin x sin y: saddles at (k pi, l pi), extrema at (+-pi/2, +-pi/2).
  const auto m = lg::atomic_measure({{{1.0, 1.0}, 0.5}, {{1.0, -1.0}, 0.5}});
  Eigen::VectorXd a(2), b(2);
  a << std::sqrt(0.5), -std::sqrt(0.5);  // cos(x - y) - cos(x + y) = 2 sin x sin y
  b << 0.0, 0.0;
  const auto f = lg::SampledField::with_coefficients(m, a, b);
  const auto cps = lg::critical_points(f, lg::Domain{4.0, 2, 128});
  ASSERT_EQ(cps.size(), 13u);
  int saddles = 0;
  for (const auto& c : cps) {
    saddles += c.hessian_det < 0.0;
    EXPECT_NEAR(std::abs(c.hessian_det), 1.0, 1e-9);
    const double kx = c.point.x() / (0.5 * std::numbers::pi), ky = c.point.y() / (0.5 * std::numbers::pi);
    EXPECT_NEAR(kx, std::round(kx), 1e-9);
    EXPECT_NEAR(ky, std::round(ky), 1e-9);
  }
  EXPECT_EQ(saddles, 9);
  const auto mc = lg::morse_check(f, lg::Domain{4.0, 2, 128});
  EXPECT_EQ(mc.degenerate, 0u);
  EXPECT_NEAR(mc.min_abs_det, 0.5, 1e-9);
}

TEST(CriticalPoints, DegenerateLineDetected) {
  const auto m = lg::atomic_measure({{{1.0, 0.0}, 1.0}});
  Eigen::VectorXd a(1), b(1);
  a << 1.0;
  b << 0.0;
  const auto f = lg::SampledField::with_coefficients(m, a, b);  // cos x
  const auto mc = lg::morse_check(f, lg::Domain{2.0, 2, 32});
  EXPECT_GT(mc.critical_points, 0u);
  EXPECT_EQ(mc.degenerate, mc.critical_points);
  EXPECT_EQ(mc.min_abs_det, 0.0);
}

TEST(CriticalPoints, RpwRealisationsAreMorse) {
  const auto m = lg::rpw_circle(64);
  const lg::Domain dom{4.0, 2, 256};
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto mc = lg::morse_check(lg::SampledField::sample(m, seed), dom);
    EXPECT_EQ(mc.degenerate, 0u) << seed;
    EXPECT_GT(mc.min_abs_det, 1e-8) << seed;
    total += mc.critical_points;
  }
  EXPECT_GT(total, 0u);
}

TEST(CriticalPoints, CountMatchesKacRice) {
  // E #crit in D = |D| p_grad(0) E|det H|, with H drawn from its own
  // Gaussian law built from the fourth moments of the atoms.
  const auto m = lg::rpw_circle(64);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();  // (fxx, fxy, fyy)
  Eigen::Matrix2d lambda = Eigen::Matrix2d::Zero();
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double x = m.atom(k)(0), y = m.atom(k)(1), w = m.weight(k);
    const Eigen::Vector3d v(x * x, x * y, y * y);
    cov += w * v * v.transpose();
    lambda += w * m.atom(k) * m.atom(k).transpose();
  }
  const Eigen::Matrix3d chol = cov.llt().matrixL();
  const lg::CounterRng rng(0xc417);
  std::vector<double> dets(400000);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Eigen::Vector3d z(rng.normal(i, 0), rng.normal(i, 1), rng.normal(i, 2));
    const Eigen::Vector3d h = chol * z;
    dets[i] = std::abs(h(0) * h(2) - h(1) * h(1));
  }
  const double R = 4.0;
  const double density = 1.0 / (2.0 * std::numbers::pi * std::sqrt(lambda.determinant()));
  const double oracle = 4.0 * R * R * density * lg::mean_se(dets).mean;

  const lg::Domain dom{R, 2, 256};
  std::vector<double> counts;
  for (std::uint64_t seed = 0; seed < 40; ++seed)
    counts.push_back(static_cast<double>(lg::critical_points(lg::SampledField::sample(m, seed), dom).size()));
  const auto ms = lg::mean_se(counts);
  EXPECT_NEAR(ms.mean, oracle, 4.0 * ms.se + 0.01 * oracle) << "oracle " << oracle;
}
