#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "levelgauss/error.hpp"
#include "levelgauss/rng.hpp"
#include "levelgauss/spectral_measure.hpp"

namespace lg = levelgauss;

namespace {

lg::SpectralMeasure random_measure(std::uint64_t key, int n, int dim = 2) {
  const lg::CounterRng rng(key);
  Eigen::MatrixXd atoms(dim, n);
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < dim; ++i) atoms(i, k) = 2.0 * rng.normal(k, i);
    w(k) = 0.1 + rng.uniform(k, 10);
  }
  w /= w.sum();
  return lg::SpectralMeasure(atoms, w);
}

double bessel_j0_quadrature(double r) {
  auto f = [r](double t) { return std::cos(r * std::cos(t)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 2.0 * std::numbers::pi,
                                                                      15, 1e-13) /
         (2.0 * std::numbers::pi);
}

}  // namespace

TEST(KernelEval, SingleAtomAtOrigin) {
  const auto m = lg::atomic_measure({{{1.0, 0.0}, 1.0}});
  const double t[] = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(lg::kernel_eval(m, t), 1.0);
}

TEST(KernelEval, SingleAtomAtPi) {
  const auto m = lg::atomic_measure({{{1.0, 0.0}, 1.0}});
  const double t[] = {std::numbers::pi, 0.0};
  EXPECT_DOUBLE_EQ(lg::kernel_eval(m, t), -1.0);
}

TEST(KernelEval, CircleDiscretisationMatchesJ0) {
  const auto m = lg::rpw_circle(256);
  for (double r = 0.0; r <= 10.0; r += 0.25) {
    const double t[] = {r, 0.0};
    EXPECT_NEAR(lg::kernel_eval(m, t), bessel_j0_quadrature(r), 1e-6) << "r = " << r;
  }
}

TEST(KernelEval, DimensionMismatchRejected) {
  const auto m = lg::rpw_circle(4);
  const double t[] = {0.0, 0.0, 0.0};
  EXPECT_THROW(lg::kernel_eval(m, t), lg::InvalidInput);
}

TEST(KernelEval, SymmetricAndBoundedOnRandomMeasures) {
  for (std::uint64_t key = 1; key <= 20; ++key) {
    const auto m = random_measure(key, 1 + static_cast<int>(key % 7), 2 + static_cast<int>(key % 2));
    const lg::CounterRng rng(key * 977);
    for (int i = 0; i < 50; ++i) {
      std::vector<double> t(m.dim()), mt(m.dim());
      for (int j = 0; j < m.dim(); ++j) {
        t[j] = 10.0 * (rng.uniform(i, j) - 0.5);
        mt[j] = -t[j];
      }
      const double k = lg::kernel_eval(m, t);
      EXPECT_EQ(k, lg::kernel_eval(m, mt));
      EXPECT_LE(std::abs(k), 1.0 + 1e-15);
    }
  }
}

TEST(SecondMoments, SingleAtom) {
  const auto m = lg::atomic_measure({{{1.0, 0.0}, 1.0}});
  const auto mom = lg::second_moments(m);
  EXPECT_DOUBLE_EQ(mom.second_moment(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(mom.second_moment(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(mom.second_moment(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(mom.second_moment(1, 1), 0.0);
}

TEST(SecondMoments, UniformCircleIsHalfIdentity) {
  for (int M : {4, 5, 8, 17, 64, 256}) {
    const auto L = lg::second_moments(lg::rpw_circle(M)).second_moment;
    EXPECT_NEAR(L(0, 0), 0.5, 1e-12) << M;
    EXPECT_NEAR(L(1, 1), 0.5, 1e-12) << M;
    EXPECT_NEAR(L(0, 1), 0.0, 1e-12) << M;
  }
}

TEST(SecondMoments, TwoAxisAtoms) {
  const auto m = lg::atomic_measure({{{1.0, 0.0}, 0.5}, {{0.0, 1.0}, 0.5}});
  const auto L = lg::second_moments(m).second_moment;
  EXPECT_DOUBLE_EQ(L(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(L(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(L(0, 1), 0.0);
}

TEST(SecondMoments, MatchesFiniteDifferenceHessianOfKernel) {
  const double h = 1e-4;
  for (std::uint64_t key = 1; key <= 15; ++key) {
    const auto m = random_measure(key, 2 + static_cast<int>(key % 5), 2 + static_cast<int>(key % 2));
    const auto L = lg::second_moments(m).second_moment;
    const int d = m.dim();
    auto K = [&](int i, double si, int j, double sj) {
      std::vector<double> t(d, 0.0);
      t[i] += si;
      t[j] += sj;
      return lg::kernel_eval(m, t);
    };
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double hess =
            (K(i, h, j, h) - K(i, h, j, -h) - K(i, -h, j, h) + K(i, -h, j, -h)) / (4.0 * h * h);
        EXPECT_NEAR(L(i, j), -hess, 1e-6 * std::max(1.0, std::abs(L(i, j))));
      }
  }
}

TEST(SecondMoments, DiagonalIsWeightedSquareSum) {
  const auto m = random_measure(42, 6, 3);
  const auto mom = lg::second_moments(m);
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) s += m.weight(k) * m.atom(k)(i) * m.atom(k)(i);
    EXPECT_NEAR(mom.second_moment(i, i), s, 1e-14);
  }
  EXPECT_TRUE(mom.second_moment.isApprox(mom.second_moment.transpose()));
  // all multi-indices of order <= 4 in 3 variables: C(7, 3) = 35
  EXPECT_EQ(mom.moments.size(), 35u);
}

TEST(Validation, SingleAtomFails) {
  const auto r = lg::validate_nondegenerate(lg::atomic_measure({{{1.0, 0.0}, 1.0}}));
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.failures.empty());
}

TEST(Validation, AxisAtomsPass) {
  const auto r = lg::validate_nondegenerate(lg::atomic_measure({{{1.0, 0.0}, 0.5}, {{0.0, 1.0}, 0.5}}));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.symmetric_atom_count, 4u);
}

TEST(Validation, CirclePasses) {
  EXPECT_TRUE(lg::validate_nondegenerate(lg::rpw_circle(64)).passed);
}

TEST(Validation, CollinearAtomsFail) {
  const auto r = lg::validate_nondegenerate(lg::atomic_measure({{{1.0, 1.0}, 0.5}, {{2.0, 2.0}, 0.5}}));
  EXPECT_FALSE(r.passed);
}

TEST(Construction, RejectsInvalidWeightsAndAtoms) {
  using Atoms = std::vector<std::pair<std::vector<double>, double>>;
  EXPECT_THROW(lg::atomic_measure(Atoms{{{1.0, 0.0}, 0.5}}), lg::InvalidInput);
  EXPECT_THROW(lg::atomic_measure(Atoms{{{1.0, 0.0}, 1.5}, {{0.0, 1.0}, -0.5}}), lg::InvalidInput);
  EXPECT_THROW(lg::atomic_measure(Atoms{{{1.0, 0.0}, 0.5}, {{1.0, 0.0}, 0.5}}), lg::InvalidInput);
  EXPECT_THROW(lg::atomic_measure(Atoms{{{1.0, 2.0}, 0.5}, {{-1.0, -2.0}, 0.5}}), lg::InvalidInput);
  EXPECT_THROW(lg::atomic_measure(Atoms{{{0.0, 0.0}, 1.0}}), lg::InvalidInput);
  EXPECT_THROW(lg::atomic_measure(Atoms{{{1.0, 0.0}, 0.5}, {{0.0, 1.0, 0.0}, 0.5}}), lg::InvalidInput);
}

TEST(Construction, WeightSumToleranceIs1em12) {
  using Atoms = std::vector<std::pair<std::vector<double>, double>>;
  EXPECT_NO_THROW(lg::atomic_measure(Atoms{{{1.0, 0.0}, 0.5 + 4e-13}, {{0.0, 1.0}, 0.5}}));
  EXPECT_THROW(lg::atomic_measure(Atoms{{{1.0, 0.0}, 0.5 + 5e-12}, {{0.0, 1.0}, 0.5}}), lg::InvalidInput);
}

TEST(Construction, AtomsAreCanonicalisedIntoUpperHalfSpace) {
  const auto m = lg::atomic_measure({{{1.0, -1.0}, 0.5}, {{-2.0, 0.0}, 0.5}});
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Eigen::VectorXd a = m.atom(k);
    const double last = a(1) != 0.0 ? a(1) : a(0);
    EXPECT_GT(last, 0.0);
  }
  Eigen::VectorXd v(2);
  v << 1.0, -1.0;
  EXPECT_LT(m.find(v), m.size());
}

TEST(Builtins, RpwCircleFour) {
  const auto m = lg::rpw_circle(4);
  ASSERT_EQ(m.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    const double th = k * std::numbers::pi / 4.0;
    EXPECT_NEAR(m.atom(k)(0), std::cos(th), 1e-15);
    EXPECT_NEAR(m.atom(k)(1), std::sin(th), 1e-15);
    EXPECT_DOUBLE_EQ(m.weight(k), 0.25);
  }
}

TEST(Builtins, SmallMRejected) {
  EXPECT_THROW(lg::rpw_circle(1), lg::InvalidInput);
  EXPECT_THROW(lg::builtin_measure("rpw_circle", {{"M", 1.0}}), lg::InvalidInput);
  EXPECT_THROW(lg::bargmann_fock(1), lg::InvalidInput);
  EXPECT_THROW(lg::builtin_measure("no_such_family", {}), lg::InvalidInput);
}

TEST(Builtins, ExplicitAtomList) {
  const auto m = lg::atomic_measure({{{1.0, 0.0}, 1.0}});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m.atom(0)(0), 1.0);
  EXPECT_DOUBLE_EQ(m.atom(0)(1), 0.0);
  EXPECT_DOUBLE_EQ(m.weight(0), 1.0);
}

TEST(Builtins, ByNameMatchesDirectConstruction) {
  EXPECT_TRUE(lg::builtin_measure("rpw_circle", {{"M", 16.0}}).equivalent(lg::rpw_circle(16)));
  EXPECT_TRUE(lg::builtin_measure("bargmann_fock", {{"M", 8.0}, {"r_max", 4.0}, {"radial_nodes", 10.0}})
                  .equivalent(lg::bargmann_fock(8, 4.0, 10)));
}

TEST(Builtins, BargmannFockIsIsotropicWithContinuumMoment) {
  const double r_max = 5.0;
  const auto m = lg::bargmann_fock(16, r_max, 16);
  const auto L = lg::second_moments(m).second_moment;
  EXPECT_NEAR(L(0, 1), 0.0, 1e-14);
  EXPECT_NEAR(L(0, 0), L(1, 1), 1e-14);

  // discrete radial second moment
  double c_discrete = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) c_discrete += m.weight(k) * m.atom(k).squaredNorm();
  c_discrete *= 0.5;
  EXPECT_NEAR(L(0, 0), c_discrete, 1e-14);

  // continuous truncated density r exp(-r^2/2) on [0, r_max]
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double num = GK::integrate([](double r) { return r * r * r * std::exp(-0.5 * r * r); }, 0.0, r_max);
  const double den = GK::integrate([](double r) { return r * std::exp(-0.5 * r * r); }, 0.0, r_max);
  const double c_continuum = 0.5 * num / den;
  EXPECT_NEAR(c_discrete, c_continuum, 1e-8);
  EXPECT_NEAR(lg::bargmann_fock_continuum_moment(r_max), c_continuum, 1e-12);
}

TEST(Builtins, DilateScalesSecondMoment) {
  const auto L = lg::second_moments(lg::dilate(lg::rpw_circle(32), 1.5)).second_moment;
  EXPECT_NEAR(L(0, 0), 0.5 * 2.25, 1e-12);
}

TEST(Builtins, AngularJitterKeepsUnitNorms) {
  const auto m = lg::angular_jitter(lg::rpw_circle(32), 0.01, 7);
  ASSERT_EQ(m.size(), 32u);
  for (std::size_t k = 0; k < m.size(); ++k) EXPECT_NEAR(m.atom(k).norm(), 1.0, 1e-14);
  EXPECT_FALSE(m.equivalent(lg::rpw_circle(32)));
}
