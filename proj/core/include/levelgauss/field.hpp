#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "levelgauss/spectral_measure.hpp"

namespace levelgauss {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Value, gradient and Hessian at one point of a planar field.
struct Jet2 {
  double f = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};

/// Same for arbitrary dimension.
struct JetN {
  double f = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

enum class JetOrder { kValue = 0, kGradient = 1, kHessian = 2 };

/// Field values on the tensor grid xs x ys. Entry (i, j) is the point
/// (xs[i], ys[j]). Components above the requested order are left empty.
struct GridJet {
  Eigen::MatrixXd f, fx, fy, fxx, fxy, fyy;

  Eigen::Index nx() const { return f.rows(); }
  Eigen::Index ny() const { return f.cols(); }
  Jet2 at(Eigen::Index i, Eigen::Index j) const;
};

/// A C^2 scalar field on the plane that can be evaluated exactly (up to
/// rounding) at any point. Implementations are immutable.
class Field2 {
 public:
  virtual ~Field2() = default;

  virtual double value(const Vec2& x) const = 0;
  virtual Jet2 jet(const Vec2& x) const = 0;

  /// Pointwise by default; spectral fields override with a tensor-product
  /// evaluation.
  virtual GridJet sample_grid(std::span<const double> xs, std::span<const double> ys,
                              JetOrder order) const;
};

/// f(x) = sum_k sqrt(w_k) (a_k cos<lambda_k, x> + b_k sin<lambda_k, x>).
///
/// `measure` is the law the field is drawn from. The term list is usually
/// the measure's atoms, but a coupled field may split one atom over several
/// terms (then the per-term weights add up to the atom weight).
class SampledField final : public Field2 {
 public:
  SampledField(SpectralMeasure measure, Eigen::MatrixXd frequencies, Eigen::VectorXd term_weights,
               Eigen::VectorXd a, Eigen::VectorXd b, std::uint64_t seed);

  /// Coefficients (a_k, b_k) drawn i.i.d. N(0,1) from a counter RNG keyed
  /// by (seed, k, slot). Same seed gives a bit-identical field.
  static SampledField sample(const SpectralMeasure& m, std::uint64_t seed);

  /// Field with explicit coefficients, one pair per atom of `m`.
  static SampledField with_coefficients(const SpectralMeasure& m, Eigen::VectorXd a,
                                        Eigen::VectorXd b);

  const SpectralMeasure& measure() const noexcept { return measure_; }
  const Eigen::MatrixXd& frequencies() const noexcept { return freq_; }
  const Eigen::VectorXd& term_weights() const noexcept { return weights_; }
  const Eigen::VectorXd& coeff_a() const noexcept { return a_; }
  const Eigen::VectorXd& coeff_b() const noexcept { return b_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int dim() const noexcept { return measure_.dim(); }

  /// The field -f (coefficients negated).
  SampledField negated() const;

  JetN eval_jet(std::span<const double> x) const;

  double value(const Vec2& x) const override;
  Jet2 jet(const Vec2& x) const override;
  GridJet sample_grid(std::span<const double> xs, std::span<const double> ys,
                      JetOrder order) const override;

 private:
  void require_planar() const;

  SpectralMeasure measure_;
  Eigen::MatrixXd freq_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd a_, b_;
  Eigen::VectorXd amp_cos_, amp_sin_;  // sqrt(w) * a, sqrt(w) * b
  std::uint64_t seed_ = 0;
};

/// Draws the standard normal coefficient for (term k, slot 0 = cos / 1 = sin).
double coefficient_draw(std::uint64_t seed, std::size_t k, int slot);

}  // namespace levelgauss
