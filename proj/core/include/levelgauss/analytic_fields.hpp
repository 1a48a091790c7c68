#pragma once

#include "levelgauss/field.hpp"

namespace levelgauss {

/// f(x) = scale * |x - center|^2.
class QuadraticRadialField final : public Field2 {
 public:
  explicit QuadraticRadialField(double scale = 0.5, Vec2 center = Vec2::Zero())
      : scale_(scale), center_(center) {}

  double value(const Vec2& x) const override { return scale_ * (x - center_).squaredNorm(); }
  Jet2 jet(const Vec2& x) const override {
    Jet2 j;
    j.f = value(x);
    j.grad = 2.0 * scale_ * (x - center_);
    j.hess = 2.0 * scale_ * Mat2::Identity();
    return j;
  }

 private:
  double scale_;
  Vec2 center_;
};

/// f(x) = <u, x> + offset.
class LinearField final : public Field2 {
 public:
  explicit LinearField(Vec2 direction, double offset = 0.0) : u_(direction), offset_(offset) {}

  double value(const Vec2& x) const override { return u_.dot(x) + offset_; }
  Jet2 jet(const Vec2& x) const override {
    Jet2 j;
    j.f = value(x);
    j.grad = u_;
    return j;
  }

 private:
  Vec2 u_;
  double offset_;
};

/// -f for any field.
class NegatedField final : public Field2 {
 public:
  explicit NegatedField(const Field2& inner) : inner_(inner) {}

  double value(const Vec2& x) const override { return -inner_.value(x); }
  Jet2 jet(const Vec2& x) const override {
    Jet2 j = inner_.jet(x);
    j.f = -j.f;
    j.grad = -j.grad;
    j.hess = -j.hess;
    return j;
  }
  GridJet sample_grid(std::span<const double> xs, std::span<const double> ys,
                      JetOrder order) const override {
    GridJet g = inner_.sample_grid(xs, ys, order);
    for (Eigen::MatrixXd* c : {&g.f, &g.fx, &g.fy, &g.fxx, &g.fxy, &g.fyy}) *c = -*c;
    return g;
  }

 private:
  const Field2& inner_;
};

}  // namespace levelgauss
