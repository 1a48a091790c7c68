#include "levelgauss/field.hpp"

#include <cmath>

#include "levelgauss/error.hpp"
#include "levelgauss/rng.hpp"

namespace levelgauss {

Jet2 GridJet::at(Eigen::Index i, Eigen::Index j) const {
  Jet2 out;
  out.f = f(i, j);
  if (fx.size() != 0) out.grad = Vec2(fx(i, j), fy(i, j));
  if (fxx.size() != 0) out.hess << fxx(i, j), fxy(i, j), fxy(i, j), fyy(i, j);
  return out;
}

GridJet Field2::sample_grid(std::span<const double> xs, std::span<const double> ys,
                            JetOrder order) const {
  const auto nx = static_cast<Eigen::Index>(xs.size());
  const auto ny = static_cast<Eigen::Index>(ys.size());
  GridJet g;
  g.f.resize(nx, ny);
  if (order >= JetOrder::kGradient) {
    g.fx.resize(nx, ny);
    g.fy.resize(nx, ny);
  }
  if (order >= JetOrder::kHessian) {
    g.fxx.resize(nx, ny);
    g.fxy.resize(nx, ny);
    g.fyy.resize(nx, ny);
  }
  for (Eigen::Index j = 0; j < ny; ++j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      const Vec2 p(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]);
      if (order == JetOrder::kValue) {
        g.f(i, j) = value(p);
        continue;
      }
      const Jet2 jt = jet(p);
      g.f(i, j) = jt.f;
      g.fx(i, j) = jt.grad.x();
      g.fy(i, j) = jt.grad.y();
      if (order >= JetOrder::kHessian) {
        g.fxx(i, j) = jt.hess(0, 0);
        g.fxy(i, j) = jt.hess(0, 1);
        g.fyy(i, j) = jt.hess(1, 1);
      }
    }
  }
  return g;
}

double coefficient_draw(std::uint64_t seed, std::size_t k, int slot) {
  return CounterRng(seed).normal(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(slot));
}

SampledField::SampledField(SpectralMeasure measure, Eigen::MatrixXd frequencies,
                           Eigen::VectorXd term_weights, Eigen::VectorXd a, Eigen::VectorXd b,
                           std::uint64_t seed)
    : measure_(std::move(measure)),
      freq_(std::move(frequencies)),
      weights_(std::move(term_weights)),
      a_(std::move(a)),
      b_(std::move(b)),
      seed_(seed) {
  const Eigen::Index n = freq_.cols();
  if (freq_.rows() != measure_.dim())
    throw InvalidInput("sampled field: frequency dimension differs from measure");
  if (weights_.size() != n || a_.size() != n || b_.size() != n)
    throw InvalidInput("sampled field: term counts differ");
  if ((weights_.array() <= 0.0).any())
    throw InvalidInput("sampled field: term weights must be positive");
  amp_cos_ = weights_.array().sqrt() * a_.array();
  amp_sin_ = weights_.array().sqrt() * b_.array();
}

SampledField SampledField::sample(const SpectralMeasure& m, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::VectorXd a(n), b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a(k) = coefficient_draw(seed, static_cast<std::size_t>(k), 0);
    b(k) = coefficient_draw(seed, static_cast<std::size_t>(k), 1);
  }
  return SampledField(m, m.atoms(), m.weights(), std::move(a), std::move(b), seed);
}

SampledField SampledField::with_coefficients(const SpectralMeasure& m, Eigen::VectorXd a,
                                             Eigen::VectorXd b) {
  return SampledField(m, m.atoms(), m.weights(), std::move(a), std::move(b), 0);
}

SampledField SampledField::negated() const {
  return SampledField(measure_, freq_, weights_, -a_, -b_, seed_);
}

JetN SampledField::eval_jet(std::span<const double> x) const {
  const int d = dim();
  if (static_cast<int>(x.size()) != d) throw InvalidInput("eval_jet: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), d);
  JetN out;
  out.grad = Eigen::VectorXd::Zero(d);
  out.hess = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index k = 0; k < freq_.cols(); ++k) {
    const double phase = freq_.col(k).dot(xv);
    const double c = std::cos(phase), s = std::sin(phase);
    const double v = amp_cos_(k) * c + amp_sin_(k) * s;
    const double dv = amp_sin_(k) * c - amp_cos_(k) * s;
    out.f += v;
    out.grad.noalias() += dv * freq_.col(k);
    out.hess.noalias() -= v * (freq_.col(k) * freq_.col(k).transpose());
  }
  return out;
}

void SampledField::require_planar() const {
  if (dim() != 2) throw InvalidInput("planar evaluation requested on a field with d != 2");
}

double SampledField::value(const Vec2& x) const {
  require_planar();
  double f = 0.0;
  for (Eigen::Index k = 0; k < freq_.cols(); ++k) {
    const double phase = freq_(0, k) * x.x() + freq_(1, k) * x.y();
    f += amp_cos_(k) * std::cos(phase) + amp_sin_(k) * std::sin(phase);
  }
  return f;
}

Jet2 SampledField::jet(const Vec2& x) const {
  require_planar();
  Jet2 out;
  double gx = 0.0, gy = 0.0, hxx = 0.0, hxy = 0.0, hyy = 0.0;
  for (Eigen::Index k = 0; k < freq_.cols(); ++k) {
    const double l1 = freq_(0, k), l2 = freq_(1, k);
    const double phase = l1 * x.x() + l2 * x.y();
    const double c = std::cos(phase), s = std::sin(phase);
    const double v = amp_cos_(k) * c + amp_sin_(k) * s;
    const double dv = amp_sin_(k) * c - amp_cos_(k) * s;
    out.f += v;
    gx += l1 * dv;
    gy += l2 * dv;
    hxx -= l1 * l1 * v;
    hxy -= l1 * l2 * v;
    hyy -= l2 * l2 * v;
  }
  out.grad = Vec2(gx, gy);
  out.hess << hxx, hxy, hxy, hyy;
  return out;
}

GridJet SampledField::sample_grid(std::span<const double> xs, std::span<const double> ys,
                                  JetOrder order) const {
  require_planar();
  // cos<l, (x, y)> = cx cy - sx sy and sin<l, (x, y)> = sx cy + cx sy, so
  // every jet component is a product (left over x) * (right over y) with
  // inner dimension 2K. All components share the right factor [Cy; Sy].
  const Eigen::Index K = freq_.cols();
  const auto nx = static_cast<Eigen::Index>(xs.size());
  const auto ny = static_cast<Eigen::Index>(ys.size());

  Eigen::MatrixXd right(2 * K, ny);
  for (Eigen::Index j = 0; j < ny; ++j) {
    const double y = ys[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < K; ++k) {
      const double p = freq_(1, k) * y;
      right(k, j) = std::cos(p);
      right(K + k, j) = std::sin(p);
    }
  }

  const int blocks = order == JetOrder::kValue ? 1 : (order == JetOrder::kGradient ? 3 : 6);
  Eigen::MatrixXd left(2 * K, blocks * nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double x = xs[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < K; ++k) {
      const double p = freq_(0, k) * x;
      const double cx = std::cos(p), sx = std::sin(p);
      const double P = amp_cos_(k) * cx + amp_sin_(k) * sx;
      const double Q = amp_sin_(k) * cx - amp_cos_(k) * sx;
      left(k, i) = P;
      left(K + k, i) = Q;
      if (blocks == 1) continue;
      const double l1 = freq_(0, k), l2 = freq_(1, k);
      left(k, nx + i) = l1 * Q;
      left(K + k, nx + i) = -l1 * P;
      left(k, 2 * nx + i) = l2 * Q;
      left(K + k, 2 * nx + i) = -l2 * P;
      if (blocks == 3) continue;
      left(k, 3 * nx + i) = -l1 * l1 * P;
      left(K + k, 3 * nx + i) = -l1 * l1 * Q;
      left(k, 4 * nx + i) = -l1 * l2 * P;
      left(K + k, 4 * nx + i) = -l1 * l2 * Q;
      left(k, 5 * nx + i) = -l2 * l2 * P;
      left(K + k, 5 * nx + i) = -l2 * l2 * Q;
    }
  }

  Eigen::MatrixXd all(blocks * nx, ny);
  all.noalias() = left.transpose() * right;

  GridJet g;
  g.f = all.middleRows(0, nx);
  if (blocks >= 3) {
    g.fx = all.middleRows(nx, nx);
    g.fy = all.middleRows(2 * nx, nx);
  }
  if (blocks == 6) {
    g.fxx = all.middleRows(3 * nx, nx);
    g.fxy = all.middleRows(4 * nx, nx);
    g.fyy = all.middleRows(5 * nx, nx);
  }
  return g;
}

}  // namespace levelgauss
