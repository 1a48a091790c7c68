#include "levelgauss/coupling.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "levelgauss/error.hpp"
#include "levelgauss/stats.hpp"

namespace levelgauss {

CoupledPair couple(const SpectralMeasure& m1, const SpectralMeasure& m2, const CouplingPlan& plan,
                   std::uint64_t seed) {
  if (m1.dim() != m2.dim()) throw InvalidInput("couple: measures differ in dimension");
  validate_plan(plan, m1, m2, 1e-10);
  const auto n = static_cast<Eigen::Index>(plan.pairs.size());
  Eigen::MatrixXd s(m1.dim(), n), t(m2.dim(), n);
  Eigen::VectorXd w(n), a(n), b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const PlanPair& p = plan.pairs[static_cast<std::size_t>(k)];
    s.col(k) = p.s;
    t.col(k) = p.t;
    w(k) = p.w;
    a(k) = coefficient_draw(seed, static_cast<std::size_t>(k), 0);
    b(k) = coefficient_draw(seed, static_cast<std::size_t>(k), 1);
  }
  return CoupledPair{SampledField(m1, std::move(s), w, a, b, seed),
                     SampledField(m2, std::move(t), w, a, b, seed), plan.pairs};
}

double correlation_at(const CoupledPair& cp, const Vec2& x) {
  std::vector<double> terms(cp.pairing.size());
  for (std::size_t k = 0; k < cp.pairing.size(); ++k) {
    const PlanPair& p = cp.pairing[k];
    if (p.s.size() != 2) throw InvalidInput("correlation_at: planar pairs expected");
    const Eigen::VectorXd delta = p.s - p.t;
    terms[k] = p.w * std::cos(delta(0) * x.x() + delta(1) * x.y());
  }
  return pairwise_sum(terms);
}

namespace {

constexpr std::array<std::array<int, 2>, 6> kAlphas = {
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

double monomial(const Eigen::VectorXd& v, int ax, int ay) {
  return std::pow(v(0), ax) * std::pow(v(1), ay);
}

std::vector<double> diagnostic_axis(const Domain& dom, double grid_spacing) {
  if (!(grid_spacing > 0.0)) throw InvalidInput("diagnostics: grid spacing must be positive");
  const int n = static_cast<int>(std::ceil(2.0 * dom.R / grid_spacing - 1e-9)) + 1;
  return linspace(-dom.R, dom.R, std::max(n, 2));
}

}  // namespace

double difference_variance(const std::vector<PlanPair>& pairing, int alpha_x, int alpha_y,
                           const Vec2& x) {
  // d^alpha e^{i<l,x>} = i^{|alpha|} l^alpha e^{i<l,x>}, so the cos/sin pair
  // of each term contributes |s^a e^{i<s,x>} - t^a e^{i<t,x>}|^2.
  std::vector<double> terms(pairing.size());
  for (std::size_t k = 0; k < pairing.size(); ++k) {
    const PlanPair& p = pairing[k];
    const double sa = monomial(p.s, alpha_x, alpha_y);
    const double ta = monomial(p.t, alpha_x, alpha_y);
    const Eigen::VectorXd delta = p.s - p.t;
    const double c = std::cos(delta(0) * x.x() + delta(1) * x.y());
    terms[k] = p.w * (sa * sa + ta * ta - 2.0 * sa * ta * c);
  }
  return std::max(0.0, pairwise_sum(terms));
}

double sigma_D(const std::vector<PlanPair>& pairing, const Domain& dom, double grid_spacing) {
  for (const PlanPair& p : pairing)
    if (p.s.size() != 2 || p.t.size() != 2)
      throw InvalidInput("diagnostics: planar pairs expected");
  const std::vector<double> axis = diagnostic_axis(dom, grid_spacing);
  const auto n = static_cast<Eigen::Index>(axis.size());
  const auto K = static_cast<Eigen::Index>(pairing.size());

  Eigen::MatrixXd right(2 * K, n);
  for (Eigen::Index k = 0; k < K; ++k) {
    const PlanPair& p = pairing[static_cast<std::size_t>(k)];
    const double dy = p.s(1) - p.t(1);
    for (Eigen::Index j = 0; j < n; ++j) {
      right(k, j) = std::cos(dy * axis[static_cast<std::size_t>(j)]);
      right(K + k, j) = std::sin(dy * axis[static_cast<std::size_t>(j)]);
    }
  }

  double sup = 0.0;
  Eigen::MatrixXd left(2 * K, n);
  for (const auto& alpha : kAlphas) {
    double constant = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      const PlanPair& p = pairing[static_cast<std::size_t>(k)];
      const double sa = monomial(p.s, alpha[0], alpha[1]);
      const double ta = monomial(p.t, alpha[0], alpha[1]);
      constant += p.w * (sa * sa + ta * ta);
      const double cross = 2.0 * p.w * sa * ta;
      const double dx = p.s(0) - p.t(0);
      for (Eigen::Index i = 0; i < n; ++i) {
        left(k, i) = cross * std::cos(dx * axis[static_cast<std::size_t>(i)]);
        left(K + k, i) = -cross * std::sin(dx * axis[static_cast<std::size_t>(i)]);
      }
    }
    const Eigen::MatrixXd var = (constant - (left.transpose() * right).array()).matrix();
    sup = std::max(sup, var.maxCoeff());
  }
  return std::sqrt(std::max(0.0, sup));
}

CouplingDiagnostics diagnostics(const CoupledPair& cp, const Domain& dom, double grid_spacing) {
  if (cp.field1.dim() != 2) throw InvalidInput("diagnostics: planar fields expected");
  CouplingDiagnostics out;
  out.grid_spacing = grid_spacing;
  out.sigma_D = sigma_D(cp.pairing, dom, grid_spacing);

  const std::vector<double> axis = diagnostic_axis(dom, grid_spacing);
  const GridJet g1 = cp.field1.sample_grid(axis, axis, JetOrder::kHessian);
  const GridJet g2 = cp.field2.sample_grid(axis, axis, JetOrder::kHessian);
  double beta = 0.0;
  beta = std::max(beta, (g1.f - g2.f).cwiseAbs().maxCoeff());
  beta = std::max(beta, (g1.fx - g2.fx).cwiseAbs().maxCoeff());
  beta = std::max(beta, (g1.fy - g2.fy).cwiseAbs().maxCoeff());
  beta = std::max(beta, (g1.fxx - g2.fxx).cwiseAbs().maxCoeff());
  beta = std::max(beta, (g1.fxy - g2.fxy).cwiseAbs().maxCoeff());
  beta = std::max(beta, (g1.fyy - g2.fyy).cwiseAbs().maxCoeff());
  out.beta = beta;
  return out;
}

}  // namespace levelgauss
