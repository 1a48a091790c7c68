#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "levelgauss/levelset.hpp"

namespace levelgauss {

namespace {

constexpr int kNewtonIterations = 50;
constexpr double kGradientTol = 1e-10;
constexpr double kMergeDistance = 1e-7;

double det_ratio(const Mat2& h) {
  const double n2 = h.squaredNorm();
  return n2 > 0.0 ? std::abs(h.determinant()) / n2 : 0.0;
}

}  // namespace

std::vector<CriticalPoint> critical_points(const Field2& field, const Domain& dom) {
  dom.validate();
  const std::vector<double> xs = dom.nodes();
  const GridJet g = field.sample_grid(xs, xs, JetOrder::kGradient);
  const double h = dom.spacing();
  const int n = dom.grid_n;

  std::vector<CriticalPoint> out;
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const double gx[4] = {g.fx(i, j), g.fx(i + 1, j), g.fx(i, j + 1), g.fx(i + 1, j + 1)};
      const double gy[4] = {g.fy(i, j), g.fy(i + 1, j), g.fy(i, j + 1), g.fy(i + 1, j + 1)};
      const auto [xlo, xhi] = std::minmax_element(gx, gx + 4);
      const auto [ylo, yhi] = std::minmax_element(gy, gy + 4);
      if (*xlo > 0.0 || *xhi < 0.0 || *ylo > 0.0 || *yhi < 0.0) continue;

      Vec2 x(xs[i] + 0.5 * h, xs[j] + 0.5 * h);
      Jet2 jet = field.jet(x);
      for (int it = 0; it < kNewtonIterations && jet.grad.norm() > kGradientTol; ++it) {
        x -= jet.hess.completeOrthogonalDecomposition().solve(jet.grad);
        jet = field.jet(x);
      }
      if (!(jet.grad.norm() <= kGradientTol)) continue;
      // Keep the root only if it belongs to this cell (half-open) and lies
      // inside the open domain.
      if (x.x() < xs[i] || x.x() >= xs[i + 1] || x.y() < xs[j] || x.y() >= xs[j + 1]) continue;
      if (std::abs(x.x()) >= dom.R || std::abs(x.y()) >= dom.R) continue;
      const bool seen = std::any_of(out.begin(), out.end(), [&](const CriticalPoint& c) {
        return (c.point - x).norm() < kMergeDistance;
      });
      if (!seen) out.push_back({x, jet.hess.determinant()});
    }
  return out;
}

MorseCheck morse_check(const Field2& field, const Domain& dom, double tol) {
  MorseCheck r;
  r.min_abs_det = std::numeric_limits<double>::infinity();
  for (const auto& c : critical_points(field, dom)) {
    const double ratio = det_ratio(field.jet(c.point).hess);
    ++r.critical_points;
    r.degenerate += ratio <= tol;
    r.min_abs_det = std::min(r.min_abs_det, ratio);
  }
  return r;
}

}  // namespace levelgauss
