#include "levelgauss/levelset.hpp"

#include <cmath>

#include "levelgauss/error.hpp"
#include "levelgauss/stats.hpp"
#include "quadrature_detail.hpp"

namespace levelgauss {

std::optional<double> curvature(const Jet2& jet) {
  const double g2 = jet.grad.squaredNorm();
  const double g = std::sqrt(g2);
  if (!(g >= kGradientFloor)) return std::nullopt;
  const double num = g2 * jet.hess.trace() - jet.grad.dot(jet.hess * jet.grad);
  return num / (g2 * g);
}

CurvatureSample curvature_at(const Field2& field, const Vec2& x) {
  const Jet2 j = field.jet(x);
  return {x, curvature(j), j.grad.norm()};
}

namespace {

Vec2 crossing(const Vec2& p0, double v0, const Vec2& p1, double v1, double level) {
  const double t = (level - v0) / (v1 - v0);
  return p0 + t * (p1 - p0);
}

}  // namespace

std::vector<Segment> level_segments(const Field2& field, const Rect& rect, int nx, int ny,
                                    double level) {
  if (nx < 2 || ny < 2) throw InvalidInput("level_segments: need at least 2 nodes per axis");
  const std::vector<double> xs = linspace(rect.x0, rect.x1, nx);
  const std::vector<double> ys = linspace(rect.y0, rect.y1, ny);
  const Eigen::MatrixXd v = field.sample_grid(xs, ys, JetOrder::kValue).f;

  std::vector<Segment> out;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      // Corners counter-clockwise from bottom-left; edges e0..e3 are
      // bottom, right, top, left.
      const std::array<Vec2, 4> p = {Vec2(xs[i], ys[j]), Vec2(xs[i + 1], ys[j]),
                                     Vec2(xs[i + 1], ys[j + 1]), Vec2(xs[i], ys[j + 1])};
      const std::array<double, 4> f = {v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)};
      int code = 0;
      for (int c = 0; c < 4; ++c)
        if (f[static_cast<std::size_t>(c)] > level) code |= 1 << c;
      if (code == 0 || code == 15) continue;

      auto edge = [&](int e) {
        const auto a = static_cast<std::size_t>(e), b = static_cast<std::size_t>((e + 1) % 4);
        return crossing(p[a], f[a], p[b], f[b], level);
      };
      auto add = [&](int e0, int e1) { out.push_back({edge(e0), edge(e1)}); };

      switch (code) {
        case 1: case 14: add(3, 0); break;
        case 2: case 13: add(0, 1); break;
        case 3: case 12: add(3, 1); break;
        case 4: case 11: add(1, 2); break;
        case 6: case 9: add(0, 2); break;
        case 7: case 8: add(3, 2); break;
        case 5: case 10: {
          const Vec2 centre = 0.5 * (p[0] + p[2]);
          const bool centre_in = field.value(centre) > level;
          // Inside corners are joined through the centre when it is inside.
          const bool join_02 = (code == 5) == centre_in;
          if (join_02) {
            add(0, 1);
            add(2, 3);
          } else {
            add(3, 0);
            add(1, 2);
          }
          break;
        }
        default: break;
      }
    }
  }
  return out;
}

LevelSetMeasure level_length(const Field2& field, const Rect& rect, int nx, int ny, double level) {
  const std::vector<Segment> segs = level_segments(field, rect, nx, ny, level);
  std::vector<double> lengths(segs.size());
  for (std::size_t k = 0; k < segs.size(); ++k) lengths[k] = segs[k].length();
  return {level, pairwise_sum(lengths), segs.size(), nx};
}

LevelSetMeasure level_length(const Field2& field, const Domain& dom, double level) {
  dom.validate();
  return level_length(field, Rect::of(dom), dom.grid_n, dom.grid_n, level);
}

namespace {

auto band_region(double a, double b) {
  return [a, b](const detail::Values<1>& v) { return int(v[0] >= a) | (int(v[0] <= b) << 1); };
}

}  // namespace

BulkIntegral bulk_curvature_integral(const Field2& field, const Domain& dom, double a, double b,
                                     const QuadraturePolicy& policy) {
  if (!(a < b)) throw InvalidInput("bulk_curvature_integral: need a < b");
  const double cap = policy.kappa_cap;
  auto g = [a, b, cap](const detail::Jets<1>& j, bool capped) {
    const double f = j[0].f;
    if (f < a || f > b) return std::array<double, 1>{0.0};
    return std::array<double, 1>{detail::capped_kappa(j[0], capped, cap)};
  };
  detail::CellIntegrator<1, 1, decltype(g), decltype(band_region(a, b))> integ(
      {&field}, policy, g, band_region(a, b));
  const auto r = integ.run(dom);
  return {r.value[0], r.near_critical_volume, r.refined_cells};
}

BoundaryFlux boundary_flux(const Field2& field, const Domain& dom, double a, double b,
                           const QuadraturePolicy& policy, std::uint64_t jitter_key) {
  if (!(a < b)) throw InvalidInput("boundary_flux: need a < b");
  auto g = [a, b](const detail::Jets<1>& j, const Vec2& eta) {
    const double f = j[0].f;
    if (f < a || f > b) return std::array<double, 1>{0.0};
    return std::array<double, 1>{j[0].grad.dot(eta) / j[0].grad.norm()};
  };
  detail::BoundaryIntegrator<1, 1, decltype(g), decltype(band_region(a, b))> integ(
      {&field}, policy, jitter_key, g, band_region(a, b));
  const auto r = integ.run(dom);
  return {r.value[0], r.jittered, r.flagged};
}

IdentityReport identity_report(const Field2& field, const Domain& dom, double a, double b,
                               const QuadraturePolicy& policy, std::uint64_t jitter_key) {
  if (!(a < b)) throw InvalidInput("identity_report: need a < b");
  dom.validate();
  IdentityReport rep;
  rep.level_a = a;
  rep.level_b = b;
  rep.grid_n = dom.grid_n;
  rep.measure_a = std::isfinite(a) ? level_length(field, dom, a).length : 0.0;
  rep.measure_b = std::isfinite(b) ? level_length(field, dom, b).length : 0.0;
  const BulkIntegral bulk = bulk_curvature_integral(field, dom, a, b, policy);
  const BoundaryFlux flux = boundary_flux(field, dom, a, b, policy, jitter_key);
  rep.bulk_integral = bulk.value;
  rep.near_critical_volume = bulk.near_critical_volume;
  rep.boundary_flux = flux.value;
  rep.boundary_flags = flux.flagged_nodes;
  rep.residual = (rep.measure_b - rep.measure_a) - rep.bulk_integral + rep.boundary_flux;
  return rep;
}

std::vector<std::pair<double, double>> level_continuity_scan(const Field2& field,
                                                              const Domain& dom, double a,
                                                              std::span<const double> deltas) {
  dom.validate();
  const double base = level_length(field, dom, a).length;
  std::vector<std::pair<double, double>> out;
  out.reserve(deltas.size());
  for (double d : deltas)
    out.emplace_back(d, std::abs(level_length(field, dom, a + d).length - base));
  return out;
}

}  // namespace levelgauss
