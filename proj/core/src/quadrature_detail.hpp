#pragma once

// Cell and boundary quadrature engines shared by the single-field identity
// terms and the coupled-pair decomposition. Not installed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "levelgauss/domain.hpp"
#include "levelgauss/field.hpp"
#include "levelgauss/levelset.hpp"
#include "levelgauss/rng.hpp"
#include "levelgauss/stats.hpp"

namespace levelgauss::detail {

template <std::size_t F>
using Fields = std::array<const Field2*, F>;
template <std::size_t F>
using Jets = std::array<Jet2, F>;
template <std::size_t F>
using Values = std::array<double, F>;

template <std::size_t M>
struct CellResult {
  std::array<double, M> value{};
  double near_critical_volume = 0.0;
  std::size_t refined_cells = 0;
};

template <std::size_t M>
struct BoundaryResult {
  std::array<double, M> value{};
  std::size_t jittered = 0;
  std::size_t flagged = 0;
};

inline bool near_critical(const std::array<Jet2, 4>& corners, double diag, double factor) {
  double min_grad = corners[0].grad.norm();
  double max_hess = corners[0].hess.norm();
  for (std::size_t c = 1; c < 4; ++c) {
    min_grad = std::min(min_grad, corners[c].grad.norm());
    max_hess = std::max(max_hess, corners[c].hess.norm());
  }
  return min_grad < kGradientFloor || min_grad < factor * diag * max_hess;
}

template <std::size_t F>
Jets<F> jets_at(const Fields<F>& fields, const Vec2& p) {
  Jets<F> out;
  for (std::size_t k = 0; k < F; ++k) out[k] = fields[k]->jet(p);
  return out;
}

template <std::size_t F>
Values<F> values_at(const Fields<F>& fields, const Vec2& p) {
  Values<F> out;
  for (std::size_t k = 0; k < F; ++k) out[k] = fields[k]->value(p);
  return out;
}

template <std::size_t M>
void accumulate(std::array<std::vector<double>, M>& sink, const std::array<double, M>& v,
                double scale) {
  for (std::size_t m = 0; m < M; ++m) sink[m].push_back(v[m] * scale);
}

template <std::size_t M>
std::array<double, M> reduce(const std::array<std::vector<double>, M>& parts) {
  std::array<double, M> out{};
  for (std::size_t m = 0; m < M; ++m) out[m] = pairwise_sum(parts[m]);
  return out;
}

/// Integrand: (const Jets<F>&, bool capped) -> std::array<double, M>.
/// Region: (const Values<F>&) -> int, the band-membership signature.
template <std::size_t F, std::size_t M, class Integrand, class Region>
class CellIntegrator {
 public:
  CellIntegrator(const Fields<F>& fields, const QuadraturePolicy& policy, Integrand g, Region region)
      : fields_(fields), policy_(policy), g_(std::move(g)), region_(std::move(region)) {}

  CellResult<M> run(const Domain& dom) {
    dom.validate();
    const std::vector<double> xs = dom.nodes();
    const std::vector<double> cs = dom.cell_centers();
    const double h = dom.spacing();
    const double area = h * h;
    const double diag = std::sqrt(2.0) * h;

    std::array<GridJet, F> node, centre;
    for (std::size_t k = 0; k < F; ++k) {
      node[k] = fields_[k]->sample_grid(xs, xs, JetOrder::kHessian);
      centre[k] = fields_[k]->sample_grid(cs, cs, JetOrder::kHessian);
    }

    const auto ncell = static_cast<Eigen::Index>(cs.size());
    std::array<std::vector<double>, M> rows;
    for (Eigen::Index j = 0; j < ncell; ++j) {
      std::array<std::vector<double>, M> cells;
      for (auto& c : cells) c.reserve(static_cast<std::size_t>(ncell));
      for (Eigen::Index i = 0; i < ncell; ++i) {
        bool near = false;
        for (std::size_t k = 0; k < F && !near; ++k) {
          const std::array<Jet2, 4> corners = {node[k].at(i, j), node[k].at(i + 1, j),
                                               node[k].at(i + 1, j + 1), node[k].at(i, j + 1)};
          near = near_critical(corners, diag, policy_.threshold_factor);
        }
        const double x0 = xs[static_cast<std::size_t>(i)], x1 = xs[static_cast<std::size_t>(i + 1)];
        const double y0 = xs[static_cast<std::size_t>(j)], y1 = xs[static_cast<std::size_t>(j + 1)];
        if (near) {
          ++result_.refined_cells;
          accumulate(cells, refine(x0, x1, y0, y1, 1), 1.0);
          continue;
        }
        Jets<F> mid;
        Values<F> fm;
        for (std::size_t k = 0; k < F; ++k) {
          mid[k] = centre[k].at(i, j);
          fm[k] = mid[k].f;
        }
        if (policy_.edge_subdivisions > 1 && cut(node, i, j, fm)) {
          accumulate(cells, supersample(x0, x1, y0, y1), 1.0);
        } else {
          accumulate(cells, g_(mid, false), area);
        }
      }
      const auto row = reduce(cells);
      for (std::size_t m = 0; m < M; ++m) rows[m].push_back(row[m]);
    }
    result_.value = reduce(rows);
    result_.near_critical_volume = pairwise_sum(near_volume_);
    return result_;
  }

 private:
  bool cut(const std::array<GridJet, F>& node, Eigen::Index i, Eigen::Index j,
           const Values<F>& centre_values) const {
    const int key = region_(centre_values);
    const std::array<std::pair<Eigen::Index, Eigen::Index>, 4> idx = {
        {{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
    for (auto [a, b] : idx) {
      Values<F> v;
      for (std::size_t k = 0; k < F; ++k) v[k] = node[k].f(a, b);
      if (region_(v) != key) return true;
    }
    return false;
  }

  std::array<double, M> supersample(double x0, double x1, double y0, double y1) const {
    const int s = policy_.edge_subdivisions;
    const double dx = (x1 - x0) / s, dy = (y1 - y0) / s;
    std::array<double, M> sum{};
    for (int b = 0; b < s; ++b)
      for (int a = 0; a < s; ++a) {
        const Vec2 p(x0 + (a + 0.5) * dx, y0 + (b + 0.5) * dy);
        const auto v = g_(jets_at(fields_, p), false);
        for (std::size_t m = 0; m < M; ++m) sum[m] += v[m] * dx * dy;
      }
    return sum;
  }

  // Quarter [x0,x1]x[y0,y1]; children are at `depth`.
  std::array<double, M> refine(double x0, double x1, double y0, double y1, int depth) {
    const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
    const std::array<std::array<double, 4>, 4> kids = {
        {{x0, xm, y0, ym}, {xm, x1, y0, ym}, {x0, xm, ym, y1}, {xm, x1, ym, y1}}};
    std::array<double, M> sum{};
    for (const auto& c : kids) {
      const double cx0 = c[0], cx1 = c[1], cy0 = c[2], cy1 = c[3];
      const double diag = std::hypot(cx1 - cx0, cy1 - cy0);
      const double area = (cx1 - cx0) * (cy1 - cy0);
      bool near = false;
      for (std::size_t k = 0; k < F && !near; ++k) {
        const std::array<Jet2, 4> corners = {
            fields_[k]->jet(Vec2(cx0, cy0)), fields_[k]->jet(Vec2(cx1, cy0)),
            fields_[k]->jet(Vec2(cx1, cy1)), fields_[k]->jet(Vec2(cx0, cy1))};
        near = near_critical(corners, diag, policy_.threshold_factor);
      }
      std::array<double, M> v;
      if (near && depth < policy_.max_depth) {
        v = refine(cx0, cx1, cy0, cy1, depth + 1);
      } else {
        const auto g = g_(jets_at(fields_, Vec2(0.5 * (cx0 + cx1), 0.5 * (cy0 + cy1))), near);
        for (std::size_t m = 0; m < M; ++m) v[m] = g[m] * area;
        if (near) near_volume_.push_back(area);
      }
      for (std::size_t m = 0; m < M; ++m) sum[m] += v[m];
    }
    return sum;
  }

  Fields<F> fields_;
  QuadraturePolicy policy_;
  Integrand g_;
  Region region_;
  CellResult<M> result_;
  std::vector<double> near_volume_;
};

/// Integrand: (const Jets<F>&, const Vec2& eta) -> std::array<double, M>;
/// every jet handed to it has |grad f| >= kGradientFloor.
template <std::size_t F, std::size_t M, class Integrand, class Region>
class BoundaryIntegrator {
 public:
  BoundaryIntegrator(const Fields<F>& fields, const QuadraturePolicy& policy, std::uint64_t key,
                     Integrand g, Region region)
      : fields_(fields), policy_(policy), rng_(key), g_(std::move(g)), region_(std::move(region)) {}

  BoundaryResult<M> run(const Domain& dom) {
    dom.validate();
    const double R = dom.R;
    const int n = dom.grid_n;
    const double w = 2.0 * R / n;
    std::array<std::vector<double>, M> parts;
    // right, top, left, bottom
    const std::array<Vec2, 4> normals = {Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0), Vec2(0, -1)};
    for (int face = 0; face < 4; ++face) {
      face_ = face;
      R_ = R;
      eta_ = normals[static_cast<std::size_t>(face)];
      for (int p = 0; p < n; ++p) {
        const double u0 = -R + p * w;
        const double u1 = (p + 1 == n) ? R : -R + (p + 1) * w;
        std::array<double, M> v;
        if (policy_.boundary_crossing_split) {
          v = panel(u0, u1, key(u0), key(u1), 0);
        } else {
          v = midpoint(u0, u1);
        }
        for (std::size_t m = 0; m < M; ++m) parts[m].push_back(v[m]);
      }
    }
    result_.value = reduce(parts);
    return result_;
  }

 private:
  Vec2 point(double u) const {
    switch (face_) {
      case 0: return {R_, u};
      case 1: return {u, R_};
      case 2: return {-R_, u};
      default: return {u, -R_};
    }
  }

  int key(double u) const { return region_(values_at(fields_, point(u))); }

  std::array<double, M> midpoint(double u0, double u1) {
    const double len = u1 - u0;
    double u = 0.5 * (u0 + u1);
    Jets<F> j = jets_at(fields_, point(u));
    if (critical(j)) {
      ++result_.jittered;
      const std::uint64_t counter = jitter_counter_++;
      u += (rng_.uniform(static_cast<std::uint64_t>(face_), counter) - 0.5) * 0.5 * len;
      j = jets_at(fields_, point(u));
      if (critical(j)) {
        ++result_.flagged;
        return {};
      }
    }
    auto v = g_(j, eta_);
    for (auto& x : v) x *= len;
    return v;
  }

  static bool critical(const Jets<F>& j) {
    for (const Jet2& x : j)
      if (x.grad.norm() < kGradientFloor) return true;
    return false;
  }

  std::array<double, M> panel(double u0, double u1, int k0, int k1, int depth) {
    const double um = 0.5 * (u0 + u1);
    if (depth > 12) return midpoint(u0, u1);
    const int km = key(um);
    if (k0 == k1 && km == k0) return midpoint(u0, u1);
    std::array<double, M> a, b;
    if (k0 != k1) {
      double lo = u0, hi = u1;
      for (int it = 0; it < 60 && hi - lo > 1e-14 * (1.0 + R_); ++it) {
        const double m = 0.5 * (lo + hi);
        if (key(m) == k0) lo = m; else hi = m;
      }
      a = panel(u0, lo, k0, k0, depth + 1);
      b = panel(hi, u1, key(hi), k1, depth + 1);
    } else {
      a = panel(u0, um, k0, km, depth + 1);
      b = panel(um, u1, km, k1, depth + 1);
    }
    for (std::size_t m = 0; m < M; ++m) a[m] += b[m];
    return a;
  }

  Fields<F> fields_;
  QuadraturePolicy policy_;
  CounterRng rng_;
  Integrand g_;
  Region region_;
  BoundaryResult<M> result_;
  int face_ = 0;
  double R_ = 1.0;
  Vec2 eta_ = Vec2::Zero();
  std::uint64_t jitter_counter_ = 0;
};

inline double capped_kappa(const Jet2& j, bool capped, double cap) {
  const auto k = curvature(j);
  if (!k) return 0.0;
  return capped ? std::clamp(*k, -cap, cap) : *k;
}

}  // namespace levelgauss::detail
