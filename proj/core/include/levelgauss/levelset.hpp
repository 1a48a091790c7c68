#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "levelgauss/coupling.hpp"
#include "levelgauss/domain.hpp"
#include "levelgauss/field.hpp"

namespace levelgauss {

/// Below this gradient norm the unit normal (and so kappa) is undefined.
inline constexpr double kGradientFloor = 1e-12;

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;

  static Rect of(const Domain& dom) { return {-dom.R, dom.R, -dom.R, dom.R}; }
  double area() const { return (x1 - x0) * (y1 - y0); }
};

struct Segment {
  Vec2 p, q;
  double length() const { return (q - p).norm(); }
};

struct LevelSetMeasure {
  double level = 0.0;
  double length = 0.0;  // H^1 of f^{-1}(level) inside the domain
  std::size_t segment_count = 0;
  int grid_n = 0;
};

struct CurvatureSample {
  Vec2 point = Vec2::Zero();
  std::optional<double> kappa;  // empty at (numerically) critical points
  double grad_norm = 0.0;
};

/// Policy for the singular part of the bulk quadrature. A cell is treated
/// as near-critical when the smallest corner gradient norm is below
/// threshold_factor * cell diagonal * largest corner Hessian norm, i.e. when
/// a first-order Taylor bound cannot exclude a critical point inside it.
/// Such cells are quartered up to max_depth times; leaves that are still
/// near-critical use kappa clamped to +-kappa_cap and their area is reported
/// as near_critical_volume.
struct QuadraturePolicy {
  double threshold_factor = 1.0;
  int max_depth = 6;
  double kappa_cap = 1e4;
  /// Cells whose corners and centre disagree about band membership are
  /// integrated with an edge_subdivisions^2 midpoint rule.
  int edge_subdivisions = 4;
  /// Boundary panels whose end points disagree about band membership are
  /// split at the level crossings (located by bisection).
  bool boundary_crossing_split = true;
};

/// kappa = div(grad f / |grad f|) = (|g|^2 tr H - g^T H g) / |g|^3. This is
/// the divergence itself, i.e. (d - 1) times the mean curvature.
std::optional<double> curvature(const Jet2& jet);

CurvatureSample curvature_at(const Field2& field, const Vec2& x);

struct CriticalPoint {
  Vec2 point = Vec2::Zero();
  double hessian_det = 0.0;
};

/// Critical points in the open domain, found by Newton iteration started in
/// every grid cell where both gradient components change sign. Points closer
/// than 1e-7 are merged.
std::vector<CriticalPoint> critical_points(const Field2& field, const Domain& dom);

struct MorseCheck {
  std::size_t critical_points = 0;
  std::size_t degenerate = 0;
  double min_abs_det = 0.0;  // smallest |det H| / |H|^2 over critical points
};

/// Empirical Morse test: a critical point is degenerate when
/// |det H| <= tol * |H|_F^2 (or H vanishes).
MorseCheck morse_check(const Field2& field, const Domain& dom, double tol = 1e-8);

/// Marching squares with linear edge interpolation; saddle cells are
/// resolved with the exact field value at the cell centre. A node counts as
/// inside when f > level.
std::vector<Segment> level_segments(const Field2& field, const Rect& rect, int nx, int ny,
                                    double level);

LevelSetMeasure level_length(const Field2& field, const Domain& dom, double level);
LevelSetMeasure level_length(const Field2& field, const Rect& rect, int nx, int ny, double level);

struct BulkIntegral {
  double value = 0.0;
  double near_critical_volume = 0.0;
  std::size_t refined_cells = 0;
};

/// Midpoint cell quadrature of kappa * 1{a <= f <= b} over the domain's
/// grid_n - 1 cells per axis. Pass a = -infinity for the one-sided set
/// {f <= b}.
BulkIntegral bulk_curvature_integral(const Field2& field, const Domain& dom, double a, double b,
                                     const QuadraturePolicy& policy = {});

struct BoundaryFlux {
  double value = 0.0;
  std::size_t jittered_nodes = 0;
  std::size_t flagged_nodes = 0;  // still critical after jitter; contributed 0
};

/// Composite midpoint rule with grid_n panels per face of
/// <grad f / |grad f|, eta> * 1{a <= f <= b}, eta the outward face normal.
/// Nodes with |grad f| < kGradientFloor are moved by a deterministic jitter
/// derived from `jitter_key`; nodes that stay critical are flagged.
BoundaryFlux boundary_flux(const Field2& field, const Domain& dom, double a, double b,
                           const QuadraturePolicy& policy = {}, std::uint64_t jitter_key = 0);

struct IdentityReport {
  double level_a = 0.0, level_b = 0.0;
  double measure_a = 0.0, measure_b = 0.0;
  double bulk_integral = 0.0;
  double boundary_flux = 0.0;
  /// (measure_b - measure_a) - bulk_integral + boundary_flux
  double residual = 0.0;
  double near_critical_volume = 0.0;
  int grid_n = 0;
  std::size_t boundary_flags = 0;

  double normalized_residual() const {
    return std::abs(residual) / (1.0 + std::abs(measure_b - measure_a));
  }
};

/// All four terms of the divergence identity for one field. Throws
/// InvalidInput unless a < b.
IdentityReport identity_report(const Field2& field, const Domain& dom, double a, double b,
                               const QuadraturePolicy& policy = {}, std::uint64_t jitter_key = 0);

/// (delta, |H(a + delta) - H(a)|) for every delta, sharing one grid.
std::vector<std::pair<double, double>> level_continuity_scan(const Field2& field,
                                                              const Domain& dom, double a,
                                                              std::span<const double> deltas);

/// Bulk and boundary pieces of H(f1^{-1}(0)) - H(f2^{-1}(0)).
struct DecompositionReport {
  double bulk_both_negative = 0.0;     // int (k1 - k2) 1{f1 < 0, f2 < 0}
  double bulk_kappa1_disagree = 0.0;   // int k1 1{f1 f2 < 0}
  double bulk_kappa2_disagree = 0.0;   // int k2 1{f1 f2 < 0}
  double boundary_both_negative = 0.0; // oint <n1 - n2, eta> 1{f1 < 0, f2 < 0}
  double boundary1_only = 0.0;         // oint <n1, eta> 1{f1 < 0, f2 > 0}
  double boundary2_only = 0.0;         // oint <n2, eta> 1{f2 < 0, f1 > 0}
  double disagreement_area = 0.0;      // L^2({f1 f2 < 0})
  double bulk_total = 0.0;             // int k1 1{f1 <= 0} - k2 1{f2 <= 0}
  double boundary_total = 0.0;         // oint <n1,eta> 1{f1 <= 0} - <n2,eta> 1{f2 <= 0}
  double length1 = 0.0, length2 = 0.0;
  double near_critical_volume = 0.0;
};

DecompositionReport bulk_difference_decomposition(const CoupledPair& cp, const Domain& dom,
                                                  const QuadraturePolicy& policy = {});

}  // namespace levelgauss
