#pragma once

#include <cstdint>
#include <vector>

#include "levelgauss/domain.hpp"
#include "levelgauss/field.hpp"
#include "levelgauss/transport.hpp"

namespace levelgauss {

/// Two fields sharing coefficient noise over the pairs of a coupling plan:
/// term k of field1 has frequency s_k, term k of field2 has t_k, both with
/// weight w_k and the same (a_k, b_k).
struct CoupledPair {
  SampledField field1;
  SampledField field2;
  std::vector<PlanPair> pairing;
};

struct CouplingDiagnostics {
  double sigma_D = 0.0;  // sup over grid and |alpha| <= 2 of sd(d^alpha F)
  double beta = 0.0;     // realisation-wise sup-norm of F over the same grid
  double grid_spacing = 0.0;
};

/// Validates the plan marginals against m1 and m2 (1e-10), then draws the
/// shared coefficients from the counter RNG keyed by `seed`.
CoupledPair couple(const SpectralMeasure& m1, const SpectralMeasure& m2, const CouplingPlan& plan,
                   std::uint64_t seed);

/// rho(x) = sum_k w_k cos<s_k - t_k, x>, the correlation of f1(x) and f2(x).
double correlation_at(const CoupledPair& cp, const Vec2& x);

/// Closed-form sigma_D and per-realisation beta on a grid over D = [-R, R]^2
/// with spacing at most `grid_spacing`. Multi-indices are visited in the
/// order (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
CouplingDiagnostics diagnostics(const CoupledPair& cp, const Domain& dom, double grid_spacing = 0.05);

/// sigma_D alone; depends only on the plan, not on the realisation.
double sigma_D(const std::vector<PlanPair>& pairing, const Domain& dom, double grid_spacing = 0.05);

/// Var d^alpha F(x) for one multi-index, closed form.
double difference_variance(const std::vector<PlanPair>& pairing, int alpha_x, int alpha_y,
                           const Vec2& x);

}  // namespace levelgauss
