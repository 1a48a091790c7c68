#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "levelgauss/spectral_measure.hpp"

namespace levelgauss {

/// One matched frequency pair carrying mass w. `t` is stored with the sign
/// actually used by the coupling (t or -t of the m2 representative).
struct PlanPair {
  Eigen::VectorXd s;
  Eigen::VectorXd t;
  double w = 0.0;
};

struct CouplingPlan {
  std::vector<PlanPair> pairs;
  double cost = 0.0;  // sum_k w_k pair_cost(s_k, t_k)
};

/// (|s|^2 + |t|^2 + 1)^3 |s - t|^2.
double pair_cost(const Eigen::VectorXd& s, const Eigen::VectorXd& t);

/// Matching of representatives with the better of the two signs of t.
double folded_pair_cost(const Eigen::VectorXd& s, const Eigen::VectorXd& t);

/// Exact minimum-cost symmetric coupling of two atomic measures by a primal
/// transportation simplex over the half-space representatives. Entering
/// cells are chosen by Bland's rule in row-major order, so the result is
/// deterministic. Throws InvalidInput on a dimension mismatch, on more than
/// 512 atoms per side, or on unequal total mass.
CouplingPlan optimal_coupling(const SpectralMeasure& m1, const SpectralMeasure& m2);

/// Atom k of m1 matched to atom k of m2 (same weights required).
CouplingPlan index_coupling(const SpectralMeasure& m1, const SpectralMeasure& m2);

/// (R^d + 1) * plan.cost, the fluctuation bound with its constant dropped.
double sigma_bound_proxy(const CouplingPlan& plan, double R, int d);

/// Throws InvalidInput unless the plan's marginals reproduce m1 and m2
/// (atoms up to sign) within `tol`.
void validate_plan(const CouplingPlan& plan, const SpectralMeasure& m1, const SpectralMeasure& m2,
                   double tol = 1e-10);

/// Brute force over all basic feasible solutions of the folded
/// transportation problem. Exponential; intended for <= 4 atoms per side.
double brute_force_coupling_cost(const SpectralMeasure& m1, const SpectralMeasure& m2);

}  // namespace levelgauss
