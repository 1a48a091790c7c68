#include "levelgauss/levelset.hpp"

#include "levelgauss/error.hpp"
#include "quadrature_detail.hpp"

namespace levelgauss {

DecompositionReport bulk_difference_decomposition(const CoupledPair& cp, const Domain& dom,
                                                  const QuadraturePolicy& policy) {
  dom.validate();
  const Field2& f1 = cp.field1;
  const Field2& f2 = cp.field2;
  const double cap = policy.kappa_cap;

  auto region = [](const detail::Values<2>& v) { return int(v[0] < 0.0) | (int(v[1] < 0.0) << 1); };

  // bulk_both_negative, kappa1 on disagreement, kappa2 on disagreement,
  // disagreement indicator, signed total.
  auto bulk = [cap](const detail::Jets<2>& j, bool capped) {
    const double k1 = detail::capped_kappa(j[0], capped, cap);
    const double k2 = detail::capped_kappa(j[1], capped, cap);
    const bool n1 = j[0].f < 0.0, n2 = j[1].f < 0.0;
    const bool disagree = j[0].f * j[1].f < 0.0;
    return std::array<double, 5>{(n1 && n2) ? k1 - k2 : 0.0, disagree ? k1 : 0.0,
                                 disagree ? k2 : 0.0, disagree ? 1.0 : 0.0,
                                 (j[0].f <= 0.0 ? k1 : 0.0) - (j[1].f <= 0.0 ? k2 : 0.0)};
  };
  detail::CellIntegrator<2, 5, decltype(bulk), decltype(region)> cells({&f1, &f2}, policy, bulk,
                                                                       region);
  const auto b = cells.run(dom);

  auto flux = [](const detail::Jets<2>& j, const Vec2& eta) {
    const double c1 = j[0].grad.dot(eta) / j[0].grad.norm();
    const double c2 = j[1].grad.dot(eta) / j[1].grad.norm();
    const bool n1 = j[0].f < 0.0, n2 = j[1].f < 0.0;
    return std::array<double, 4>{(n1 && n2) ? c1 - c2 : 0.0, (n1 && j[1].f > 0.0) ? c1 : 0.0,
                                 (n2 && j[0].f > 0.0) ? c2 : 0.0,
                                 (j[0].f <= 0.0 ? c1 : 0.0) - (j[1].f <= 0.0 ? c2 : 0.0)};
  };
  detail::BoundaryIntegrator<2, 4, decltype(flux), decltype(region)> edges(
      {&f1, &f2}, policy, cp.field1.seed(), flux, region);
  const auto e = edges.run(dom);

  DecompositionReport rep;
  rep.bulk_both_negative = b.value[0];
  rep.bulk_kappa1_disagree = b.value[1];
  rep.bulk_kappa2_disagree = b.value[2];
  rep.disagreement_area = b.value[3];
  rep.bulk_total = b.value[4];
  rep.near_critical_volume = b.near_critical_volume;
  rep.boundary_both_negative = e.value[0];
  rep.boundary1_only = e.value[1];
  rep.boundary2_only = e.value[2];
  rep.boundary_total = e.value[3];
  rep.length1 = level_length(f1, dom, 0.0).length;
  rep.length2 = level_length(f2, dom, 0.0).length;
  return rep;
}

}  // namespace levelgauss
