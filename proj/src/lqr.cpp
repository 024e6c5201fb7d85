#include "r2r/lqr.hpp"

#include "r2r/riccati.hpp"

namespace r2r {

NominalModel build_nominal_matrices(const SystemParams& params) {
  const LinearPlant plant = linearized_plant(params, params.radius[0]);
  NominalModel m;
  m.a = plant.a;
  m.b = plant.b;
  m.c.setZero();
  m.c(0, 0) = 1.0;
  m.c(1, 1) = 1.0;
  return m;
}

AugmentedModel augment_with_integrals(const NominalModel& model) {
  AugmentedModel aug;
  aug.a.setZero();
  aug.a.topLeftCorner<5, 5>() = model.a;
  aug.a.bottomLeftCorner<2, 5>() = -model.c;
  aug.b.setZero();
  aug.b.topRows<5>() = model.b;
  return aug;
}

LqrDesign design_lqr(const SystemParams& params, const LqrWeights& weights) {
  LqrDesign d;
  d.nominal = build_nominal_matrices(params);
  d.q.setZero();
  for (int i = 0; i < 7; ++i) d.q(i, i) = weights.q_diag[static_cast<std::size_t>(i)];
  d.r.setZero();
  for (int i = 0; i < 2; ++i) d.r(i, i) = weights.r_diag[static_cast<std::size_t>(i)];

  const AugmentedModel aug = augment_with_integrals(d.nominal);
  const RiccatiSolution sol = solve_riccati(aug.a, aug.b, d.q, d.r);
  d.p = sol.p;
  d.k = sol.k;
  d.riccati_residual = sol.residual;
  d.closed_loop_abscissa = spectral_abscissa(aug.a - aug.b * d.k);
  return d;
}

Eigen::Vector2d lqr_control(const LqrDesign& design, const PerturbationVector& x,
                            const Eigen::Vector2d& z) {
  Eigen::Matrix<double, 7, 1> full;
  full << x, z;
  return -design.k * full;
}

Torques LqrLoop::update(const PlantState& state, double dt) {
  const PerturbationVector x = state.perturbation();
  const Eigen::Vector2d u = lqr_control(design_, x, z_);
  z_ -= design_.nominal.c * x * dt;
  return {u(0), u(1)};
}

}  // namespace r2r
