#pragma once

#include <array>

#include <Eigen/Core>

#include "r2r/model.hpp"
#include "r2r/params.hpp"

namespace r2r {

/// Continuous nominal model with state order [T_i, T_{i+1}, T_{i+2}, V_i, V_{i+1}].
struct NominalModel {
  Eigen::Matrix<double, 5, 5> a;
  Eigen::Matrix<double, 5, 2> b;
  Eigen::Matrix<double, 2, 5> c;  // selects the two controlled tensions
};

NominalModel build_nominal_matrices(const SystemParams& params);

using Matrix7d = Eigen::Matrix<double, 7, 7>;
using Matrix72d = Eigen::Matrix<double, 7, 2>;
using Matrix27d = Eigen::Matrix<double, 2, 7>;

/// Model augmented with z' = -C x.
struct AugmentedModel {
  Matrix7d a;
  Matrix72d b;
};
AugmentedModel augment_with_integrals(const NominalModel& model);

struct LqrWeights {
  std::array<double, 7> q_diag{10, 10, 1, 1, 1, 100, 100};
  std::array<double, 2> r_diag{5, 5};

  bool operator==(const LqrWeights&) const = default;
};

struct LqrDesign {
  NominalModel nominal;
  Matrix7d q;
  Eigen::Matrix2d r;
  Matrix7d p;
  Matrix27d k;
  double riccati_residual = 0.0;
  double closed_loop_abscissa = 0.0;  // max real part of eig(A_aug - B_aug K)
};

/// Solves the augmented LQR problem for the nominal plant.
LqrDesign design_lqr(const SystemParams& params, const LqrWeights& weights = {});

/// u = -K [x; z].
Eigen::Vector2d lqr_control(const LqrDesign& design, const PerturbationVector& x,
                            const Eigen::Vector2d& z);

/// Runtime LQR loop: keeps the integral state z (left-rectangle integration of
/// -C x) alongside the plant.
class LqrLoop {
 public:
  explicit LqrLoop(LqrDesign design) : design_(std::move(design)) {}

  Torques update(const PlantState& state, double dt);

  const LqrDesign& design() const { return design_; }
  const Eigen::Vector2d& integral() const { return z_; }

 private:
  LqrDesign design_;
  Eigen::Vector2d z_ = Eigen::Vector2d::Zero();
};

}  // namespace r2r
