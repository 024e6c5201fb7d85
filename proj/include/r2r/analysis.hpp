#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "r2r/controller.hpp"
#include "r2r/params.hpp"
#include "r2r/recurrence.hpp"

namespace r2r {

/// Angle-indexed discrete closed loop over one revolution of the upstream
/// roller: x(k+1) = A(k) x(k) + B(k) (Phi(k) Xi + ...) with a separate
/// disturbance column. Per-bin output rows map the state to the registration
/// error rate scaled by dtau/dtheta, so sum_k C x(k) dtheta approximates the
/// integral of the rate over the cycle.
struct LtvProfile {
  std::size_t n_steps = 0;
  double dtheta = 0.0;      // rad per bin
  double dtau_equiv = 0.0;  // s per bin
  double phase0 = 0.0;      // upstream phase at k = 0
  std::vector<Eigen::MatrixXd> a;
  std::vector<Eigen::VectorXd> b;       // learned-input column
  std::vector<Eigen::VectorXd> b_dist;  // disturbance column
  std::vector<Eigen::RowVectorXd> c2;   // current-iteration output row
  std::vector<Eigen::RowVectorXd> c1;   // previous-iteration output row
  std::vector<double> u_dist;
  std::vector<double> phi;

  Eigen::Index dim() const { return a.empty() ? 0 : a.front().rows(); }
  /// Throws InvalidParams if the arrays are inconsistent.
  void check() const;
};

/// Continuous closed loop x' = A x + B u_ext with u_ext the two torque
/// perturbations added on top of the feedback law.
struct ClosedLoopModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
};

/// PID loops folded into the state via the integrators that carry a nonzero
/// gain, ordered [int T_i, int V_i, int T_{i+1}, int V_{i+1}]; the derivative
/// action is solved algebraically.
ClosedLoopModel closed_loop_pid(const SystemParams& params, const PidGains& gains,
                                double upstream_radius);
ClosedLoopModel closed_loop_lqr(const SystemParams& params, const LqrDesign& design,
                                double upstream_radius);
ClosedLoopModel closed_loop_open(const SystemParams& params, double upstream_radius);
ClosedLoopModel closed_loop_model(const SystemParams& params, const ControllerSpec& spec,
                                  double upstream_radius);

/// Zero-order-hold discretization via the block matrix exponential.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_discretize(const Eigen::MatrixXd& a,
                                                           const Eigen::MatrixXd& b, double dt);

/// Builds the angle profile of the stabilized loop. Matrices, disturbance and
/// basis are sampled at bin midpoints. The basis comes from `spec.stilc`
/// (20-step cosine on the upstream channel when absent). Throws
/// UnstablePreset if any bin's continuous closed loop has an eigenvalue with
/// positive real part.
LtvProfile discretize_closed_loop(const SystemParams& params, const ControllerSpec& spec,
                                  std::size_t n_steps = 360);
LtvProfile discretize_closed_loop(const SystemParams& params, const PidGains& gains,
                                  std::size_t n_steps = 360);

struct RecursionResult {
  std::vector<Eigen::MatrixXd> g;    // G(0..N)
  std::vector<Eigen::VectorXd> h;    // H(0..N)
  std::vector<Eigen::VectorXd> h_d;  // H_d(0..N), H_d(0) = 0
};

RecursionResult run_recursions(const LtvProfile& profile);

/// States x(0..N) by direct stepping with learned coefficient `xi` and the
/// disturbance on.
std::vector<Eigen::VectorXd> simulate_profile(const LtvProfile& profile, const Eigen::VectorXd& x0,
                                              double xi);

/// Largest relative deviation between G x0 + H xi + H_d and direct stepping.
double transition_mismatch(const LtvProfile& profile, const RecursionResult& rec,
                           const Eigen::VectorXd& x0, double xi);

struct OmegaCoefficients {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omega3 = 0.0;
  double learning_gain = 0.0;
};

/// Sums over the N bins, each output row acting on its bin-average state.
/// Both Omega1 and Omega2 scale with the learning gain.
/// Empty initial states mean zero.
OmegaCoefficients compute_omegas(const LtvProfile& profile, const RecursionResult& rec,
                                 double learning_gain, const Eigen::VectorXd& x0_current = {},
                                 const Eigen::VectorXd& x0_previous = {}, double target = 0.0);

/// Per-unit-gain sums: beta = sum C2 H dtheta, gamma = sum (C2 + C1) H dtheta,
/// so Omega1 = beta L and Omega2 = gamma L.
struct GainSlopes {
  double beta = 0.0;
  double gamma = 0.0;
};
GainSlopes gain_slopes(const LtvProfile& profile, const RecursionResult& rec);

/// Gain L solving (Omega1(L) - 1)^2 + 4 Omega2(L) = 0 for
/// Omega1 = a L and Omega2 = b L + c, restricted to roots with Omega2 < 0;
/// returns the one of smallest |L|. Throws NoSolution otherwise.
double critical_gain(double a, double b, double c);
double critical_gain(const LtvProfile& profile, const RecursionResult& rec);

struct Feasibility {
  Eigen::RowVectorXd response;  // N: terminal-output sensitivity to each input bin
  double n_phi = 0.0;           // response . Phi
  bool feasible = false;
  double xi_star = 0.0;  // steady learned coefficient that zeroes the terminal error
};

/// Terminal-output sensitivity of one cycle to the learned-input profile,
/// obtained with an adjoint sweep. Feasible when |N Phi| exceeds
/// `tolerance * |N| |Phi|`.
Feasibility learning_feasibility(const LtvProfile& profile, const RecursionResult& rec,
                                 double target = 0.0, double tolerance = 1e-12);

struct GainGridRow {
  double gain;
  OmegaCoefficients omegas;
  ConvergenceVerdict verdict;
};
std::vector<GainGridRow> gain_grid(const LtvProfile& profile, const RecursionResult& rec,
                                   const std::vector<double>& gains);

}  // namespace r2r
