#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "r2r/params.hpp"

namespace r2r {

/// Layout of the continuous plant state integrated by the engine.
enum StateIndex : Eigen::Index {
  kTensionUpstream = 0,    // T_i
  kTensionPrint = 1,       // T_{i+1}, the span between the printing rollers
  kTensionDownstream = 2,  // T_{i+2}
  kSpeedUpstream = 3,      // V_i
  kSpeedDownstream = 4,    // V_{i+1}
  kPhaseUpstream = 5,      // theta_i
  kPhaseDownstream = 6,    // theta_{i+1}
};

inline constexpr Eigen::Index kContinuousStates = 7;
inline constexpr Eigen::Index kPerturbationStates = 5;

using ContinuousState = Eigen::Matrix<double, kContinuousStates, 1>;
using PerturbationVector = Eigen::Matrix<double, kPerturbationStates, 1>;

/// A pair of motor torques, one per printing roller [N m]. Depending on the
/// call site these are absolute torques or perturbations around the nominal
/// equilibrium input.
struct Torques {
  double upstream = 0.0;
  double downstream = 0.0;

  double operator[](Roller r) const { return r == Roller::kUpstream ? upstream : downstream; }
  bool operator==(const Torques&) const = default;
};

/// Perturbation state of the unit plus the cumulative registration error.
struct PlantState {
  ContinuousState x = ContinuousState::Zero();
  double registration_error = 0.0;  // r, m
  double time = 0.0;                // s

  double tension(std::size_t k) const { return x(kTensionUpstream + static_cast<Eigen::Index>(k)); }
  double speed(std::size_t j) const { return x(kSpeedUpstream + static_cast<Eigen::Index>(j)); }
  double phase(Roller r) const {
    return r == Roller::kUpstream ? x(kPhaseUpstream) : x(kPhaseDownstream);
  }
  PerturbationVector perturbation() const { return x.head<kPerturbationStates>(); }
};

/// Initial state: zero perturbations, upstream phase at `params.upstream_phase0`.
PlantState initial_state(const SystemParams& params);

/// Uniformly sampled history of T_i used for the transport-delayed term of the
/// registration-error rate. Samples are taken at t = m * dt, m = 0, 1, ...;
/// queries before t = 0 return the reference condition (0).
class TensionHistory {
 public:
  TensionHistory(double dt, double horizon);

  void push(double tension);
  double value_at(double t) const;

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return buffer_.size(); }
  double dt() const { return dt_; }

 private:
  double sample(std::size_t m) const { return buffer_[m % buffer_.size()]; }

  double dt_;
  std::vector<double> buffer_;
  std::size_t count_ = 0;
};

/// Constant equilibrium torque of a roller at its reference radius.
double equilibrium_input(const SystemParams& params, Roller roller);

/// Equivalent radius of the eccentric upstream roller at phase `theta`.
double effective_radius(const SystemParams& params, double theta);

/// Equilibrium torque of the upstream roller with the eccentric radius.
/// Throws NonPositiveRadius when the eccentricity reaches the radius.
double varying_equilibrium_input(const SystemParams& params, double theta);

/// Equivalent input disturbance on the upstream roller: nominal equilibrium
/// torque minus the phase-dependent one. Zero when the eccentricity is zero.
double input_disturbance(const SystemParams& params, double theta);

/// Time derivative of the continuous state.
///
/// `perturbation` holds the torques relative to the constant nominal
/// equilibrium inputs. With `disturbance_on` the upstream roller uses the
/// eccentric radius and the equilibrium mismatch enters as an equivalent
/// input disturbance. Throws NonFiniteState on non-finite inputs.
ContinuousState plant_derivatives(const SystemParams& params, const ContinuousState& x,
                                  const Torques& perturbation, bool disturbance_on);

/// Registration-error rate from the delayed upstream tension and the current
/// print-span tension [m/s].
double registration_rate(const SystemParams& params, double tension_upstream_delayed,
                         double tension_print_now);

/// Linear perturbation model x' = A x + B U for the five perturbation states
/// with the given upstream radius.
struct LinearPlant {
  Eigen::Matrix<double, 5, 5> a;
  Eigen::Matrix<double, 5, 2> b;
};
LinearPlant linearized_plant(const SystemParams& params, double upstream_radius);

}  // namespace r2r
