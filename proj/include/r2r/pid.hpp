#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "r2r/model.hpp"

namespace r2r {

/// Gains of one decentralized PID loop. Each gain is a row acting on the
/// roller's [tension, speed] pair (proportional), their time integrals and
/// their time derivatives.
struct PidGains {
  std::array<double, 2> kp{};
  std::array<double, 2> ki{};
  std::array<double, 2> kd{};

  bool operator==(const PidGains&) const = default;
};

/// Named presets of the reference study ("a", "b", "c").
PidGains pid_preset_a();
PidGains pid_preset_b();
PidGains pid_preset_c();
std::optional<PidGains> pid_preset(std::string_view name);

using Pair = std::array<double, 2>;

/// U = Kp . measured + Ki . integral + Kd . derivative.
double pid_control(const PidGains& gains, const Pair& measured, const Pair& integral,
                   const Pair& derivative);

/// Discrete realization of one roller's PID loop: integrals by left-rectangle
/// accumulation, derivatives by backward difference (zero on the first step).
class PidLoop {
 public:
  explicit PidLoop(PidGains gains) : gains_(gains) {}

  /// Output for the current sample, then advance the integral and the
  /// derivative memory by one step of length `dt`.
  double update(const Pair& measured, double dt);

  const PidGains& gains() const { return gains_; }
  const Pair& integral() const { return integral_; }

 private:
  PidGains gains_;
  Pair integral_{};
  Pair previous_{};
  bool has_previous_ = false;
};

/// Both rollers' loops, sharing one gain set or using separate ones.
class DecentralizedPid {
 public:
  explicit DecentralizedPid(PidGains both) : DecentralizedPid(both, both) {}
  DecentralizedPid(PidGains upstream, PidGains downstream)
      : loops_{PidLoop(upstream), PidLoop(downstream)} {}

  /// Torque perturbations for the current state.
  Torques update(const PlantState& state, double dt);

  const PidLoop& loop(Roller r) const { return loops_[index(r)]; }

 private:
  std::array<PidLoop, 2> loops_;
};

}  // namespace r2r
