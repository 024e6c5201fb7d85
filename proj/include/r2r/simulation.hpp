#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "r2r/controller.hpp"
#include "r2r/model.hpp"
#include "r2r/params.hpp"

namespace r2r {

/// How the terminal registration error is read at the cycle boundary.
enum class TerminalSampling {
  kInterpolated,  // linear interpolation to the exact phase crossing
  kGrid,          // first step at or past the crossing
};

std::string_view to_string(TerminalSampling mode);
std::optional<TerminalSampling> parse_terminal_sampling(std::string_view text);

struct SimConfig {
  double dt = 1e-3;  // s
  std::size_t iterations = 40;
  double terminal_angle = 2.0 * std::numbers::pi;  // downstream phase advance per cycle
  bool record_trace = false;
  std::size_t trace_stride = 100;  // steps between trace rows
  TerminalSampling sampling = TerminalSampling::kInterpolated;

  /// Throws InvalidParams unless 0 < dt <= period_ref / 1000 and the other
  /// fields are usable.
  void validate(const SystemParams& params) const;

  bool operator==(const SimConfig&) const = default;
};

/// Per-cycle log entry.
struct IterationRecord {
  std::size_t iteration = 0;
  double terminal_re = 0.0;     // r at the terminal event (interpolated within the step), m
  double terminal_time = 0.0;   // s
  double max_abs_tension = 0.0; // N, over the cycle
  double max_abs_speed = 0.0;   // m/s, over the cycle
  double xi = 0.0;              // learned coefficient applied during the cycle
  double learning_increment = 0.0;  // change of xi applied after the cycle
};

struct TraceRow {
  double time, tension_upstream, tension_print, tension_downstream, speed_upstream,
      speed_downstream, registration_error;
};

struct ExperimentResult {
  std::vector<IterationRecord> records;
  std::vector<TraceRow> trace;

  std::vector<double> terminal_errors() const;
};

/// Classical fourth-order Runge-Kutta step of y' = f(t, y).
template <typename Vec, typename F>
Vec rk4_step(F&& f, double t, const Vec& y, double dt) {
  const double h = 0.5 * dt;
  const Vec k1 = f(t, y);
  const Vec k2 = f(t + h, Vec(y + h * k1));
  const Vec k3 = f(t + h, Vec(y + h * k2));
  const Vec k4 = f(t + dt, Vec(y + dt * k3));
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// One classical RK4 step of the plant and the registration error with the
/// torque perturbations held constant over the step. Reads the delayed
/// upstream tension from `history`; the caller appends the new T_i.
PlantState step(const SystemParams& params, const PlantState& state,
                const TensionHistory& history, const Torques& perturbation, double dt);

/// Closed-loop simulator owning the plant state and the tension history.
class Simulator {
 public:
  Simulator(const SystemParams& params, const SimConfig& config);
  /// Starts from an arbitrary state (time is reset to 0, pre-history is 0).
  Simulator(const SystemParams& params, const SimConfig& config, const PlantState& initial);

  /// Advances one step with the given torque perturbations.
  void advance(const Torques& perturbation);

  /// Integrates until the downstream phase has advanced by the terminal
  /// angle since the previous terminal event, then lets the controller learn
  /// from the measured registration error. Throws MaxStepsExceeded if the
  /// phase stalls.
  IterationRecord run_cycle(HybridController& controller, std::vector<TraceRow>* trace = nullptr);

  const PlantState& state() const { return state_; }
  const TensionHistory& history() const { return history_; }
  std::size_t steps() const { return steps_; }
  std::size_t completed_cycles() const { return cycles_; }

 private:
  SystemParams params_;
  SimConfig config_;
  PlantState state_;
  TensionHistory history_;
  std::size_t steps_ = 0;
  std::size_t cycles_ = 0;
  double phase_origin_;
};

/// Runs `config.iterations` cycles of the closed loop described by `spec`.
/// Deterministic; failures are rethrown as SimulationError with the index of
/// the failing iteration.
ExperimentResult run_experiment(const SystemParams& params, const SimConfig& config,
                                const ControllerSpec& spec);

}  // namespace r2r
