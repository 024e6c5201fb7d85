#include "r2r/simulation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "r2r/errors.hpp"

namespace r2r {

std::string_view to_string(TerminalSampling mode) {
  return mode == TerminalSampling::kGrid ? "grid" : "interpolated";
}

std::optional<TerminalSampling> parse_terminal_sampling(std::string_view text) {
  if (text == "interpolated") return TerminalSampling::kInterpolated;
  if (text == "grid") return TerminalSampling::kGrid;
  return std::nullopt;
}

void SimConfig::validate(const SystemParams& params) const {
  if (!(dt > 0.0) || !(dt <= params.period_ref / 1000.0)) {
    throw InvalidParams(fmt::format("time step {} s must lie in (0, period_ref/1000]", dt));
  }
  if (iterations == 0) throw InvalidParams("iterations must be >= 1");
  if (!(terminal_angle > 0.0) || !std::isfinite(terminal_angle)) {
    throw InvalidParams("terminal_angle must be > 0");
  }
  if (trace_stride == 0) throw InvalidParams("trace_stride must be >= 1");
}

std::vector<double> ExperimentResult::terminal_errors() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.terminal_re);
  return out;
}

PlantState step(const SystemParams& p, const PlantState& s, const TensionHistory& history,
                const Torques& u, double dt) {
  // Plant states plus the registration error as the last component.
  using Augmented = Eigen::Matrix<double, kContinuousStates + 1, 1>;
  const double delay = p.period_ref;
  const auto rhs = [&](double t, const Augmented& y) {
    const ContinuousState x = y.head<kContinuousStates>();
    Augmented dy;
    dy.head<kContinuousStates>() = plant_derivatives(p, x, u, true);
    dy(kContinuousStates) = registration_rate(p, history.value_at(t - delay), x(kTensionPrint));
    return dy;
  };
  Augmented y;
  y << s.x, s.registration_error;
  const Augmented next_y = rk4_step(rhs, s.time, y, dt);

  PlantState next;
  next.x = next_y.head<kContinuousStates>();
  next.registration_error = next_y(kContinuousStates);
  next.time = s.time + dt;
  if (!next_y.allFinite()) {
    throw NonFiniteState(fmt::format("state became non-finite at t={} s", next.time));
  }
  return next;
}

Simulator::Simulator(const SystemParams& params, const SimConfig& config)
    : Simulator(params, config, initial_state(params)) {}

Simulator::Simulator(const SystemParams& params, const SimConfig& config,
                     const PlantState& initial)
    : params_(params),
      config_(config),
      state_(initial),
      history_(config.dt, params.period_ref),
      phase_origin_(initial.x(kPhaseDownstream)) {
  state_.time = 0.0;
  if (!state_.x.allFinite() || !std::isfinite(state_.registration_error)) {
    throw NonFiniteState("initial state is not finite");
  }
  params_.validate();
  config_.validate(params_);
  history_.push(state_.tension(0));
}

void Simulator::advance(const Torques& perturbation) {
  state_ = step(params_, state_, history_, perturbation, config_.dt);
  ++steps_;
  // Grid time avoids round-off drift between the state and the history.
  state_.time = static_cast<double>(steps_) * config_.dt;
  history_.push(state_.tension(0));
}

IterationRecord Simulator::run_cycle(HybridController& controller, std::vector<TraceRow>* trace) {
  const double boundary = phase_origin_ + config_.terminal_angle;
  const double nominal_steps = config_.terminal_angle * params_.radius[1] /
                               params_.speed_ref[1] / config_.dt;
  const auto max_steps = static_cast<std::size_t>(10.0 * nominal_steps) + 100;

  IterationRecord rec;
  rec.iteration = cycles_;
  rec.xi = controller.xi();
  std::size_t taken = 0;
  double prev_phase = state_.x(kPhaseDownstream);
  double prev_re = state_.registration_error;
  double prev_time = state_.time;
  while (state_.x(kPhaseDownstream) < boundary) {
    prev_phase = state_.x(kPhaseDownstream);
    prev_re = state_.registration_error;
    prev_time = state_.time;
    if (++taken > max_steps) {
      throw MaxStepsExceeded(fmt::format(
          "downstream phase did not complete the cycle within {} steps", max_steps));
    }
    const Torques u = controller.compute(state_, config_.dt);
    const Torques& ol = controller.open_loop();
    advance({u.upstream - ol.upstream, u.downstream - ol.downstream});

    for (std::size_t k = 0; k < 3; ++k) {
      rec.max_abs_tension = std::max(rec.max_abs_tension, std::abs(state_.tension(k)));
    }
    for (std::size_t j = 0; j < 2; ++j) {
      rec.max_abs_speed = std::max(rec.max_abs_speed, std::abs(state_.speed(j)));
    }
    if (trace != nullptr && steps_ % config_.trace_stride == 0) {
      const auto& x = state_.x;
      trace->push_back({state_.time, x(kTensionUpstream), x(kTensionPrint),
                        x(kTensionDownstream), x(kSpeedUpstream), x(kSpeedDownstream),
                        state_.registration_error});
    }
  }
  if (state_.x(kPhaseDownstream) >= boundary + config_.terminal_angle) {
    throw Error(fmt::format("downstream phase skipped a whole cycle in one step (phase {})",
                            state_.x(kPhaseDownstream)));
  }
  if (config_.sampling == TerminalSampling::kInterpolated) {
    // The event lies inside the last step; interpolate linearly in phase so
    // the sampling instant does not jitter with the step grid.
    const double span = state_.x(kPhaseDownstream) - prev_phase;
    const double frac = span > 0.0 ? (boundary - prev_phase) / span : 1.0;
    rec.terminal_re = prev_re + frac * (state_.registration_error - prev_re);
    rec.terminal_time = prev_time + frac * (state_.time - prev_time);
    phase_origin_ = boundary;
  } else {
    rec.terminal_re = state_.registration_error;
    rec.terminal_time = state_.time;
    phase_origin_ = state_.x(kPhaseDownstream);
  }
  rec.learning_increment = controller.end_cycle(rec.terminal_re);
  ++cycles_;
  return rec;
}

ExperimentResult run_experiment(const SystemParams& params, const SimConfig& config,
                                const ControllerSpec& spec) {
  Simulator sim(params, config);
  HybridController controller(params, spec);
  ExperimentResult result;
  result.records.reserve(config.iterations);
  if (config.record_trace) {
    const auto& x = sim.state().x;
    result.trace.push_back({0.0, x(kTensionUpstream), x(kTensionPrint), x(kTensionDownstream),
                            x(kSpeedUpstream), x(kSpeedDownstream), 0.0});
  }
  for (std::size_t j = 0; j < config.iterations; ++j) {
    try {
      result.records.push_back(
          sim.run_cycle(controller, config.record_trace ? &result.trace : nullptr));
    } catch (const SimulationError&) {
      throw;
    } catch (const Error& e) {
      throw SimulationError(j, e.what());
    }
  }
  return result;
}

}  // namespace r2r
