#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "r2r/lqr.hpp"
#include "r2r/model.hpp"
#include "r2r/pid.hpp"
#include "r2r/stilc.hpp"

namespace r2r {

enum class FeedbackKind { kOpenLoop, kPid, kLqr };

std::string_view to_string(FeedbackKind kind);
std::optional<FeedbackKind> parse_feedback_kind(std::string_view text);

struct StilcSettings {
  double learning_gain = 5000.0;
  std::size_t basis_steps = 20;
  double target = 0.0;  // Y_d, m
  StilcChannel channel = StilcChannel::kUpstream;

  bool operator==(const StilcSettings&) const = default;
};

/// Declarative description of a controller: a feedback law plus an optional
/// learning component.
struct ControllerSpec {
  std::string preset = "stilc-pid";
  FeedbackKind feedback = FeedbackKind::kPid;
  PidGains pid = pid_preset_a();
  LqrWeights lqr;
  std::optional<StilcSettings> stilc = StilcSettings{};

  bool operator==(const ControllerSpec&) const = default;
};

/// Presets: open-loop, pid-a, pid-b, pid-c, lqr, stilc-pid (= stilc-pid-a),
/// stilc-pid-a, stilc-pid-b, stilc-pid-c, stilc-lqr.
std::optional<ControllerSpec> controller_preset(std::string_view name);
const std::vector<std::string>& preset_names();

/// u = u_OL + u_FB, plus the learned feedforward on the configured channel(s).
Torques hybrid_control(const Torques& open_loop, const Torques& feedback,
                       const StilcController* stilc, double upstream_phase);

/// Stateful per-experiment controller driven by the simulation engine.
class HybridController {
 public:
  HybridController(const SystemParams& params, const ControllerSpec& spec);

  /// Absolute motor torques for the current state; advances the feedback
  /// integrators and derivative memory by `dt`.
  Torques compute(const PlantState& state, double dt);

  /// Between-cycle update with the measured terminal output (registration
  /// error). Returns the applied change of xi (0 without a learning part).
  double end_cycle(double measured_terminal_output);

  double xi() const { return stilc_ ? stilc_->xi() : 0.0; }
  const std::optional<StilcController>& stilc() const { return stilc_; }
  const Torques& open_loop() const { return open_loop_; }

 private:
  Torques open_loop_;
  std::variant<std::monostate, DecentralizedPid, LqrLoop> feedback_;
  std::optional<StilcController> stilc_;
};

}  // namespace r2r
