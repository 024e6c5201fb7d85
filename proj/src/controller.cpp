#include "r2r/controller.hpp"

#include <cmath>

#include "r2r/errors.hpp"

namespace r2r {

std::string_view to_string(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::kOpenLoop: return "open-loop";
    case FeedbackKind::kPid: return "pid";
    case FeedbackKind::kLqr: return "lqr";
  }
  return "pid";
}

std::optional<FeedbackKind> parse_feedback_kind(std::string_view text) {
  if (text == "open-loop") return FeedbackKind::kOpenLoop;
  if (text == "pid") return FeedbackKind::kPid;
  if (text == "lqr") return FeedbackKind::kLqr;
  return std::nullopt;
}

std::optional<ControllerSpec> controller_preset(std::string_view name) {
  ControllerSpec spec;
  spec.preset = std::string(name);
  std::string_view rest = name;
  const bool learning = rest.starts_with("stilc-");
  if (learning) {
    rest.remove_prefix(6);
    spec.stilc = StilcSettings{};
  } else {
    spec.stilc.reset();
  }

  if (rest == "open-loop" && !learning) {
    spec.feedback = FeedbackKind::kOpenLoop;
  } else if (rest == "pid" && learning) {
    spec.feedback = FeedbackKind::kPid;
    spec.pid = pid_preset_a();
  } else if (rest.starts_with("pid-") && rest.size() == 5) {
    const auto gains = pid_preset(rest.substr(4));
    if (!gains) return std::nullopt;
    spec.feedback = FeedbackKind::kPid;
    spec.pid = *gains;
  } else if (rest == "lqr") {
    spec.feedback = FeedbackKind::kLqr;
  } else {
    return std::nullopt;
  }
  return spec;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "open-loop", "pid-a",       "pid-b",       "pid-c",       "lqr",
      "stilc-pid", "stilc-pid-a", "stilc-pid-b", "stilc-pid-c", "stilc-lqr"};
  return names;
}

Torques hybrid_control(const Torques& open_loop, const Torques& feedback,
                       const StilcController* stilc, double upstream_phase) {
  Torques u{open_loop.upstream + feedback.upstream, open_loop.downstream + feedback.downstream};
  if (stilc != nullptr) {
    // The basis is indexed by the upstream phase on every channel.
    const double learned = stilc->output(upstream_phase);
    if (stilc->channel() != StilcChannel::kDownstream) u.upstream += learned;
    if (stilc->channel() != StilcChannel::kUpstream) u.downstream += learned;
  }
  return u;
}

HybridController::HybridController(const SystemParams& params, const ControllerSpec& spec)
    : open_loop_{equilibrium_input(params, Roller::kUpstream),
                 equilibrium_input(params, Roller::kDownstream)} {
  switch (spec.feedback) {
    case FeedbackKind::kOpenLoop: break;
    case FeedbackKind::kPid: feedback_ = DecentralizedPid(spec.pid); break;
    case FeedbackKind::kLqr: feedback_ = LqrLoop(design_lqr(params, spec.lqr)); break;
  }
  if (spec.stilc) {
    stilc_ = StilcController::cosine(spec.stilc->learning_gain, spec.stilc->basis_steps,
                                     spec.stilc->target, spec.stilc->channel);
  }
}

Torques HybridController::compute(const PlantState& state, double dt) {
  Torques fb;
  if (auto* pid = std::get_if<DecentralizedPid>(&feedback_)) {
    fb = pid->update(state, dt);
  } else if (auto* lqr = std::get_if<LqrLoop>(&feedback_)) {
    fb = lqr->update(state, dt);
  }
  return hybrid_control(open_loop_, fb, stilc_ ? &*stilc_ : nullptr, state.phase(Roller::kUpstream));
}

double HybridController::end_cycle(double measured_terminal_output) {
  if (!stilc_) return 0.0;
  const double before = stilc_->xi();
  stilc_->update(stilc_->terminal_error(measured_terminal_output));
  if (!std::isfinite(stilc_->xi())) throw NonFiniteState("learned coefficient is not finite");
  return stilc_->xi() - before;
}

}  // namespace r2r
