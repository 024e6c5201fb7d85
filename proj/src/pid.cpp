#include "r2r/pid.hpp"

namespace r2r {

PidGains pid_preset_a() { return {{-0.1916, 0.0}, {-0.0767, 0.0}, {-0.0038, -0.1916}}; }
PidGains pid_preset_b() { return {{-0.1916, 0.0}, {-0.0575, 0.0}, {-0.0038, -0.1916}}; }
PidGains pid_preset_c() { return {{-0.3832, 0.0}, {-0.0575, 0.0}, {-0.0038, -0.1916}}; }

std::optional<PidGains> pid_preset(std::string_view name) {
  if (name == "a" || name == "A") return pid_preset_a();
  if (name == "b" || name == "B") return pid_preset_b();
  if (name == "c" || name == "C") return pid_preset_c();
  return std::nullopt;
}

double pid_control(const PidGains& g, const Pair& measured, const Pair& integral,
                   const Pair& derivative) {
  double u = 0.0;
  for (std::size_t m = 0; m < 2; ++m) {
    u += g.kp[m] * measured[m] + g.ki[m] * integral[m] + g.kd[m] * derivative[m];
  }
  return u;
}

double PidLoop::update(const Pair& measured, double dt) {
  Pair derivative{};
  if (has_previous_) {
    for (std::size_t m = 0; m < 2; ++m) derivative[m] = (measured[m] - previous_[m]) / dt;
  }
  const double u = pid_control(gains_, measured, integral_, derivative);
  for (std::size_t m = 0; m < 2; ++m) integral_[m] += measured[m] * dt;
  previous_ = measured;
  has_previous_ = true;
  return u;
}

Torques DecentralizedPid::update(const PlantState& state, double dt) {
  // Roller j regulates the span it draws from (span j) and its own speed.
  const double up = loops_[0].update({state.tension(0), state.speed(0)}, dt);
  const double down = loops_[1].update({state.tension(1), state.speed(1)}, dt);
  return {up, down};
}

}  // namespace r2r
