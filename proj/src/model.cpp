#include "r2r/model.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "r2r/errors.hpp"

namespace r2r {

PlantState initial_state(const SystemParams& params) {
  PlantState s;
  s.x(kPhaseUpstream) = params.upstream_phase0;
  return s;
}

// ---------------------------------------------------------------------------
// TensionHistory

TensionHistory::TensionHistory(double dt, double horizon) : dt_(dt) {
  if (!(dt > 0.0) || !(horizon >= 0.0)) {
    throw InvalidParams("TensionHistory needs dt > 0 and horizon >= 0");
  }
  buffer_.assign(static_cast<std::size_t>(std::ceil(horizon / dt)) + 3, 0.0);
}

void TensionHistory::push(double tension) {
  buffer_[count_ % buffer_.size()] = tension;
  ++count_;
}

double TensionHistory::value_at(double t) const {
  if (t < 0.0) return 0.0;
  if (count_ == 0) throw Error("TensionHistory queried before any sample");
  const double pos = t / dt_;
  const auto m = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(m);
  const std::size_t newest = count_ - 1;
  if (m >= newest) {
    // Exactly on (or within rounding of) the newest sample.
    if (m == newest && frac < 1e-9) return sample(newest);
    throw Error(fmt::format("TensionHistory queried ahead of its newest sample (t={})", t));
  }
  if (count_ - m > buffer_.size()) {
    throw Error(fmt::format("TensionHistory sample at t={} has been overwritten", t));
  }
  return sample(m) + frac * (sample(m + 1) - sample(m));
}

// ---------------------------------------------------------------------------
// Equilibria and disturbance geometry

double equilibrium_input(const SystemParams& p, Roller roller) {
  const std::size_t j = index(roller);
  const double radius = p.radius[j];
  // Span j is upstream of roller j, span j+1 downstream.
  const double tension_step = p.tension_ref[j + 1] - p.tension_ref[j];
  return p.friction[j] / (p.gear_ratio[j] * radius) * p.speed_ref[j] -
         radius / p.gear_ratio[j] * tension_step;
}

double effective_radius(const SystemParams& p, double theta) {
  return p.radius[0] + p.eccentricity * std::cos(theta);
}

double varying_equilibrium_input(const SystemParams& p, double theta) {
  const double radius = effective_radius(p, theta);
  if (!(radius > 0.0)) {
    throw NonPositiveRadius(fmt::format("effective radius {} m at phase {} rad", radius, theta));
  }
  const double tension_step = p.tension_ref[1] - p.tension_ref[0];
  return p.friction[0] / (p.gear_ratio[0] * radius) * p.speed_ref[0] -
         radius / p.gear_ratio[0] * tension_step;
}

double input_disturbance(const SystemParams& p, double theta) {
  if (p.eccentricity == 0.0) return 0.0;
  return equilibrium_input(p, Roller::kUpstream) - varying_equilibrium_input(p, theta);
}

// ---------------------------------------------------------------------------
// Plant

ContinuousState plant_derivatives(const SystemParams& p, const ContinuousState& x,
                                  const Torques& perturbation, bool disturbance_on) {
  if (!x.allFinite() || !std::isfinite(perturbation.upstream) ||
      !std::isfinite(perturbation.downstream)) {
    throw NonFiniteState("plant state or input is not finite");
  }
  const double ae = p.stiffness();

  // Index 0 and 3 are the boundary rollers/span held at reference.
  const std::array<double, 4> v_ref{p.boundary_upstream_speed_ref, p.speed_ref[0], p.speed_ref[1],
                                    p.boundary_downstream_speed_ref};
  const std::array<double, 4> speed{0.0, x(kSpeedUpstream), x(kSpeedDownstream), 0.0};
  const std::array<double, 4> t_ref{p.boundary_tension_ref, p.tension_ref[0], p.tension_ref[1],
                                    p.tension_ref[2]};
  const std::array<double, 4> tension{0.0, x(kTensionUpstream), x(kTensionPrint),
                                      x(kTensionDownstream)};

  ContinuousState dx;
  for (std::size_t k = 1; k <= 3; ++k) {
    const double flow = ae * (speed[k] - speed[k - 1]) +
                        (t_ref[k - 1] * speed[k - 1] + v_ref[k - 1] * tension[k - 1]) -
                        (t_ref[k] * speed[k] + v_ref[k] * tension[k]) +
                        (t_ref[k - 1] * v_ref[k - 1] - t_ref[k] * v_ref[k]);
    dx(kTensionUpstream + static_cast<Eigen::Index>(k - 1)) = flow / p.span_length[k - 1];
  }

  const double theta = x(kPhaseUpstream);
  const std::array<double, 2> radius{
      disturbance_on ? effective_radius(p, theta) : p.radius[0], p.radius[1]};
  if (!(radius[0] > 0.0)) {
    throw NonPositiveRadius(fmt::format("effective radius {} m", radius[0]));
  }
  const std::array<double, 2> disturbance{disturbance_on ? input_disturbance(p, theta) : 0.0, 0.0};
  const std::array<double, 2> torque{perturbation.upstream, perturbation.downstream};

  for (std::size_t j = 0; j < 2; ++j) {
    const std::size_t k = j + 1;  // roller j sits between span k and k+1
    const double r = radius[j];
    const double balance = (tension[k + 1] - tension[k]) * r +
                           p.gear_ratio[j] * (torque[j] + disturbance[j]) -
                           p.friction[j] / r * speed[k];
    dx(kSpeedUpstream + static_cast<Eigen::Index>(j)) = r / p.inertia[j] * balance;
    dx(kPhaseUpstream + static_cast<Eigen::Index>(j)) = (v_ref[k] + speed[k]) / r;
  }
  return dx;
}

double registration_rate(const SystemParams& p, double tension_upstream_delayed,
                         double tension_print_now) {
  return (p.speed_ref[0] * tension_upstream_delayed - p.speed_ref[1] * tension_print_now) /
         p.stiffness();
}

LinearPlant linearized_plant(const SystemParams& p, double upstream_radius) {
  const double ae = p.stiffness();
  const auto& L = p.span_length;
  const auto& v = p.speed_ref;
  const auto& t = p.tension_ref;
  const std::array<double, 2> r{upstream_radius, p.radius[1]};

  LinearPlant m;
  m.a.setZero();
  m.b.setZero();
  m.a(0, 0) = -v[0] / L[0];
  m.a(0, 3) = (ae - t[0]) / L[0];
  m.a(1, 0) = v[0] / L[1];
  m.a(1, 1) = -v[1] / L[1];
  m.a(1, 3) = (t[0] - ae) / L[1];
  m.a(1, 4) = (ae - t[1]) / L[1];
  m.a(2, 1) = v[1] / L[2];
  m.a(2, 2) = -p.boundary_downstream_speed_ref / L[2];
  m.a(2, 4) = (t[1] - ae) / L[2];
  for (Eigen::Index j = 0; j < 2; ++j) {
    const double rr = r[static_cast<std::size_t>(j)];
    const double jj = p.inertia[static_cast<std::size_t>(j)];
    m.a(3 + j, j) = -rr * rr / jj;
    m.a(3 + j, j + 1) = rr * rr / jj;
    m.a(3 + j, 3 + j) = -p.friction[static_cast<std::size_t>(j)] / jj;
    m.b(3 + j, j) = p.gear_ratio[static_cast<std::size_t>(j)] * rr / jj;
  }
  return m;
}

}  // namespace r2r
