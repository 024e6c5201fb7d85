#include "r2r/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "r2r/errors.hpp"
#include "r2r/lqr.hpp"
#include "r2r/stilc.hpp"

namespace r2r {

void LtvProfile::check() const {
  const std::size_t n = n_steps;
  if (n == 0) throw InvalidParams("profile has no bins");
  if (a.size() != n || b.size() != n || b_dist.size() != n || c2.size() != n || c1.size() != n ||
      u_dist.size() != n || phi.size() != n) {
    throw InvalidParams("profile arrays must all have n_steps entries");
  }
  const Eigen::Index d = dim();
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k].rows() != d || a[k].cols() != d || b[k].size() != d || b_dist[k].size() != d ||
        c2[k].size() != d || c1[k].size() != d) {
      throw InvalidParams(fmt::format("profile bin {} has inconsistent dimensions", k));
    }
  }
}

// ---------------------------------------------------------------------------
// Continuous closed loops

ClosedLoopModel closed_loop_open(const SystemParams& params, double upstream_radius) {
  const LinearPlant plant = linearized_plant(params, upstream_radius);
  return {plant.a, plant.b};
}

ClosedLoopModel closed_loop_pid(const SystemParams& params, const PidGains& g,
                                double upstream_radius) {
  const LinearPlant plant = linearized_plant(params, upstream_radius);
  // Roller j measures (T, V) at these plant indices.
  const std::array<std::array<int, 2>, 2> measured{{{0, 3}, {1, 4}}};
  // Integrators with a zero gain never feed back; leaving them out keeps
  // spurious zero eigenvalues out of the stability check.
  int n = 5;
  for (int j = 0; j < 2; ++j) {
    for (int m = 0; m < 2; ++m) n += g.ki[static_cast<std::size_t>(m)] != 0.0 ? 1 : 0;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.topLeftCorner<5, 5>() = plant.a;
  Eigen::MatrixXd kx = Eigen::MatrixXd::Zero(2, n);
  Eigen::MatrixXd kd = Eigen::MatrixXd::Zero(2, n);
  int integ = 5;
  for (int j = 0; j < 2; ++j) {
    for (int m = 0; m < 2; ++m) {
      const auto mm = static_cast<std::size_t>(m);
      const int s = measured[static_cast<std::size_t>(j)][mm];
      kx(j, s) = g.kp[mm];
      kd(j, s) = g.kd[mm];
      if (g.ki[mm] != 0.0) {
        a(integ, s) = 1.0;
        kx(j, integ) = g.ki[mm];
        ++integ;
      }
    }
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 2);
  b.topRows<5>() = plant.b;
  // x' = A x + B (Kx x + Kd x' + u)  =>  (I - B Kd) x' = (A + B Kx) x + B u
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - b * kd;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  return {lu.solve(a + b * kx), lu.solve(b)};
}

ClosedLoopModel closed_loop_lqr(const SystemParams& params, const LqrDesign& design,
                                double upstream_radius) {
  const LinearPlant plant = linearized_plant(params, upstream_radius);
  NominalModel local = design.nominal;
  local.a = plant.a;
  local.b = plant.b;
  const AugmentedModel aug = augment_with_integrals(local);
  return {aug.a - aug.b * design.k, aug.b};
}

ClosedLoopModel closed_loop_model(const SystemParams& params, const ControllerSpec& spec,
                                  double upstream_radius) {
  switch (spec.feedback) {
    case FeedbackKind::kOpenLoop: return closed_loop_open(params, upstream_radius);
    case FeedbackKind::kPid: return closed_loop_pid(params, spec.pid, upstream_radius);
    case FeedbackKind::kLqr:
      return closed_loop_lqr(params, design_lqr(params, spec.lqr), upstream_radius);
  }
  throw InvalidParams("unknown feedback kind");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_discretize(const Eigen::MatrixXd& a,
                                                           const Eigen::MatrixXd& b, double dt) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = a * dt;
  block.topRightCorner(n, m) = b * dt;
  const Eigen::MatrixXd e = block.exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

// ---------------------------------------------------------------------------
// Profile

namespace {

LtvProfile discretize_with(const SystemParams& params, const ControllerSpec& spec,
                           std::size_t n_steps, const LqrDesign* lqr) {
  params.validate();
  if (n_steps == 0) throw InvalidParams("analysis needs at least one bin");
  const StilcSettings basis_settings = spec.stilc.value_or(StilcSettings{});
  const std::vector<double> basis = cosine_basis(basis_settings.basis_steps);

  LtvProfile p;
  p.n_steps = n_steps;
  p.dtheta = 2.0 * std::numbers::pi / static_cast<double>(n_steps);
  const double dtau_dtheta = params.radius[0] / params.speed_ref[0];
  p.dtau_equiv = p.dtheta * dtau_dtheta;
  p.phase0 = params.upstream_phase0;

  const double ae = params.stiffness();
  Eigen::Vector2d channel = Eigen::Vector2d::Zero();
  if (basis_settings.channel != StilcChannel::kDownstream) channel(0) = 1.0;
  if (basis_settings.channel != StilcChannel::kUpstream) channel(1) = 1.0;

  const double u_nominal = equilibrium_input(params, Roller::kUpstream);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double theta = p.phase0 + (static_cast<double>(k) + 0.5) * p.dtheta;
    const double radius = effective_radius(params, theta);
    if (!(radius > 0.0)) {
      throw NonPositiveRadius(fmt::format("effective radius {} m at phase {} rad", radius, theta));
    }
    const ClosedLoopModel cl = lqr != nullptr ? closed_loop_lqr(params, *lqr, radius)
                                              : closed_loop_model(params, spec, radius);
    const Eigen::VectorXcd eig = cl.a.eigenvalues();
    const double abscissa = eig.real().maxCoeff();
    if (abscissa > 1e-12 * std::max(1.0, cl.a.norm())) {
      throw UnstablePreset(fmt::format(
          "closed loop of preset '{}' has an eigenvalue with real part {} at phase {} rad",
          spec.preset, abscissa, theta));
    }
    auto [ad, bd] = zoh_discretize(cl.a, cl.b, p.dtau_equiv);
    const Eigen::Index n = ad.rows();
    p.a.push_back(ad);
    p.b.push_back(bd * channel);
    p.b_dist.push_back(bd.col(0));

    Eigen::RowVectorXd c2 = Eigen::RowVectorXd::Zero(n);
    Eigen::RowVectorXd c1 = Eigen::RowVectorXd::Zero(n);
    c2(kTensionPrint) = -params.speed_ref[1] / ae * dtau_dtheta;
    c1(kTensionUpstream) = params.speed_ref[0] / ae * dtau_dtheta;
    p.c2.push_back(c2);
    p.c1.push_back(c1);

    p.u_dist.push_back(params.eccentricity == 0.0
                           ? 0.0
                           : u_nominal - varying_equilibrium_input(params, theta));
    p.phi.push_back(basis[basis_bin(theta, basis.size())]);
  }
  return p;
}

}  // namespace

LtvProfile discretize_closed_loop(const SystemParams& params, const ControllerSpec& spec,
                                  std::size_t n_steps) {
  if (spec.feedback == FeedbackKind::kLqr) {
    const LqrDesign design = design_lqr(params, spec.lqr);
    return discretize_with(params, spec, n_steps, &design);
  }
  return discretize_with(params, spec, n_steps, nullptr);
}

LtvProfile discretize_closed_loop(const SystemParams& params, const PidGains& gains,
                                  std::size_t n_steps) {
  ControllerSpec spec;
  spec.preset = "custom-pid";
  spec.feedback = FeedbackKind::kPid;
  spec.pid = gains;
  return discretize_closed_loop(params, spec, n_steps);
}

// ---------------------------------------------------------------------------
// Recursions

RecursionResult run_recursions(const LtvProfile& p) {
  p.check();
  const Eigen::Index d = p.dim();
  RecursionResult r;
  r.g.reserve(p.n_steps + 1);
  r.h.reserve(p.n_steps + 1);
  r.h_d.reserve(p.n_steps + 1);
  r.g.push_back(Eigen::MatrixXd::Identity(d, d));
  r.h.push_back(Eigen::VectorXd::Zero(d));
  r.h_d.push_back(Eigen::VectorXd::Zero(d));
  for (std::size_t k = 0; k < p.n_steps; ++k) {
    r.g.push_back(p.a[k] * r.g[k]);
    r.h.push_back(p.a[k] * r.h[k] + p.b[k] * p.phi[k]);
    r.h_d.push_back(p.a[k] * r.h_d[k] + p.b_dist[k] * p.u_dist[k]);
  }
  return r;
}

std::vector<Eigen::VectorXd> simulate_profile(const LtvProfile& p, const Eigen::VectorXd& x0,
                                              double xi) {
  p.check();
  if (x0.size() != p.dim()) throw InvalidParams("initial state has the wrong dimension");
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(p.n_steps + 1);
  xs.push_back(x0);
  for (std::size_t k = 0; k < p.n_steps; ++k) {
    xs.push_back(p.a[k] * xs[k] + p.b[k] * (p.phi[k] * xi) + p.b_dist[k] * p.u_dist[k]);
  }
  return xs;
}

double transition_mismatch(const LtvProfile& p, const RecursionResult& rec,
                           const Eigen::VectorXd& x0, double xi) {
  const auto xs = simulate_profile(p, x0, xi);
  double worst = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Eigen::VectorXd recon = rec.g[k] * x0 + rec.h[k] * xi + rec.h_d[k];
    const double scale = std::max(xs[k].norm(), std::numeric_limits<double>::min());
    worst = std::max(worst, (recon - xs[k]).norm() / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Iteration-domain coefficients

namespace {

// Outputs are integrated per bin with the bin-average state, so bin k-1
// contributes c(k-1) (x(k-1) + x(k)) / 2 dtheta.
template <typename Vec>
Vec bin_average(const std::vector<Vec>& xs, std::size_t k) {
  return 0.5 * (xs[k - 1] + xs[k]);
}

}  // namespace

GainSlopes gain_slopes(const LtvProfile& p, const RecursionResult& rec) {
  GainSlopes s;
  for (std::size_t k = 1; k <= p.n_steps; ++k) {
    const Eigen::VectorXd h = bin_average(rec.h, k);
    const double c2h = p.c2[k - 1].dot(h);
    const double c1h = p.c1[k - 1].dot(h);
    s.beta += c2h;
    s.gamma += c2h + c1h;
  }
  s.beta *= p.dtheta;
  s.gamma *= p.dtheta;
  return s;
}

OmegaCoefficients compute_omegas(const LtvProfile& p, const RecursionResult& rec,
                                 double learning_gain, const Eigen::VectorXd& x0_current,
                                 const Eigen::VectorXd& x0_previous, double target) {
  const Eigen::Index d = p.dim();
  const Eigen::VectorXd xc = x0_current.size() == 0 ? Eigen::VectorXd::Zero(d) : x0_current;
  const Eigen::VectorXd xp = x0_previous.size() == 0 ? Eigen::VectorXd::Zero(d) : x0_previous;
  if (xc.size() != d || xp.size() != d) throw InvalidParams("initial state has the wrong dimension");

  const GainSlopes s = gain_slopes(p, rec);
  double free = 0.0;
  for (std::size_t k = 1; k <= p.n_steps; ++k) {
    const auto& c2 = p.c2[k - 1];
    const auto& c1 = p.c1[k - 1];
    const Eigen::MatrixXd g = bin_average(rec.g, k);
    free += c2.dot(g * xc) + c1.dot(g * xp) + (c2 + c1).dot(bin_average(rec.h_d, k));
  }
  OmegaCoefficients o;
  o.learning_gain = learning_gain;
  o.omega1 = s.beta * learning_gain;
  o.omega2 = s.gamma * learning_gain;
  o.omega3 = free * p.dtheta - target;
  return o;
}

double critical_gain(double a, double b, double c) {
  // (a L - 1)^2 + 4 (b L + c) = 0  <=>  a^2 L^2 + (4b - 2a) L + (1 + 4c) = 0
  const double qa = a * a;
  const double qb = 4.0 * b - 2.0 * a;
  const double qc = 1.0 + 4.0 * c;
  std::vector<double> roots;
  if (qa == 0.0) {
    if (qb != 0.0) roots.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      const double q = -0.5 * (qb + std::copysign(s, qb));
      roots.push_back(q / qa);
      if (q != 0.0) roots.push_back(qc / q);
    }
  }
  std::optional<double> best;
  for (double l : roots) {
    if (!(b * l + c < 0.0)) continue;
    if (!best || std::abs(l) < std::abs(*best)) best = l;
  }
  if (!best) {
    throw NoSolution("no learning gain makes the recurrence critically damped with Omega2 < 0");
  }
  return *best;
}

double critical_gain(const LtvProfile& p, const RecursionResult& rec) {
  const GainSlopes s = gain_slopes(p, rec);
  return critical_gain(s.beta, s.gamma, 0.0);
}

Feasibility learning_feasibility(const LtvProfile& p, const RecursionResult& rec, double target,
                                 double tolerance) {
  p.check();
  const std::size_t n = p.n_steps;
  // Weight of state x(k) in the terminal output: half of each adjacent bin row.
  const auto weight = [&](std::size_t k) {
    Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(p.dim());
    if (k > 0) w += p.c2[k - 1] + p.c1[k - 1];
    if (k < n) w += p.c2[k] + p.c1[k];
    return Eigen::RowVectorXd(0.5 * p.dtheta * w);
  };
  // Adjoint sweep q(k) = w(k) + q(k+1) A(k); input bin m enters x(m+1) through B(m).
  Feasibility f;
  f.response = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::RowVectorXd q = weight(n);
  for (std::size_t m = n; m-- > 0;) {
    f.response(static_cast<Eigen::Index>(m)) = q.dot(p.b[m]);
    if (m > 0) q = weight(m) + q * p.a[m];
  }
  const Eigen::Map<const Eigen::VectorXd> phi(p.phi.data(), static_cast<Eigen::Index>(n));
  f.n_phi = f.response.dot(phi);
  f.feasible = std::abs(f.n_phi) > tolerance * f.response.norm() * phi.norm();
  if (f.feasible) {
    double disturbance = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      disturbance += (p.c2[k - 1] + p.c1[k - 1]).dot(bin_average(rec.h_d, k));
    }
    f.xi_star = -(disturbance * p.dtheta - target) / f.n_phi;
  }
  return f;
}

std::vector<GainGridRow> gain_grid(const LtvProfile& p, const RecursionResult& rec,
                                   const std::vector<double>& gains) {
  std::vector<GainGridRow> rows;
  rows.reserve(gains.size());
  for (double g : gains) {
    const OmegaCoefficients o = compute_omegas(p, rec, g);
    rows.push_back({g, o, convergence_verdict(o.omega1, o.omega2)});
  }
  return rows;
}

}  // namespace r2r
