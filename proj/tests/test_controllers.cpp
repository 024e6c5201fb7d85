#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <doctest.h>

#include "r2r/controller.hpp"
#include "r2r/errors.hpp"
#include "r2r/riccati.hpp"
#include "r2r/simulation.hpp"

using namespace r2r;
using doctest::Approx;

TEST_CASE("pid presets reproduce the published gains") {
  const PidGains a = pid_preset_a();
  CHECK(a.kp == Pair{-0.1916, 0.0});
  CHECK(a.ki == Pair{-0.0767, 0.0});
  CHECK(a.kd == Pair{-0.0038, -0.1916});
  const PidGains b = pid_preset_b();
  CHECK(b.kp == a.kp);
  CHECK(b.ki == Pair{-0.0575, 0.0});
  CHECK(b.kd == a.kd);
  const PidGains c = pid_preset_c();
  CHECK(c.kp == Pair{-0.3832, 0.0});
  CHECK(c.ki == b.ki);
  CHECK(c.kd == a.kd);
  CHECK(pid_preset("b") == b);
  CHECK_FALSE(pid_preset("z").has_value());
}

TEST_CASE("pid control law") {
  const PidGains a = pid_preset_a();
  CHECK(pid_control(a, {0, 0}, {0, 0}, {0, 0}) == 0.0);
  CHECK(pid_control(a, {1, 0}, {0, 0}, {0, 0}) == Approx(-0.1916));
  CHECK(pid_control(a, {0, 0}, {0, 0}, {0, 1}) == Approx(-0.1916));
  CHECK(pid_control(a, {0, 0}, {2, 0}, {0, 0}) == Approx(-0.1534));
}

TEST_CASE("pid loop integrates left-rectangle and differentiates backward") {
  PidGains g;
  g.ki = {1.0, 0.0};
  PidLoop integ(g);
  CHECK(integ.update({2.0, 0.0}, 0.5) == 0.0);  // integral still empty
  CHECK(integ.update({4.0, 0.0}, 0.5) == Approx(1.0));
  CHECK(integ.integral()[0] == Approx(3.0));

  PidGains d;
  d.kd = {1.0, 0.0};
  PidLoop diff(d);
  CHECK(diff.update({5.0, 0.0}, 0.1) == 0.0);  // no previous sample
  CHECK(diff.update({6.0, 0.0}, 0.1) == Approx(10.0));
}

TEST_CASE("backward difference tracks the derivative at first order") {
  PidGains d;
  d.kd = {1.0, 0.0};
  const auto worst_error = [&](double dt) {
    PidLoop loop(d);
    double worst = 0.0;
    for (int i = 0; i * dt < 10.0; ++i) {
      const double t = i * dt;
      const double out = loop.update({std::sin(t), 0.0}, dt);
      if (i > 0) worst = std::max(worst, std::abs(out - std::cos(t)));
    }
    return worst;
  };
  const double e1 = worst_error(1e-2), e2 = worst_error(5e-3);
  CHECK(e1 < 1e-2);
  CHECK(e1 / e2 == Approx(2.0).epsilon(0.05));
}

TEST_CASE("cosine basis table") {
  const auto b = cosine_basis(20);
  REQUIRE(b.size() == 20);
  CHECK(b[0] == Approx(std::cos(std::numbers::pi / 20)));
  for (double v : b) CHECK(std::abs(v) <= 1.0);
  CHECK(basis_bin(0.0, 20) == 0);
  CHECK(basis_bin(2 * std::numbers::pi - 1e-12, 20) == 19);
  CHECK(basis_bin(-0.1, 20) == 19);
  CHECK_THROWS_AS(cosine_basis(0), InvalidParams);
}

TEST_CASE("stilc output and update") {
  StilcController s = StilcController::cosine(5000.0);
  for (double th : {0.0, 1.0, 4.0}) CHECK(s.output(th) == 0.0);
  s.update(2e-4);
  CHECK(s.xi() == Approx(1.0));
  CHECK(s.output(0.0) == Approx(0.987688).epsilon(1e-6));
  CHECK(s.output(1.3) == s.output(1.3 + 2 * std::numbers::pi));
  s.update(-2e-4);
  CHECK(s.xi() == 0.0);

  StilcController off = StilcController::cosine(0.0);
  off.update(3.0);
  CHECK(off.xi() == 0.0);
  CHECK_THROWS_AS(off.update(std::nan("")), NonFiniteState);
  CHECK(s.terminal_error(3.0) == 3.0);
  StilcController targeted = StilcController::cosine(1.0, 20, 1.0);
  CHECK(targeted.terminal_error(3.0) == 2.0);
}

TEST_CASE("stilc coefficient telescopes over the errors") {
  StilcController s = StilcController::cosine(5000.0);
  const double errors[] = {1e-8, -3e-9, 2.5e-9, 7e-10};
  double sum = 0.0;
  for (double e : errors) {
    s.update(e);
    sum += e;
  }
  CHECK(s.xi() == Approx(5000.0 * sum).epsilon(1e-14));
}

TEST_CASE("controller presets") {
  for (const auto& name : preset_names()) CHECK(controller_preset(name).has_value());
  CHECK_FALSE(controller_preset("pid-d").has_value());
  CHECK_FALSE(controller_preset("stilc-open-loop").has_value());
  const auto s = *controller_preset("stilc-pid");
  CHECK(s.feedback == FeedbackKind::kPid);
  CHECK(s.pid == pid_preset_a());
  REQUIRE(s.stilc.has_value());
  CHECK(s.stilc->learning_gain == 5000.0);
  CHECK(s.stilc->basis_steps == 20);
  CHECK(s.stilc->channel == StilcChannel::kUpstream);
  CHECK(*controller_preset("stilc-pid-a") == [&] {
    auto t = s;
    t.preset = "stilc-pid-a";
    return t;
  }());
  CHECK_FALSE(controller_preset("pid-c")->stilc.has_value());
  CHECK(controller_preset("stilc-lqr")->feedback == FeedbackKind::kLqr);
}

TEST_CASE("hybrid control composition") {
  const SystemParams p;
  const Torques ol{equilibrium_input(p, Roller::kUpstream), equilibrium_input(p, Roller::kDownstream)};
  const Torques u = hybrid_control(ol, {}, nullptr, 0.0);
  CHECK(u.upstream == Approx(0.28766).epsilon(1e-4));
  CHECK(u.downstream == Approx(0.28766).epsilon(1e-4));

  StilcController s = StilcController::cosine(1.0);
  s.update(1.0);
  const Torques v = hybrid_control(ol, {}, &s, 2.0);
  CHECK(v.upstream - ol.upstream == Approx(cosine_basis(20)[basis_bin(2.0, 20)]));
  CHECK(v.downstream == ol.downstream);

  StilcController both = StilcController::cosine(1.0, 20, 0.0, StilcChannel::kBoth);
  both.update(1.0);
  const Torques w = hybrid_control(ol, {0.1, 0.2}, &both, 2.0);
  CHECK(w.downstream - ol.downstream == Approx(0.2 + cosine_basis(20)[basis_bin(2.0, 20)]));
}

TEST_CASE("an inert learning part leaves the pid trajectory untouched") {
  SimConfig c;
  c.iterations = 3;
  ControllerSpec learn = *controller_preset("stilc-pid-a");
  learn.stilc->learning_gain = 0.0;
  const auto a = run_experiment(SystemParams{}, c, learn).terminal_errors();
  const auto b = run_experiment(SystemParams{}, c, *controller_preset("pid-a")).terminal_errors();
  CHECK(a == b);
}

TEST_CASE("nominal matrices") {
  const NominalModel m = build_nominal_matrices(SystemParams{});
  CHECK(m.a(0, 0) == Approx(-0.16 / 2.4));
  CHECK(m.a(3, 0) == Approx(-0.381 * 0.381 / 0.146));
  CHECK(m.b(3, 0) == Approx(0.381 / 0.146));
  CHECK(m.a(0, 3) == Approx((2401.4382 - 20.0) / 2.4).epsilon(1e-8));
  Eigen::Matrix<double, 5, 1> x;
  x << 1, 2, 3, 4, 5;
  CHECK(m.c * x == Eigen::Vector2d(1, 2));

  SystemParams still;
  still.speed_ref = {0.0, 0.0};
  still.boundary_downstream_speed_ref = 0.0;
  const NominalModel z = build_nominal_matrices(still);
  for (int i = 0; i < 3; ++i) CHECK(z.a(i, i) == 0.0);
}

TEST_CASE("lqr design on the published system") {
  const LqrDesign d = design_lqr(SystemParams{});
  CHECK(d.riccati_residual < 1e-8);
  CHECK(d.closed_loop_abscissa < 0.0);
  CHECK((d.p - d.p.transpose()).norm() <= 1e-9 * d.p.norm());
  CHECK(Eigen::LLT<Matrix7d>(d.p).info() == Eigen::Success);
  CHECK(d.q.diagonal() == (Eigen::Matrix<double, 7, 1>() << 10, 10, 1, 1, 1, 100, 100).finished());
  CHECK(d.r.diagonal() == Eigen::Vector2d(5, 5));
}

TEST_CASE("lqr control law") {
  const LqrDesign d = design_lqr(SystemParams{});
  CHECK(lqr_control(d, PerturbationVector::Zero(), Eigen::Vector2d::Zero()).norm() == 0.0);
  PerturbationVector x;
  x << 0.3, -0.2, 0.1, 1e-4, -2e-4;
  const Eigen::Vector2d z(0.05, -0.02);
  CHECK((lqr_control(d, 2 * x, 2 * z) - 2 * lqr_control(d, x, z)).norm() < 1e-12);

  const RiccatiSolution s = solve_riccati(Eigen::MatrixXd::Constant(1, 1, 1.0),
                                          Eigen::MatrixXd::Constant(1, 1, 1.0),
                                          Eigen::MatrixXd::Constant(1, 1, 1.0),
                                          Eigen::MatrixXd::Constant(1, 1, 1.0));
  CHECK(-s.k(0, 0) * 1.0 == Approx(-2.414214).epsilon(1e-6));
}

TEST_CASE("lqr loop integrates the negative tension error") {
  LqrLoop loop(design_lqr(SystemParams{}));
  PlantState s;
  s.x(kTensionUpstream) = 1.0;
  s.x(kTensionPrint) = 2.0;
  loop.update(s, 0.5);
  CHECK(loop.integral()(0) == Approx(-0.5));
  CHECK(loop.integral()(1) == Approx(-1.0));
}
