#include <cmath>
#include <random>

#include <doctest.h>

#include "r2r/errors.hpp"
#include "r2r/riccati.hpp"

using namespace r2r;
using doctest::Approx;

namespace {
Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }
}  // namespace

TEST_CASE("scalar riccati with a = 0") {
  const auto s = solve_riccati(scalar(0), scalar(1), scalar(1), scalar(1));
  CHECK(s.p(0, 0) == Approx(1.0).epsilon(1e-12));
  CHECK(s.k(0, 0) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scalar riccati with a = 1") {
  const auto s = solve_riccati(scalar(1), scalar(1), scalar(1), scalar(1));
  CHECK(s.p(0, 0) == Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(1.0 - s.k(0, 0) == Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.residual < 1e-12);
}

TEST_CASE("zero weight on a stable system gives zero cost") {
  Eigen::MatrixXd a(2, 2);
  a << -1, 0.5, 0, -2;
  Eigen::MatrixXd b(2, 1);
  b << 0, 1;
  const auto s = solve_riccati(a, b, Eigen::MatrixXd::Zero(2, 2), scalar(1));
  CHECK(s.p.norm() < 1e-14);
}

TEST_CASE("lyapunov solver") {
  std::mt19937 rng(3);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd a(5, 5);
    for (int i = 0; i < 25; ++i) a.data()[i] = d(rng);
    a -= (spectral_abscissa(a) + 0.5) * Eigen::MatrixXd::Identity(5, 5);
    Eigen::MatrixXd q(5, 5);
    for (int i = 0; i < 25; ++i) q.data()[i] = d(rng);
    q = q * q.transpose();
    const Eigen::MatrixXd x = solve_continuous_lyapunov(a, q);
    CHECK((a * x + x * a.transpose() + q).norm() < 1e-10 * q.norm());
  }
}

TEST_CASE("random stabilizable systems") {
  std::mt19937 rng(11);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(6, 6), b(6, 2);
    for (int i = 0; i < 36; ++i) a.data()[i] = d(rng);
    for (int i = 0; i < 12; ++i) b.data()[i] = d(rng);
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(6, 6);
    const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(2, 2);
    const auto s = solve_riccati(a, b, q, r);
    CHECK(s.residual < 1e-8 * std::max(1.0, s.p.norm()));
    CHECK(spectral_abscissa(a - b * s.k) < 0.0);
  }
}

TEST_CASE("initial gain helper stabilizes") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 0, 2;
  Eigen::MatrixXd b(2, 1);
  b << 0, 1;
  const Eigen::MatrixXd k = stabilizing_gain(a, b);
  CHECK(spectral_abscissa(a - b * k) < 0.0);
}

TEST_CASE("unstabilizable pair is reported") {
  CHECK_THROWS_AS(solve_riccati(scalar(1), scalar(0), scalar(1), scalar(1)), NotStabilizable);
}
