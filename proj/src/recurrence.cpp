#include "r2r/recurrence.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "r2r/errors.hpp"

namespace r2r {

namespace {
constexpr double kMarginalBand = 1e-9;
}

std::pair<std::complex<double>, std::complex<double>> characteristic_roots(double omega1,
                                                                           double omega2) {
  const double b = omega1 + 1.0;
  const double disc = (omega1 - 1.0) * (omega1 - 1.0) + 4.0 * omega2;
  std::complex<double> l1, l2;
  if (disc >= 0.0) {
    // Avoid cancellation: take the larger-magnitude root first, then Vieta.
    const double s = std::sqrt(disc);
    const double big = 0.5 * (b + std::copysign(s, b));
    const double c = omega1 - omega2;
    l1 = big;
    l2 = big != 0.0 ? c / big : 0.5 * (b - std::copysign(s, b));
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    l1 = {0.5 * b, im};
    l2 = {0.5 * b, -im};
  }
  if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
  return {l1, l2};
}

ConvergenceVerdict convergence_verdict(double omega1, double omega2) {
  ConvergenceVerdict v;
  std::tie(v.lambda1, v.lambda2) = characteristic_roots(omega1, omega2);
  v.discriminant = (omega1 - 1.0) * (omega1 - 1.0) + 4.0 * omega2;
  v.case_id = v.discriminant >= 0.0 ? 1 : 2;
  const double m1 = std::abs(v.lambda1);
  const double m2 = std::abs(v.lambda2);
  v.marginal = std::abs(m1 - 1.0) <= kMarginalBand || std::abs(m2 - 1.0) <= kMarginalBand;
  v.converges = !v.marginal && m1 < 1.0 && m2 < 1.0;
  if (v.case_id == 1) {
    v.region_converges = omega2 < 0.0 && 2.0 + 2.0 * omega1 - omega2 > 0.0 &&
                         std::abs(omega1 - omega2) < 1.0;
  } else {
    v.region_converges = omega1 - omega2 < 1.0;
  }
  return v;
}

double recurrence_closed_form(double omega1, double omega2, double e0, double e1, std::size_t j) {
  if (j == 0) return e0;
  if (j == 1) return e1;
  const auto [l1, l2] = characteristic_roots(omega1, omega2);
  const double jd = static_cast<double>(j);
  if (std::abs(l1 - l2) < 1e-10 * std::max(1.0, std::abs(l1))) {
    const std::complex<double> l0 = 0.5 * (l1 + l2);
    // Double root at zero: the recurrence annihilates everything from j = 2.
    if (std::abs(l0) == 0.0) return 0.0;
    const std::complex<double> xi1 = e0;
    const std::complex<double> xi2 = e1 / l0 - e0;
    return std::real((xi1 + xi2 * jd) * std::pow(l0, jd));
  }
  const std::complex<double> xi2 = (e1 - l1 * e0) / (l2 - l1);
  const std::complex<double> xi1 = e0 - xi2;
  return std::real(xi1 * std::pow(l1, jd) + xi2 * std::pow(l2, jd));
}

double recurrence_iterate(double omega1, double omega2, double e0, double e1, std::size_t j) {
  if (j == 0) return e0;
  double prev = e0, cur = e1;
  for (std::size_t k = 1; k < j; ++k) {
    const double next = (omega1 + 1.0) * cur - (omega1 - omega2) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

RecurrenceFit estimate_recurrence_coefficients(std::span<const double> e) {
  if (e.size() < 6) {
    throw DegenerateSeries(fmt::format("need at least 6 values, got {}", e.size()));
  }
  const auto rows = static_cast<Eigen::Index>(e.size() - 2);
  Eigen::MatrixX2d x(rows, 2);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto j = static_cast<std::size_t>(r) + 1;
    x(r, 0) = e[j] - e[j - 1];
    x(r, 1) = e[j - 1];
    y(r) = e[j + 1] - e[j];
  }
  // Column scaling keeps the rank test independent of the units of E.
  const Eigen::Array2d scale = x.colwise().norm().array();
  if (!(scale(0) > 0.0) || !(scale(1) > 0.0)) {
    throw DegenerateSeries("series has no variation");
  }
  const Eigen::MatrixX2d xs = x * scale.inverse().matrix().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixX2d> svd(xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(1) > 1e-8 * sv(0))) {
    throw DegenerateSeries("regressors are collinear; the series does not identify two roots");
  }
  const Eigen::Vector2d coef = svd.solve(y).array() / scale;
  RecurrenceFit fit;
  fit.omega1 = coef(0);
  fit.omega2 = coef(1);
  fit.residual = (x * coef - y).norm();
  fit.triples = static_cast<std::size_t>(rows);
  return fit;
}

}  // namespace r2r
