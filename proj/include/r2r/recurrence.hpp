#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>

namespace r2r {

/// Roots of lambda^2 - (omega1 + 1) lambda + (omega1 - omega2) = 0, ordered
/// with the larger modulus first.
std::pair<std::complex<double>, std::complex<double>> characteristic_roots(double omega1,
                                                                           double omega2);

struct ConvergenceVerdict {
  std::complex<double> lambda1, lambda2;
  bool converges = false;  // both |lambda| < 1, never set for marginal roots
  bool marginal = false;   // some |lambda| within 1e-9 of 1
  int case_id = 1;         // 1: real roots, 2: complex pair
  double discriminant = 0.0;  // (omega1 - 1)^2 + 4 omega2
  bool region_converges = false;  // closed-form region test
};

/// Root-modulus verdict plus the closed-form stability region:
///   real roots:    omega2 < 0, 2 + 2 omega1 - omega2 > 0, |omega1 - omega2| < 1
///   complex roots: omega1 - omega2 < 1
ConvergenceVerdict convergence_verdict(double omega1, double omega2);

/// Closed-form E_j of E_{j+1} = (omega1 + 1) E_j - (omega1 - omega2) E_{j-1}.
double recurrence_closed_form(double omega1, double omega2, double e0, double e1, std::size_t j);

/// Direct iteration of the same recurrence (oracle for the closed form).
double recurrence_iterate(double omega1, double omega2, double e0, double e1, std::size_t j);

struct RecurrenceFit {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double residual = 0.0;  // 2-norm of the least-squares residual
  std::size_t triples = 0;
};

/// Least-squares fit of E_{j+1} - E_j = omega1 (E_j - E_{j-1}) + omega2 E_{j-1}
/// over all consecutive triples. Needs at least 6 values; throws
/// DegenerateSeries when the regressors are (numerically) collinear, which
/// includes constant and purely geometric series.
RecurrenceFit estimate_recurrence_coefficients(std::span<const double> series);

}  // namespace r2r
