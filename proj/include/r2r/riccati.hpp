#pragma once

#include <optional>

#include <Eigen/Core>

namespace r2r {

/// Solves A X + X A^T + Q = 0 by the Bartels-Stewart method on the complex
/// Schur form of A. Throws NoSolution when A and -A^T share an eigenvalue.
Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// Gain K with A - B K Hurwitz, built from the shifted Lyapunov equation
/// (A + beta I) Z + Z (A + beta I)^T = 2 B B^T, K = B^T Z^-1 (Bass).
/// Throws NotStabilizable when Z is not positive definite.
Eigen::MatrixXd stabilizing_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct RiccatiOptions {
  int max_iterations = 100;
  double tolerance = 1e-12;                     // relative change of P
  std::optional<Eigen::MatrixXd> initial_gain;  // used if it stabilizes A - B K
};

struct RiccatiSolution {
  Eigen::MatrixXd p;
  Eigen::MatrixXd k;  // R^-1 B^T P
  int iterations = 0;
  double residual = 0.0;  // Frobenius norm of the Riccati residual
};

/// Stabilizing solution of A^T P + P A - P B R^-1 B^T P + Q = 0 by
/// Newton-Kleinman iteration. Throws NotStabilizable if no stabilizing
/// initial gain can be found and NoConvergence if the iteration stalls.
RiccatiSolution solve_riccati(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                              const RiccatiOptions& options = {});

double riccati_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                        const Eigen::MatrixXd& p);

/// Largest real part among the eigenvalues of `a`.
double spectral_abscissa(const Eigen::MatrixXd& a);

}  // namespace r2r
