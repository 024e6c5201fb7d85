#include "r2r/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <fmt/format.h>

#include "r2r/errors.hpp"

namespace r2r {

Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) {
    throw InvalidParams("solve_continuous_lyapunov: dimension mismatch");
  }
  if (n == 0) return Eigen::MatrixXd(0, 0);

  Eigen::ComplexSchur<Eigen::MatrixXd> schur(a);
  const Eigen::MatrixXcd& t = schur.matrixT();
  const Eigen::MatrixXcd& u = schur.matrixU();
  // With A = U T U^*, Y = U^* X U solves T Y + Y T^* = -U^* Q U.
  const Eigen::MatrixXcd f = u.adjoint() * q.cast<std::complex<double>>() * u;
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);

  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    for (Eigen::Index j = n - 1; j >= 0; --j) {
      std::complex<double> rhs = -f(i, j);
      for (Eigen::Index k = i + 1; k < n; ++k) rhs -= t(i, k) * y(k, j);
      for (Eigen::Index k = j + 1; k < n; ++k) rhs -= y(i, k) * std::conj(t(j, k));
      const std::complex<double> pivot = t(i, i) + std::conj(t(j, j));
      if (std::abs(pivot) <= 1e-14 * scale) {
        throw NoSolution("Lyapunov equation is singular (A and -A^T share an eigenvalue)");
      }
      y(i, j) = rhs / pivot;
    }
  }
  const Eigen::MatrixXd x = (u * y * u.adjoint()).real();
  return 0.5 * (x + x.transpose());
}

double spectral_abscissa(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  return solver.eigenvalues().real().maxCoeff();
}

Eigen::MatrixXd stabilizing_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index n = a.rows();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  const double lowest = solver.eigenvalues().real().minCoeff();
  // Shift so that -(A + beta I) is Hurwitz.
  const double beta = std::max(0.0, -lowest) * 1.1 + 0.1 * std::max(1.0, a.norm() / double(n));
  const Eigen::MatrixXd shifted = -(a + beta * Eigen::MatrixXd::Identity(n, n));
  // shifted Z + Z shifted^T + 2 B B^T = 0  <=>  (A+bI) Z + Z (A+bI)^T = 2 B B^T
  const Eigen::MatrixXd z = solve_continuous_lyapunov(shifted, 2.0 * b * b.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(z);
  if (llt.info() != Eigen::Success) {
    throw NotStabilizable("shifted controllability Gramian is not positive definite");
  }
  const Eigen::MatrixXd k = b.transpose() * llt.solve(Eigen::MatrixXd::Identity(n, n));
  if (!(spectral_abscissa(a - b * k) < 0.0)) {
    throw NotStabilizable("shifted-Gramian gain does not stabilize the pair (A, B)");
  }
  return k;
}

double riccati_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                        const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd r_inv_bt = r.ldlt().solve(b.transpose());
  return (a.transpose() * p + p * a - p * b * r_inv_bt * p + q).norm();
}

RiccatiSolution solve_riccati(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                              const RiccatiOptions& options) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n || r.rows() != m ||
      r.cols() != m) {
    throw InvalidParams("solve_riccati: dimension mismatch");
  }
  Eigen::LDLT<Eigen::MatrixXd> r_ldlt(r);
  if (r_ldlt.info() != Eigen::Success || !r_ldlt.isPositive() ||
      r_ldlt.vectorD().minCoeff() <= 0.0) {
    throw InvalidParams("R must be positive definite");
  }
  const Eigen::MatrixXd r_inv_bt = r_ldlt.solve(b.transpose());

  Eigen::MatrixXd k;
  if (options.initial_gain && spectral_abscissa(a - b * *options.initial_gain) < 0.0) {
    k = *options.initial_gain;
  } else if (spectral_abscissa(a) < 0.0) {
    k = Eigen::MatrixXd::Zero(m, n);
  } else {
    k = stabilizing_gain(a, b);
  }

  RiccatiSolution out;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXd closed = a - b * k;
    // closed^T P + P closed + Q + K^T R K = 0
    const Eigen::MatrixXd next =
        solve_continuous_lyapunov(closed.transpose(), q + k.transpose() * r * k);
    const double change = (next - p).norm();
    p = next;
    k = r_inv_bt * p;
    out.iterations = it;
    if (change <= options.tolerance * std::max(1.0, p.norm())) {
      out.p = p;
      out.k = k;
      out.residual = riccati_residual(a, b, q, r, p);
      return out;
    }
  }
  throw NoConvergence(
      fmt::format("Newton-Kleinman did not converge in {} iterations", options.max_iterations));
}

}  // namespace r2r
