#pragma once

#include <optional>
#include <vector>

#include "pkreg/matrix.hpp"

namespace pkreg::linalg {

/// Thin SVD factors: a = left * diag(singulars) * right^T with
/// left (m x k) and right (n x k) having orthonormal columns, k = min(m, n),
/// singular values sorted nonincreasing.
struct SvdFactors {
  Matrix left;
  std::vector<double> singulars;
  Matrix right;
};

/// One-sided Jacobi SVD. Deterministic for a fixed input; handles m != n by
/// working on the transpose when rows < cols.
SvdFactors svd(const Matrix& a);

/// Default rank/pseudo-inverse cutoff: max(m, n) * sigma_max * machine epsilon.
double pinv_cutoff(const Matrix& a, const std::vector<double>& singulars);

/// Moore-Penrose pseudo-inverse. Singular values at or below the cutoff are
/// treated as exactly zero.
Matrix pinv(const Matrix& a, std::optional<double> tol = std::nullopt);

/// Number of singular values above the cutoff.
std::size_t rank(const Matrix& a, std::optional<double> tol = std::nullopt);

/// pinv(a) * y computed from the SVD factors without forming pinv(a).
std::vector<double> pinv_apply(const Matrix& a, const std::vector<double>& y,
                               std::optional<double> tol = std::nullopt);

/// Solve (a + shift I) c = y for symmetric positive semidefinite a.
/// Cholesky with iterative refinement, falling back to a pseudo-inverse solve;
/// no residual gate (ill-conditioned kernel systems are solved as well as
/// double precision allows and left to validation).
std::vector<double> ridge_solve_psd(const Matrix& a, double shift,
                                    const std::vector<double>& y);

/// Solve (a + lambda_eff * I) c = y for symmetric a. Cholesky with iterative
/// refinement; falls back to a pseudo-inverse solve when the shifted matrix is
/// not numerically positive definite. With lambda_eff = 0 and singular a the
/// result is the minimum-norm least-squares solution pinv(a) * y; otherwise a
/// residual above 1e-6 * ||y|| raises NumericalError.
std::vector<double> solve_ridge(const Matrix& a, double lambda_eff,
                                const std::vector<double>& y);

/// All eigenvalues of a symmetric matrix, ascending. Householder
/// tridiagonalization followed by implicit-shift QL.
std::vector<double> sym_eigenvalues(const Matrix& a);

/// Smallest eigenvalue of a symmetric matrix.
double min_eig_sym(const Matrix& a);

/// Factored form a = Q T Q^T (T tridiagonal) of a symmetric matrix, kept to
/// solve (a + shift I) x = y repeatedly for many shifts. Intended for
/// positive semidefinite a with shift > 0; the tridiagonal solve uses the
/// Thomas algorithm on T + shift I.
class TridiagonalShiftSolver {
public:
  explicit TridiagonalShiftSolver(Matrix a);

  std::vector<double> solve(double shift, const std::vector<double>& y) const;

  std::size_t size() const { return n_; }

private:
  void apply_q_transpose(std::vector<double>& x) const;
  void apply_q(std::vector<double>& x) const;

  std::size_t n_ = 0;
  std::vector<double> diag_;
  std::vector<double> offdiag_;
  // Householder reflectors, reflector k acts on rows k+1..n-1.
  std::vector<std::vector<double>> vs_;
  std::vector<double> betas_;
};

}  // namespace pkreg::linalg
