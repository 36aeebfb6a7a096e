#include "pkreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace pkreg::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxJacobiSweeps = 60;
constexpr int kMaxQlIterations = 60;

std::string shape_of(const Matrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

void require_symmetric(const Matrix& a, const char* what) {
  if (a.rows() != a.cols())
    throw DimensionError(std::string(what) + ": matrix is not square (" + shape_of(a) + ")");
  const double tol = 1e-10 * std::max(1.0, a.max_abs());
  if (a.max_asymmetry() > tol)
    throw DimensionError(std::string(what) + ": matrix is not symmetric within tolerance");
}

// Householder vector for x: returns beta and alpha with H x = alpha e1,
// v normalized so v[0] = 1.
double house_vector(std::vector<double>& v, double& alpha) {
  double sigma = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) sigma += v[i] * v[i];
  alpha = v[0];
  if (sigma == 0.0) {
    v[0] = 1.0;
    return 0.0;
  }
  const double mu = std::sqrt(v[0] * v[0] + sigma);
  const double v0 = v[0] <= 0.0 ? v[0] - mu : -sigma / (v[0] + mu);
  const double beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
  const double inv = 1.0 / v0;
  v[0] = 1.0;
  for (std::size_t i = 1; i < v.size(); ++i) v[i] *= inv;
  alpha = mu;
  return beta;
}

// Thin Householder QR of a tall matrix (rows >= cols). R lands in the top
// n x n block of `a`; the reflectors are returned for applying Q later.
struct QrFactors {
  std::vector<std::vector<double>> vs;
  std::vector<double> betas;
};

QrFactors householder_qr(Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  QrFactors qr;
  std::vector<double> v, w;
  for (std::size_t k = 0; k < n && k + 1 < m; ++k) {
    v.assign(m - k, 0.0);
    for (std::size_t i = k; i < m; ++i) v[i - k] = a(i, k);
    double alpha = 0.0;
    const double beta = house_vector(v, alpha);
    if (beta != 0.0) {
      // apply H = I - beta v v^T to columns k..n-1
      w.assign(n - k, 0.0);
      for (std::size_t i = k; i < m; ++i) {
        const double vi = v[i - k];
        if (vi == 0.0) continue;
        const double* row = &a(i, k);
        for (std::size_t j = 0; j < n - k; ++j) w[j] += vi * row[j];
      }
      for (double& x : w) x *= beta;
      for (std::size_t i = k; i < m; ++i) {
        const double vi = v[i - k];
        if (vi == 0.0) continue;
        double* row = &a(i, k);
        for (std::size_t j = 0; j < n - k; ++j) row[j] -= vi * w[j];
      }
    }
    a(k, k) = alpha;
    for (std::size_t i = k + 1; i < m; ++i) a(i, k) = 0.0;
    qr.vs.push_back(std::move(v));
    qr.betas.push_back(beta);
  }
  return qr;
}

// SVD of a tall matrix (rows >= cols): Householder QR first, then one-sided
// Jacobi on the small triangular factor. The preconditioning keeps the sweep
// count low on heavily graded columns (kernel matrices at large degree).
// Jacobi works on the transposed copy so rotations touch contiguous memory.
SvdFactors svd_tall(const Matrix& a_in) {
  const std::size_t m = a_in.rows();
  const std::size_t n = a_in.cols();

  Matrix qra = a_in;
  const QrFactors qr = householder_qr(qra);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = qra(i, j);

  Matrix wt = a.transpose();    // n x n, row j = column j of R
  Matrix vt = Matrix::identity(n);  // rows = right singular vectors

  const double orth_tol = 1e-14;
  // Columns whose norm falls below eps * ||A||_F carry singular values under
  // every cutoff; treating them as zero also keeps exactly parallel columns
  // (duplicate points) from cycling forever at ratio one.
  const double negligible = kEps * kEps * wt.frobenius_norm() * wt.frobenius_norm();
  bool converged = false;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto wp = wt.row(p);
        auto wq = wt.row(q);
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += wp[i] * wp[i];
          beta += wq[i] * wq[i];
          gamma += wp[i] * wq[i];
        }
        if (alpha <= negligible || beta <= negligible || gamma == 0.0) continue;
        if (std::abs(gamma) <= orth_tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double xp = wp[i], xq = wq[i];
          wp[i] = c * xp - s * xq;
          wq[i] = s * xp + c * xq;
        }
        auto vp = vt.row(p);
        auto vq = vt.row(q);
        for (std::size_t i = 0; i < n; ++i) {
          const double xp = vp[i], xq = vq[i];
          vp[i] = c * xp - s * xq;
          vq[i] = s * xp + c * xq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged)
    throw NumericalError("svd failed to converge for " + shape_of(a_in) + " matrix after " +
                         std::to_string(kMaxJacobiSweeps) + " sweeps");

  std::vector<double> sig(n);
  const double zero_floor = std::sqrt(negligible);
  for (std::size_t j = 0; j < n; ++j) {
    sig[j] = norm2(wt.row(j));
    if (sig[j] <= zero_floor) sig[j] = 0.0;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sig[i] > sig[j]; });

  // Left singular vectors in R-space first; zero-singular columns completed
  // there against the canonical basis (deterministic argmax residual), then
  // every column lifted through Q, which preserves orthonormality.
  Matrix ur(n, n);
  Matrix right(n, n);
  std::vector<double> singulars(n);
  std::vector<std::size_t> deficient;
  for (std::size_t jn = 0; jn < n; ++jn) {
    const std::size_t jo = order[jn];
    singulars[jn] = sig[jo];
    for (std::size_t i = 0; i < n; ++i) right(i, jn) = vt(jo, i);
    if (sig[jo] > 0.0) {
      const double inv = 1.0 / sig[jo];
      auto w = wt.row(jo);
      for (std::size_t i = 0; i < n; ++i) ur(i, jn) = w[i] * inv;
    } else {
      deficient.push_back(jn);
    }
  }
  for (std::size_t jn : deficient) {
    std::vector<double> best;
    double best_norm2 = -1.0;
    for (std::size_t cand = 0; cand < n; ++cand) {
      std::vector<double> v(n, 0.0);
      v[cand] = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == jn || (singulars[k] == 0.0 && k > jn)) continue;  // only settled columns
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += ur(i, k) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= proj * ur(i, k);
      }
      double nn = dot(v, v);
      if (nn > best_norm2) {
        best_norm2 = nn;
        best = std::move(v);
      }
    }
    const double inv = 1.0 / std::sqrt(best_norm2);
    for (std::size_t i = 0; i < n; ++i) ur(i, jn) = best[i] * inv;
  }

  Matrix left(m, n);
  std::vector<double> u(m);
  for (std::size_t jn = 0; jn < n; ++jn) {
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) u[i] = ur(i, jn);
    for (std::size_t kk = qr.vs.size(); kk-- > 0;) {
      const double beta = qr.betas[kk];
      if (beta == 0.0) continue;
      const auto& v = qr.vs[kk];
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * u[kk + i];
      s *= beta;
      for (std::size_t i = 0; i < v.size(); ++i) u[kk + i] -= s * v[i];
    }
    for (std::size_t i = 0; i < m; ++i) left(i, jn) = u[i];
  }

  return {std::move(left), std::move(singulars), std::move(right)};
}

// Householder tridiagonalization of a symmetric matrix, in place. Fills d
// (diagonal) and e (subdiagonal, length n-1). When vs/betas are given, the
// reflectors are kept so that a = Q T Q^T can be applied later.
void tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e,
                    std::vector<std::vector<double>>* vs, std::vector<double>* betas) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  if (vs) vs->clear();
  if (betas) betas->clear();

  std::vector<double> v, p, w;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    v.assign(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) v[i] = a(k + 1 + i, k);

    double sigma = 0.0;
    for (std::size_t i = 1; i < len; ++i) sigma += v[i] * v[i];
    double beta = 0.0;
    double alpha = v[0];
    if (sigma > 0.0) {
      const double mu = std::sqrt(v[0] * v[0] + sigma);
      double v0;
      if (v[0] <= 0.0)
        v0 = v[0] - mu;
      else
        v0 = -sigma / (v[0] + mu);
      beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
      const double inv = 1.0 / v0;
      v[0] = 1.0;
      for (std::size_t i = 1; i < len; ++i) v[i] *= inv;
      alpha = mu;
    } else {
      v[0] = 1.0;  // beta = 0, identity reflector
    }

    if (beta != 0.0) {
      // p = beta * A_sub * v ; w = p - (beta/2)(p.v) v ; A_sub -= v w^T + w v^T
      // Only the lower triangle of the trailing block is read and written.
      p.assign(len, 0.0);
      for (std::size_t i = 0; i < len; ++i) {
        const double* row = &a(k + 1 + i, k + 1);
        const double vi = v[i];
        double s = row[i] * vi;
        for (std::size_t j = 0; j < i; ++j) {
          s += row[j] * v[j];
          p[j] += row[j] * vi;
        }
        p[i] += s;
      }
      double pv = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        p[i] *= beta;
        pv += p[i] * v[i];
      }
      w = p;
      const double half = 0.5 * beta * pv;
      for (std::size_t i = 0; i < len; ++i) w[i] -= half * v[i];
      for (std::size_t i = 0; i < len; ++i) {
        double* row = &a(k + 1 + i, k + 1);
        const double vi = v[i], wi = w[i];
        for (std::size_t j = 0; j <= i; ++j) row[j] -= vi * w[j] + wi * v[j];
      }
    }

    d[k] = a(k, k);
    e[k] = alpha;
    if (vs) vs->push_back(v);
    if (betas) betas->push_back(beta);
  }
  if (n >= 2) {
    d[n - 2] = a(n - 2, n - 2);
    e[n - 2] = a(n - 1, n - 2);
  }
  if (n >= 1) d[n - 1] = a(n - 1, n - 1);
}

// Implicit-shift QL iteration on a tridiagonal matrix; eigenvalues only.
void ql_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.push_back(0.0);
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (++iter > kMaxQlIterations)
        throw NumericalError("symmetric eigensolver failed to converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t ii = m; ii-- > l;) {
        double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  std::sort(d.begin(), d.end());
}

// Lower Cholesky factor in place; returns false when not positive definite.
bool cholesky(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= a(j, k) * a(j, k);
    if (!(s > 0.0)) return false;
    const double ljj = std::sqrt(s);
    a(j, j) = ljj;
    const double inv = 1.0 / ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= a(i, k) * a(j, k);
      a(i, j) = t * inv;
    }
  }
  return true;
}

std::vector<double> cholesky_solve(const Matrix& l, const std::vector<double>& y) {
  const std::size_t n = l.rows();
  std::vector<double> x(y);
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

std::vector<double> residual(const Matrix& m, const std::vector<double>& c,
                             const std::vector<double>& y) {
  std::vector<double> r = m * c;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  return r;
}

}  // namespace

SvdFactors svd(const Matrix& a) {
  if (a.empty()) throw DimensionError("svd of empty matrix (" + shape_of(a) + ")");
  if (a.rows() >= a.cols()) return svd_tall(a);
  SvdFactors f = svd_tall(a.transpose());
  return {std::move(f.right), std::move(f.singulars), std::move(f.left)};
}

double pinv_cutoff(const Matrix& a, const std::vector<double>& singulars) {
  const double smax = singulars.empty() ? 0.0 : singulars.front();
  return static_cast<double>(std::max(a.rows(), a.cols())) * smax * kEps;
}

Matrix pinv(const Matrix& a, std::optional<double> tol) {
  if (tol && (!(*tol >= 0.0)))
    throw ConfigError("pinv tolerance must be nonnegative");
  const SvdFactors f = svd(a);
  const double cutoff = tol ? *tol : pinv_cutoff(a, f.singulars);
  const std::size_t k = f.singulars.size();
  Matrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < k; ++r) {
    if (!(f.singulars[r] > cutoff)) break;  // sorted nonincreasing
    const double inv = 1.0 / f.singulars[r];
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double vir = f.right(i, r) * inv;
      if (vir == 0.0) continue;
      for (std::size_t j = 0; j < a.rows(); ++j) out(i, j) += vir * f.left(j, r);
    }
  }
  return out;
}

std::size_t rank(const Matrix& a, std::optional<double> tol) {
  const SvdFactors f = svd(a);
  const double cutoff = tol ? *tol : pinv_cutoff(a, f.singulars);
  std::size_t r = 0;
  for (double s : f.singulars)
    if (s > cutoff) ++r;
  return r;
}

std::vector<double> pinv_apply(const Matrix& a, const std::vector<double>& y,
                               std::optional<double> tol) {
  if (a.rows() != y.size())
    throw DimensionError("pinv_apply: vector length does not match matrix rows");
  const SvdFactors f = svd(a);
  const double cutoff = tol ? *tol : pinv_cutoff(a, f.singulars);
  std::vector<double> x(a.cols(), 0.0);
  for (std::size_t r = 0; r < f.singulars.size(); ++r) {
    if (!(f.singulars[r] > cutoff)) break;
    double uy = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) uy += f.left(i, r) * y[i];
    uy /= f.singulars[r];
    for (std::size_t i = 0; i < a.cols(); ++i) x[i] += uy * f.right(i, r);
  }
  return x;
}

std::vector<double> ridge_solve_psd(const Matrix& a, double shift,
                                    const std::vector<double>& y) {
  require_symmetric(a, "ridge_solve_psd");
  if (a.rows() != y.size())
    throw DimensionError("ridge_solve_psd: right-hand side length mismatch");
  const std::size_t n = a.rows();
  Matrix shifted = a;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += shift;
  Matrix chol = shifted;
  if (cholesky(chol)) {
    std::vector<double> c = cholesky_solve(chol, y);
    const double ynorm = norm2(y);
    for (int it = 0; it < 2; ++it) {
      std::vector<double> r = residual(shifted, c, y);
      if (norm2(r) <= 1e-10 * ynorm) break;
      std::vector<double> dc = cholesky_solve(chol, r);
      for (std::size_t i = 0; i < n; ++i) c[i] += dc[i];
    }
    return c;
  }
  return pinv(shifted) * y;
}

std::vector<double> solve_ridge(const Matrix& a, double lambda_eff,
                                const std::vector<double>& y) {
  require_symmetric(a, "solve_ridge");
  if (a.rows() != y.size())
    throw DimensionError("solve_ridge: right-hand side length does not match matrix");
  if (!(lambda_eff >= 0.0) || !std::isfinite(lambda_eff))
    throw ConfigError("solve_ridge: lambda_eff must be finite and nonnegative");

  const std::size_t n = a.rows();
  Matrix shifted = a;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += lambda_eff;

  const double ynorm = norm2(y);
  Matrix chol = shifted;
  std::vector<double> c;
  bool chol_ok = cholesky(chol);
  if (chol_ok) {
    c = cholesky_solve(chol, y);
    for (int it = 0; it < 2; ++it) {
      std::vector<double> r = residual(shifted, c, y);
      if (norm2(r) <= 1e-8 * ynorm) break;
      std::vector<double> dc = cholesky_solve(chol, r);
      for (std::size_t i = 0; i < n; ++i) c[i] += dc[i];
    }
  } else {
    c = pinv(shifted) * y;
  }

  // With lambda = 0 and a singular matrix the pinv fallback returns the
  // minimum-norm least-squares solution; y may then lie outside the range and
  // the residual is not required to vanish.
  const bool enforce = lambda_eff > 0.0 || chol_ok;
  if (enforce) {
    const double r = norm2(residual(shifted, c, y));
    if (r > 1e-6 * std::max(ynorm, std::numeric_limits<double>::min()))
      throw NumericalError("solve_ridge residual check failed: ||r|| = " + std::to_string(r) +
                           " exceeds 1e-6 * ||y||");
  }
  return c;
}

std::vector<double> sym_eigenvalues(const Matrix& a) {
  require_symmetric(a, "sym_eigenvalues");
  Matrix work = a;
  std::vector<double> d, e;
  tridiagonalize(work, d, e, nullptr, nullptr);
  ql_eigenvalues(d, e);
  return d;
}

double min_eig_sym(const Matrix& a) {
  std::vector<double> ev = sym_eigenvalues(a);
  if (ev.empty()) throw DimensionError("min_eig_sym of empty matrix");
  return ev.front();
}

TridiagonalShiftSolver::TridiagonalShiftSolver(Matrix a) {
  require_symmetric(a, "TridiagonalShiftSolver");
  n_ = a.rows();
  tridiagonalize(a, diag_, offdiag_, &vs_, &betas_);
}

void TridiagonalShiftSolver::apply_q_transpose(std::vector<double>& x) const {
  for (std::size_t k = 0; k < vs_.size(); ++k) {
    const double beta = betas_[k];
    if (beta == 0.0) continue;
    const auto& v = vs_[k];
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * x[k + 1 + i];
    s *= beta;
    for (std::size_t i = 0; i < v.size(); ++i) x[k + 1 + i] -= s * v[i];
  }
}

void TridiagonalShiftSolver::apply_q(std::vector<double>& x) const {
  for (std::size_t kk = vs_.size(); kk-- > 0;) {
    const double beta = betas_[kk];
    if (beta == 0.0) continue;
    const auto& v = vs_[kk];
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * x[kk + 1 + i];
    s *= beta;
    for (std::size_t i = 0; i < v.size(); ++i) x[kk + 1 + i] -= s * v[i];
  }
}

std::vector<double> TridiagonalShiftSolver::solve(double shift,
                                                  const std::vector<double>& y) const {
  if (y.size() != n_)
    throw DimensionError("TridiagonalShiftSolver: right-hand side length mismatch");
  std::vector<double> x = y;
  apply_q_transpose(x);

  // Thomas algorithm on T + shift I (expected positive definite).
  std::vector<double> piv(n_), rhs(n_);
  piv[0] = diag_[0] + shift;
  if (!(piv[0] > 0.0))
    throw NumericalError("tridiagonal shifted solve: matrix not positive definite");
  rhs[0] = x[0];
  for (std::size_t i = 1; i < n_; ++i) {
    const double w = offdiag_[i - 1] / piv[i - 1];
    piv[i] = diag_[i] + shift - w * offdiag_[i - 1];
    if (!(piv[i] > 0.0))
      throw NumericalError("tridiagonal shifted solve: matrix not positive definite");
    rhs[i] = x[i] - w * rhs[i - 1];
  }
  x[n_ - 1] = rhs[n_ - 1] / piv[n_ - 1];
  for (std::size_t ii = n_ - 1; ii-- > 0;)
    x[ii] = (rhs[ii] - offdiag_[ii] * x[ii + 1]) / piv[ii];

  apply_q(x);
  return x;
}

}  // namespace pkreg::linalg
