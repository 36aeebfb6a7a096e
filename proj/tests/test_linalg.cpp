#include <doctest.h>

#include <cmath>

#include "pkreg/linalg.hpp"
#include "pkreg/rng.hpp"

using namespace pkreg;
using linalg::SvdFactors;

namespace {

Matrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a;
}

Matrix random_rank_deficient(std::size_t m, std::size_t n, std::size_t r, std::uint64_t seed) {
  return random_matrix(m, r, seed) * random_matrix(r, n, seed + 1);
}

double identity_distance(const Matrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

Matrix reconstruct(const SvdFactors& f) {
  Matrix s(f.singulars.size(), f.singulars.size());
  for (std::size_t i = 0; i < f.singulars.size(); ++i) s(i, i) = f.singulars[i];
  return f.left * s * f.right.transpose();
}

void check_factors(const Matrix& a, const SvdFactors& f) {
  // orthonormal columns
  CHECK(identity_distance(f.left.transpose() * f.left) < 1e-10);
  CHECK(identity_distance(f.right.transpose() * f.right) < 1e-10);
  // nonincreasing, nonnegative
  for (std::size_t i = 0; i + 1 < f.singulars.size(); ++i) {
    CHECK(f.singulars[i] >= f.singulars[i + 1]);
    CHECK(f.singulars[i + 1] >= 0.0);
  }
  // reconstruction
  const double denom = std::max(a.frobenius_norm(), 1e-30);
  CHECK((reconstruct(f) - a).frobenius_norm() <= 1e-8 * denom + 1e-14);
}

}  // namespace

TEST_CASE("svd identity and diagonal") {
  const SvdFactors f = linalg::svd(Matrix::identity(2));
  CHECK(f.singulars[0] == doctest::Approx(1.0));
  CHECK(f.singulars[1] == doctest::Approx(1.0));

  Matrix d(2, 2);
  d(0, 0) = 3.0;
  const SvdFactors g = linalg::svd(d);
  CHECK(g.singulars[0] == doctest::Approx(3.0));
  CHECK(g.singulars[1] == doctest::Approx(0.0));
  check_factors(d, g);  // zero-singular column completed orthonormally
}

TEST_CASE("svd random shapes reconstruct") {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{5, 3}, {3, 5}, {4, 4}, {12, 2}}) {
    const Matrix a = random_matrix(m, n, 100 + m + 10 * n);
    check_factors(a, linalg::svd(a));
  }
}

TEST_CASE("svd of empty matrix throws") {
  CHECK_THROWS_AS(linalg::svd(Matrix()), DimensionError);
}

TEST_CASE("svd singular values match eigenvalues of AtA") {
  const Matrix a = random_matrix(6, 4, 42);
  const SvdFactors f = linalg::svd(a);
  auto ev = linalg::sym_eigenvalues(a.transpose() * a);  // ascending
  REQUIRE(ev.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double expected = std::sqrt(std::max(ev[3 - i], 0.0));
    CHECK(f.singulars[i] == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("pinv basics") {
  CHECK(identity_distance(linalg::pinv(Matrix::identity(3))) < 1e-12);

  const Matrix z(2, 4);
  const Matrix zp = linalg::pinv(z);
  CHECK(zp.rows() == 4);
  CHECK(zp.cols() == 2);
  CHECK(zp.max_abs() == 0.0);

  const Matrix a = random_matrix(6, 3, 7);
  CHECK(identity_distance(linalg::pinv(a) * a) < 1e-8);
}

TEST_CASE("Moore-Penrose identities on random matrices") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t m = 2 + seed % 7;
    const std::size_t n = 2 + (seed * 3) % 6;
    Matrix a = seed % 3 == 0 ? random_rank_deficient(m, n, std::min(m, n) > 1 ? 2 : 1, seed)
                             : random_matrix(m, n, seed);
    const Matrix x = linalg::pinv(a);
    const double na = std::max(a.frobenius_norm(), 1e-30);
    const double nx = std::max(x.frobenius_norm(), 1e-30);
    CHECK((a * x * a - a).frobenius_norm() <= 1e-8 * na);
    CHECK((x * a * x - x).frobenius_norm() <= 1e-8 * nx);
    const Matrix ax = a * x;
    const Matrix xa = x * a;
    CHECK(ax.max_asymmetry() <= 1e-8 * std::max(1.0, ax.max_abs()));
    CHECK(xa.max_asymmetry() <= 1e-8 * std::max(1.0, xa.max_abs()));
    ++checked;
  }
  CHECK(checked == 12);
}

TEST_CASE("rank") {
  CHECK(linalg::rank(Matrix::identity(4)) == 4);

  // outer product u v^T has rank 1
  Matrix uv(3, 4);
  const double u[3] = {1.0, -2.0, 0.5};
  const double v[4] = {2.0, 1.0, -1.0, 3.0};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) uv(i, j) = u[i] * v[j];
  CHECK(linalg::rank(uv) == 1);

  // Vandermonde at 5 distinct points, degree 4: determinant prod (xj - xi) != 0
  const double xs[5] = {-0.9, -0.3, 0.1, 0.55, 0.8};
  double det = 1.0;
  Matrix vm(5, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    double p = 1.0;
    for (std::size_t j = 0; j < 5; ++j) {
      vm(i, j) = p;
      p *= xs[i];
    }
    for (std::size_t j = 0; j < i; ++j) det *= xs[i] - xs[j];
  }
  REQUIRE(det != 0.0);
  CHECK(linalg::rank(vm) == 5);
}

TEST_CASE("rank of transpose matches") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Matrix a = seed % 2 == 0 ? random_matrix(5, 3, seed) : random_rank_deficient(6, 4, 2, seed);
    CHECK(linalg::rank(a) == linalg::rank(a.transpose()));
  }
}

TEST_CASE("solve_ridge examples") {
  const std::vector<double> c1 = linalg::solve_ridge(Matrix::identity(3), 1.0, {2.0, 2.0, 2.0});
  for (double v : c1) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> c2 = linalg::solve_ridge(Matrix(2, 2), 0.5, {1.0, 0.0});
  CHECK(c2[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c2[1] == doctest::Approx(0.0));

  // random SPD, multiply-back oracle
  const Matrix b = random_matrix(4, 4, 11);
  Matrix spd = b.transpose() * b;
  std::vector<double> y = {0.3, -1.0, 0.7, 2.0};
  const std::vector<double> c = linalg::solve_ridge(spd, 0.1, y);
  for (std::size_t i = 0; i < 4; ++i) spd(i, i) += 0.1;
  std::vector<double> r = spd * c;
  double rn = 0.0, yn = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    rn += (r[i] - y[i]) * (r[i] - y[i]);
    yn += y[i] * y[i];
  }
  CHECK(std::sqrt(rn) <= 1e-10 * std::sqrt(yn));
}

TEST_CASE("solve_ridge exact residual for lambda > 0") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t n = 3 + seed % 5;
    const Matrix b = random_matrix(n, n, 500 + seed);
    Matrix spd = b.transpose() * b;
    Rng rng(900 + seed);
    std::vector<double> y(n);
    for (double& v : y) v = rng.uniform(-2.0, 2.0);
    const double lam = 0.05 * (1.0 + static_cast<double>(seed));
    const std::vector<double> c = linalg::solve_ridge(spd, lam, y);
    for (std::size_t i = 0; i < n; ++i) spd(i, i) += lam;
    const std::vector<double> ac = spd * c;
    double rn = 0.0, yn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rn += (ac[i] - y[i]) * (ac[i] - y[i]);
      yn += y[i] * y[i];
    }
    CHECK(std::sqrt(rn) <= 1e-8 * std::sqrt(yn));
  }
}

TEST_CASE("solve_ridge minimum-norm fallback and errors") {
  // singular matrix, lambda = 0: pinv route
  Matrix sing(2, 2);
  sing(0, 0) = 1.0;  // diag(1, 0)
  const std::vector<double> c = linalg::solve_ridge(sing, 0.0, {3.0, 0.0});
  CHECK(c[0] == doctest::Approx(3.0));
  CHECK(c[1] == doctest::Approx(0.0));

  CHECK_THROWS_AS(linalg::solve_ridge(Matrix::identity(3), 1.0, {1.0, 2.0}), DimensionError);
  Matrix asym(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(linalg::solve_ridge(asym, 1.0, {1.0, 1.0}), DimensionError);
  CHECK_THROWS_AS(linalg::solve_ridge(Matrix::identity(2), -1.0, {1.0, 1.0}), ConfigError);
}

TEST_CASE("min_eig_sym") {
  Matrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 5.0;
  CHECK(linalg::min_eig_sym(d) == doctest::Approx(2.0).epsilon(1e-10));

  Matrix flip(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  CHECK(linalg::min_eig_sym(flip) == doctest::Approx(-1.0).epsilon(1e-10));

  const Matrix b = random_matrix(6, 6, 21);
  Matrix spd = b.transpose() * b;
  for (std::size_t i = 0; i < 6; ++i) spd(i, i) += 0.1;
  CHECK(linalg::min_eig_sym(spd) >= 0.1 - 1e-8);
}

TEST_CASE("tridiagonal shift solver matches dense ridge solve") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const std::size_t n = 2 + 3 * seed;
    const Matrix b = random_matrix(n, n, 333 + seed);
    const Matrix psd = b.transpose() * b;
    const linalg::TridiagonalShiftSolver solver(psd);
    Rng rng(777 + seed);
    std::vector<double> y(n);
    for (double& v : y) v = rng.uniform(-1.0, 1.0);
    for (double shift : {0.01, 0.5, 10.0}) {
      const std::vector<double> a = solver.solve(shift, y);
      const std::vector<double> c = linalg::solve_ridge(psd, shift, y);
      for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(c[i]).epsilon(1e-8));
    }
  }
}
