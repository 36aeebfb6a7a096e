#include <doctest.h>

#include <cmath>

#include "pkreg/kernel.hpp"
#include "pkreg/linalg.hpp"
#include "pkreg/rng.hpp"

using namespace pkreg;
using kernel::GaussKernel;
using kernel::PolyKernel;

TEST_CASE("pow_int matches repeated multiplication") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double b = rng.uniform(-2.0, 2.0);
    const int e = 1 + static_cast<int>(rng.uniform() * 20);
    double direct = 1.0;
    for (int i = 0; i < e; ++i) direct *= b;
    CHECK(kernel::pow_int(b, e) == doctest::Approx(direct).epsilon(1e-12));
  }
  CHECK(kernel::pow_int(2.0, 10) == 1024.0);
  CHECK(kernel::pow_int(0.5, 0) == 1.0);
}

TEST_CASE("poly_eval values") {
  const std::vector<double> zero = {0.0, 0.0};
  const std::vector<double> y = {0.3, -0.7};
  CHECK(kernel::poly_eval(PolyKernel{3}, zero, y) == 1.0);
  CHECK(kernel::poly_eval(PolyKernel{7}, zero, y) == 1.0);

  const std::vector<double> e1 = {1.0, 0.0};
  CHECK(kernel::poly_eval(PolyKernel{2}, e1, e1) == 4.0);

  const std::vector<double> half = {0.5};
  CHECK(kernel::poly_eval(PolyKernel{3}, half, half) == doctest::Approx(1.953125).epsilon(1e-15));

  CHECK_THROWS_AS(kernel::poly_eval(PolyKernel{2}, e1, half), DimensionError);
}

TEST_CASE("gauss_eval values") {
  const std::vector<double> x = {0.2, 0.4};
  CHECK(kernel::gauss_eval(GaussKernel{0.7}, x, x) == 1.0);

  const std::vector<double> a = {0.0};
  const std::vector<double> b = {0.5};
  CHECK(kernel::gauss_eval(GaussKernel{0.5}, a, b) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-14));

  const std::vector<double> c = {1.0};
  CHECK(kernel::gauss_eval(GaussKernel{2.0}, a, c) ==
        doctest::Approx(0.7788007830714049).epsilon(1e-14));

  CHECK_THROWS_AS(kernel::gauss_eval(GaussKernel{1.0}, a, x), DimensionError);
}

TEST_CASE("kernel symmetry") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(3), y(3);
    for (auto* v : {&x, &y})
      for (double& c : *v) c = rng.uniform(-1.0, 1.0);
    const int s = 1 + trial % 6;
    CHECK(kernel::poly_eval(PolyKernel{s}, x, y) == kernel::poly_eval(PolyKernel{s}, y, x));
    CHECK(kernel::gauss_eval(GaussKernel{0.3}, x, y) ==
          kernel::gauss_eval(GaussKernel{0.3}, y, x));
  }
}

TEST_CASE("kernel_matrix values and errors") {
  Points one(2, std::vector<double>{0.0, 0.0});
  const Matrix m1 = kernel::kernel_matrix(PolyKernel{1}, one, one);
  CHECK(m1.rows() == 1);
  CHECK(m1(0, 0) == 1.0);

  Points pm(2, std::vector<double>{1.0, 0.0, -1.0, 0.0});
  const Matrix m2 = kernel::kernel_matrix(PolyKernel{1}, pm, pm);
  CHECK(m2(0, 0) == 2.0);
  CHECK(m2(1, 1) == 2.0);
  CHECK(m2(0, 1) == 0.0);
  CHECK(m2(1, 0) == 0.0);

  CHECK_THROWS_AS(kernel::kernel_matrix(PolyKernel{1}, Points(2, 0), one), DimensionError);
  Points wrong(3, std::vector<double>{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(kernel::kernel_matrix(PolyKernel{1}, one, wrong), DimensionError);
}

TEST_CASE("kernel matrices are positive semidefinite") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(40 + seed);
    const std::size_t npts = 3 + seed % 6;  // up to 8 points
    const std::size_t d = 1 + seed % 3;
    Points pts(d, npts);
    for (double& v : pts.coords) v = rng.uniform(-0.57, 0.57);
    for (int s : {1, 2, 4}) {
      const Matrix k = kernel::kernel_matrix(PolyKernel{s}, pts, pts);
      const auto ev = linalg::sym_eigenvalues(k);
      CHECK(ev.front() >= -1e-9 * std::max(std::abs(ev.back()), 1.0));
    }
    const Matrix g = kernel::kernel_matrix(GaussKernel{0.4}, pts, pts);
    const auto ev = linalg::sym_eigenvalues(g);
    CHECK(ev.front() >= -1e-9 * std::max(std::abs(ev.back()), 1.0));
  }
}

TEST_CASE("clip") {
  CHECK(kernel::clip(3.0, 2.0) == 2.0);
  CHECK(kernel::clip(-3.0, 2.0) == -2.0);
  CHECK(kernel::clip(1.5, 2.0) == 1.5);
  CHECK_THROWS_AS(kernel::clip(1.0, 0.0), ConfigError);

  // pointwise: clipping never increases squared error against |y| <= M
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const double M = 0.1 + rng.uniform() * 3.0;
    const double t = rng.uniform(-5.0, 5.0);
    const double y = rng.uniform(-M, M);
    const double ce = kernel::clip(t, M) - y;
    const double ue = t - y;
    CHECK(ce * ce <= ue * ue + 1e-15);
  }
}
