#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pkreg/estimators.hpp"
#include "pkreg/linalg.hpp"
#include "pkreg/rng.hpp"

using namespace pkreg;
using centers::Strategy;
using estimators::FitOptions;
using estimators::Model;

namespace {

data::Dataset make_1d(const std::vector<double>& x, const std::vector<double>& y) {
  data::Dataset d;
  d.inputs = Points(1, x);
  d.targets = y;
  return d;
}

data::Dataset poly_dataset(std::size_t m, std::uint64_t seed,
                           const std::function<double(double)>& f) {
  Rng rng(seed);
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = rng.uniform();
    y[i] = f(x[i]);
  }
  return make_1d(x, y);
}

double train_rmse(const Model& m, const data::Dataset& d) {
  return data::rmse(estimators::predict_many(m, d.inputs, false), d.targets);
}

}  // namespace

TEST_CASE("fit_epkr recovers targets in the span") {
  const auto d = poly_dataset(20, 1, [](double t) { return (1.0 + 0.3 * t) * (1.0 + 0.3 * t); });
  const auto cs = centers::build_fundamental_system(2, 1, Strategy::UniformBall, std::nullopt, 2);
  const Model m = estimators::fit_epkr(d, 2, cs);
  CHECK(train_rmse(m, d) < 1e-8);
  CHECK(m.lambda == 0.0);
  CHECK(m.sparsity() == 3);
  CHECK(m.clip_bound == doctest::Approx(*std::max_element(d.targets.begin(), d.targets.end())));
}

TEST_CASE("fit_epkr reproduces constants everywhere") {
  const auto d = poly_dataset(25, 3, [](double) { return 5.0; });
  for (int s : {1, 3}) {
    const auto cs =
        centers::build_fundamental_system(s, 1, Strategy::UniformBall, std::nullopt, 7 + s);
    const Model m = estimators::fit_epkr(d, s, cs);
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
      const std::vector<double> x = {rng.uniform(-1.0, 1.0)};
      CHECK(estimators::predict(m, x, false) == doctest::Approx(5.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("fit_epkr rejects n > m unless forced") {
  const auto d = poly_dataset(3, 5, [](double t) { return t; });
  const auto cs = centers::build_fundamental_system(4, 1, Strategy::UniformBall, std::nullopt, 2);
  CHECK_THROWS_AS(estimators::fit_epkr(d, 4, cs), ConfigError);
  FitOptions force;
  force.allow_overparameterized = true;
  const Model m = estimators::fit_epkr(d, 4, cs, force);  // least-norm fit interpolates
  CHECK(train_rmse(m, d) < 1e-8);
}

TEST_CASE("fit_epkr requires matching centers") {
  const auto d = poly_dataset(10, 6, [](double t) { return t; });
  const auto cs = centers::build_fundamental_system(2, 1, Strategy::UniformBall, std::nullopt, 2);
  CHECK_THROWS_AS(estimators::fit_epkr(d, 3, cs), ConfigError);  // degree mismatch
}

TEST_CASE("fit_pkr shrinkage limit and interpolation") {
  const auto d = poly_dataset(15, 8, [](double t) { return data::toy_target(t); });
  const Model shrunk = estimators::fit_pkr(d, 3, 1e12);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> x = {rng.uniform()};
    CHECK(std::abs(estimators::predict(shrunk, x, false)) < 1e-6);
  }

  // 5 distinct points, s = 4, lambda = 0: K is 5x5 nonsingular, interpolates
  const auto d5 = make_1d({0.05, 0.27, 0.51, 0.73, 0.94}, {1.0, -0.5, 0.25, 2.0, 0.0});
  const Matrix k = kernel::kernel_matrix(kernel::PolyKernel{4}, d5.inputs, d5.inputs);
  REQUIRE(linalg::rank(k) == 5);  // nonsingularity oracle
  const Model interp = estimators::fit_pkr(d5, 4, 0.0);
  CHECK(train_rmse(interp, d5) < 1e-6);
}

TEST_CASE("fit_pkr matches the checked ridge solve") {
  const auto d = poly_dataset(30, 13, [](double t) { return data::toy_target(t); });
  const int s = 4;
  const double lambda = 1e-3;
  const Model m = estimators::fit_pkr(d, s, lambda);
  const Matrix k = kernel::kernel_matrix(kernel::PolyKernel{s}, d.inputs, d.inputs);
  const auto direct =
      linalg::solve_ridge(k, static_cast<double>(d.size()) * lambda, d.targets);
  REQUIRE(direct.size() == m.coefficients.size());
  for (std::size_t i = 0; i < direct.size(); ++i)
    CHECK(m.coefficients[i] == doctest::Approx(direct[i]).epsilon(1e-8));
}

TEST_CASE("fit_cbr_epkr coincides with fit_epkr at lambda zero") {
  const auto d = poly_dataset(40, 21, [](double t) { return data::toy_target(t); });
  const auto cs = centers::build_fundamental_system(3, 1, Strategy::UniformBall, std::nullopt, 9);
  const Model e = estimators::fit_epkr(d, 3, cs);
  const Model c0 = estimators::fit_cbr_epkr(d, 3, cs, 0.0);
  REQUIRE(e.coefficients.size() == c0.coefficients.size());
  for (std::size_t i = 0; i < e.coefficients.size(); ++i)
    CHECK(std::abs(e.coefficients[i] - c0.coefficients[i]) <= 1e-12);

  const Model big = estimators::fit_cbr_epkr(d, 3, cs, 1e9);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> x = {rng.uniform()};
    CHECK(std::abs(estimators::predict(big, x, false)) < 1e-3);
  }
}

TEST_CASE("cbr coefficients converge to epkr as lambda vanishes") {
  const auto d = poly_dataset(50, 33, [](double t) { return data::toy_target(t); });
  const auto cs = centers::build_fundamental_system(3, 1, Strategy::UniformBall, std::nullopt, 4);
  const Model e = estimators::fit_epkr(d, 3, cs);
  double prev = std::numeric_limits<double>::infinity();
  for (double lam : {1e-4, 1e-8, 1e-12}) {
    const Model c = estimators::fit_cbr_epkr(d, 3, cs, lam);
    double dev = 0.0;
    for (std::size_t i = 0; i < e.coefficients.size(); ++i)
      dev = std::max(dev, std::abs(e.coefficients[i] - c.coefficients[i]));
    CHECK(dev <= prev + 1e-12);
    prev = dev;
  }
  CHECK(prev <= 1e-6);  // deviation at lambda = 1e-12
}

TEST_CASE("fit_gkr") {
  const auto one = make_1d({0.4}, {2.5});
  const Model m1 = estimators::fit_gkr(one, 0.3, 0.0);
  CHECK(estimators::predict(m1, std::vector<double>{0.4}, false) ==
        doctest::Approx(2.5).epsilon(1e-10));

  const auto d = poly_dataset(12, 44, [](double t) { return data::toy_target(t); });
  const Model shrunk = estimators::fit_gkr(d, 0.5, 1e12);
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(std::abs(estimators::predict(shrunk, d.inputs[i], false)) < 1e-6);
}

TEST_CASE("predict") {
  Model zero;
  zero.variant = estimators::Variant::Epkr;
  zero.degree = 2;
  zero.basis = Points(1, std::vector<double>{0.3});
  zero.coefficients = {0.0};
  zero.clip_bound = 1.0;
  CHECK(estimators::predict(zero, std::vector<double>{0.5}, false) == 0.0);
  CHECK(estimators::predict(zero, std::vector<double>{0.5}, true) == 0.0);

  Model unit = zero;
  unit.degree = 1;
  unit.basis = Points(1, std::vector<double>{1.0});
  unit.coefficients = {1.0};
  CHECK(estimators::predict(unit, std::vector<double>{0.0}, false) == 1.0);  // eta . x = 0

  CHECK_THROWS_AS(estimators::predict(unit, std::vector<double>{0.0, 1.0}, false),
                  DimensionError);

  // clipped predictions stay inside [-M, M]
  Model wild = unit;
  wild.coefficients = {40.0};
  wild.clip_bound = 2.0;
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x = {rng.uniform(-1.0, 1.0)};
    CHECK(std::abs(estimators::predict(wild, x, true)) <= 2.0);
  }
}

TEST_CASE("classify_plugin thresholds at one half") {
  Model m;
  m.variant = estimators::Variant::Epkr;
  m.degree = 1;
  m.basis = Points(1, std::vector<double>{1.0});
  m.clip_bound = 1.0;
  const std::vector<double> origin = {0.0};  // prediction equals the coefficient
  m.coefficients = {0.7};
  CHECK(estimators::classify_plugin(m, origin) == 1);
  m.coefficients = {0.5};
  CHECK(estimators::classify_plugin(m, origin) == 1);  // boundary belongs to class 1
  m.coefficients = {0.2};
  CHECK(estimators::classify_plugin(m, origin) == 0);
}

TEST_CASE("epkr training residual is least-squares optimal") {
  const auto d = poly_dataset(30, 55, [](double t) { return data::toy_target(t) ; });
  const int s = 3;
  const auto cs = centers::build_fundamental_system(s, 1, Strategy::UniformBall, std::nullopt, 8);
  const double epkr_res = train_rmse(estimators::fit_epkr(d, s, cs), d);

  // any explicit element of the degree-s span does no better
  const double pkr_res = train_rmse(estimators::fit_pkr(d, s, 0.0), d);
  CHECK(epkr_res <= pkr_res + 1e-8);
  Rng rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> resid(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double t = d.inputs.coords[i];
      double val = 0.0;
      double p = 1.0;
      for (int k = 0; k <= s; ++k) {
        val += rng.uniform(-1.0, 1.0) * p;
        p *= t;
      }
      resid[i] = val;
    }
    CHECK(epkr_res <= data::rmse(resid, d.targets) + 1e-8);
  }
}

TEST_CASE("epkr predictions are invariant under sample permutation") {
  const auto d = poly_dataset(40, 77, [](double t) { return data::toy_target(t) + 0.01 * t; });
  data::Dataset shuffled = d;
  Rng rng(78);
  for (std::size_t i = d.size(); i-- > 1;) {
    const std::size_t j = rng.index(i + 1);
    std::swap(shuffled.inputs.coords[i], shuffled.inputs.coords[j]);
    std::swap(shuffled.targets[i], shuffled.targets[j]);
  }
  const auto cs = centers::build_fundamental_system(3, 1, Strategy::UniformBall, std::nullopt, 5);
  const Model a = estimators::fit_epkr(d, 3, cs);
  const Model b = estimators::fit_epkr(shuffled, 3, cs);
  const auto pa = estimators::predict_many(a, d.inputs, false);
  const auto pb = estimators::predict_many(b, d.inputs, false);
  CHECK(data::rmse(pa, pb) <= 1e-8);
}

TEST_CASE("span invariance: center draws do not change the fit") {
  const auto d = poly_dataset(60, 88, [](double t) { return data::toy_target(t) + 0.02; });
  const int s = 3;
  const auto cs1 = centers::build_fundamental_system(s, 1, Strategy::UniformBall, std::nullopt, 101);
  const auto cs2 = centers::build_fundamental_system(s, 1, Strategy::UniformBall, std::nullopt, 202);
  const auto p1 = estimators::predict_many(estimators::fit_epkr(d, s, cs1), d.inputs, false);
  const auto p2 = estimators::predict_many(estimators::fit_epkr(d, s, cs2), d.inputs, false);
  CHECK(data::rmse(p1, p2) <= 1e-6);
}

TEST_CASE("clipping never hurts against bounded targets") {
  const auto d = poly_dataset(25, 99, [](double t) { return data::toy_target(t); });
  const auto cs = centers::build_fundamental_system(6, 1, Strategy::UniformBall, std::nullopt, 3);
  Model m = estimators::fit_epkr(d, 6, cs);
  m.clip_bound = 0.6;  // tighter than max |y|, still >= some targets
  const auto test = data::gen_toy_test(200, 123);
  std::vector<double> targets;
  std::vector<double> clipped, raw;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (std::abs(test.targets[i]) > m.clip_bound) continue;
    targets.push_back(test.targets[i]);
    clipped.push_back(estimators::predict(m, test.inputs[i], true));
    raw.push_back(estimators::predict(m, test.inputs[i], false));
  }
  REQUIRE(targets.size() > 10);
  CHECK(data::rmse(clipped, targets) <= data::rmse(raw, targets) + 1e-12);
}
