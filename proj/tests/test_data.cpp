#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "pkreg/data.hpp"
#include "pkreg/matrix.hpp"
#include "pkreg/rng.hpp"

using namespace pkreg;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "pkreg_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("toy_target values") {
  CHECK(data::toy_target(0.0) == 1.0);
  CHECK(data::toy_target(0.5) == 0.0);
  CHECK(data::toy_target(0.75) == 0.0);
  CHECK(data::toy_target(0.25) == doctest::Approx(0.171875).epsilon(1e-15));
}

TEST_CASE("gen_toy") {
  const auto clean = data::gen_toy(50, 0.0, 9);
  for (std::size_t i = 0; i < clean.size(); ++i)
    CHECK(clean.targets[i] == data::toy_target(clean.inputs.coords[i]));

  const auto a = data::gen_toy(100, 0.1, 4);
  const auto b = data::gen_toy(100, 0.1, 4);
  CHECK(a.inputs.coords == b.inputs.coords);
  CHECK(a.targets == b.targets);

  // noise variance estimator
  const auto noisy = data::gen_toy(10000, 0.1, 12);
  double mean = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i)
    mean += noisy.targets[i] - data::toy_target(noisy.inputs.coords[i]);
  mean /= 10000.0;
  double var = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double r = noisy.targets[i] - data::toy_target(noisy.inputs.coords[i]) - mean;
    var += r * r;
  }
  var /= 9999.0;
  CHECK(std::abs(var - 0.1) < 0.01);
  // noise has mean zero: the regression function is toy_target
  CHECK(std::abs(mean) < 3.0 * std::sqrt(0.1) / 100.0);
}

TEST_CASE("gen_toy_test") {
  const auto t = data::gen_toy_test(1000, 5);
  CHECK(t.size() == 1000);
  for (std::size_t i = 0; i < 1000; ++i)
    CHECK(t.targets[i] == data::toy_target(t.inputs.coords[i]));
  const auto t2 = data::gen_toy_test(1000, 5);
  CHECK(t.inputs.coords == t2.inputs.coords);
}

TEST_CASE("load_csv") {
  const auto path = write_temp("ok.csv", "1,2\n3,4\n");
  const auto d = data::load_csv(path, false);
  CHECK(d.dim() == 1);
  CHECK(d.size() == 2);
  CHECK(d.inputs.coords[0] == 1.0);
  CHECK(d.inputs.coords[1] == 3.0);
  CHECK(d.targets[0] == 2.0);
  CHECK(d.targets[1] == 4.0);
  std::remove(path.c_str());

  const auto hdr = write_temp("hdr.csv", "x,y\n1,2\n3,4\n");
  const auto h = data::load_csv(hdr, true);
  CHECK(h.size() == 2);
  std::remove(hdr.c_str());

  const auto bad = write_temp("bad.csv", "1,2\n3,abc\n");
  CHECK_THROWS_WITH_AS(data::load_csv(bad, false) /**/,
                       doctest::Contains("row 2"), DataError);
  try {
    data::load_csv(bad, false);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }
  std::remove(bad.c_str());

  CHECK_THROWS_AS(data::load_csv("does_not_exist.csv", false), DataError);

  const auto ragged = write_temp("ragged.csv", "1,2,3\n4,5\n");
  CHECK_THROWS_AS(data::load_csv(ragged, false), DataError);
  std::remove(ragged.c_str());

  const auto empty = write_temp("empty.csv", "");
  CHECK_THROWS_AS(data::load_csv(empty, false), DataError);
  std::remove(empty.c_str());
}

TEST_CASE("normalize_ball") {
  // single point: constant coordinates map to 0
  data::Dataset one;
  one.inputs = Points(1, std::vector<double>{0.0});
  one.targets = {1.0};
  const auto [n1, r1] = data::normalize_ball(one);
  CHECK(n1.inputs.coords[0] == 0.0);
  CHECK_FALSE(r1.invertible);

  // affine endpoints
  data::Dataset two;
  two.inputs = Points(1, std::vector<double>{0.0, 10.0});
  two.targets = {1.0, 2.0};
  const auto [n2, r2] = data::normalize_ball(two);
  CHECK(n2.inputs.coords[0] == -1.0);
  CHECK(n2.inputs.coords[1] == 1.0);
  CHECK(r2.invertible);

  // random d=5 data ends inside the ball; roundtrip inverts
  data::Dataset d5;
  d5.inputs = Points(5, 40);
  Rng rng(31);
  for (double& v : d5.inputs.coords) v = rng.uniform(-7.0, 13.0);
  d5.targets.assign(40, 0.0);
  const auto [n5, r5] = data::normalize_ball(d5);
  for (std::size_t i = 0; i < n5.size(); ++i) CHECK(norm2(n5.inputs[i]) <= 1.0 + 1e-12);
  const Points back = data::invert_normalization(r5, n5.inputs);
  for (std::size_t i = 0; i < back.coords.size(); ++i)
    CHECK(back.coords[i] ==
          doctest::Approx(d5.inputs.coords[i]).epsilon(1e-10));
  // apply matches the stored forward map
  const Points fwd = data::apply_normalization(r5, d5.inputs);
  for (std::size_t i = 0; i < fwd.coords.size(); ++i)
    CHECK(fwd.coords[i] == doctest::Approx(n5.inputs.coords[i]).epsilon(1e-14));
}

TEST_CASE("split") {
  data::Dataset d;
  d.inputs = Points(1, 10);
  for (std::size_t i = 0; i < 10; ++i) d.inputs.coords[i] = static_cast<double>(i);
  d.targets.assign(10, 0.0);
  for (std::size_t i = 0; i < 10; ++i) d.targets[i] = static_cast<double>(i);

  const auto [a, b] = data::split(d, 0.5, 3);
  CHECK(a.size() == 5);
  CHECK(b.size() == 5);

  std::vector<int> seen(10, 0);
  for (const auto* part : {&a, &b})
    for (std::size_t i = 0; i < part->size(); ++i)
      seen[static_cast<std::size_t>(part->targets[i])]++;
  for (int c : seen) CHECK(c == 1);  // partition: union is everything, no overlap

  const auto [c1, c2] = data::split(d, 0.5, 3);
  CHECK(c1.targets == a.targets);

  CHECK_THROWS_AS(data::split(d, 0.04, 1), ConfigError);  // would round to an empty part
}

TEST_CASE("rmse") {
  CHECK(data::rmse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(data::rmse(std::vector<double>{1, 1}, std::vector<double>{0, 0}) == 1.0);
  CHECK(data::rmse(std::vector<double>{3}, std::vector<double>{0}) == 3.0);
  CHECK_THROWS_AS(data::rmse(std::vector<double>{1}, std::vector<double>{1, 2}),
                  DimensionError);

  // invariant under a common permutation
  std::vector<double> p = {0.3, -1.0, 2.0, 0.7};
  std::vector<double> t = {0.1, -0.5, 1.5, 1.0};
  const double base = data::rmse(p, t);
  std::vector<double> p2 = {2.0, 0.3, 0.7, -1.0};
  std::vector<double> t2 = {1.5, 0.1, 1.0, -0.5};
  CHECK(data::rmse(p2, t2) == doctest::Approx(base).epsilon(1e-15));
}
