#include "helpers.hpp"
#include "lph/smoothing.hpp"

#include <doctest.h>

#include <cmath>

using namespace lph;
using namespace lph::smoothing;
using test::vec;

TEST_CASE("eval matches the closed forms") {
  auto f = eval(1.0, 4.0, 0.5);
  CHECK(f.value == doctest::Approx(0.5));
  CHECK(f.first == doctest::Approx(2));
  CHECK(f.second == doctest::Approx(4));
  CHECK(f.dt_of_first == doctest::Approx(4));

  f = eval(1.0, 4.0, 2.0);
  CHECK(f.value == doctest::Approx(17));
  CHECK(f.first == doctest::Approx(32));
  CHECK(f.second == doctest::Approx(48));
  CHECK(f.dt_of_first == 0);

  f = eval(5.0, 2.0, 3.0);
  CHECK(f.value == doctest::Approx(9));
  CHECK(f.first == doctest::Approx(6));
  CHECK(f.second == doctest::Approx(2));
  CHECK(f.dt_of_first == 0);
}

TEST_CASE("eval is odd in s for the slope and even for the value") {
  for (const double p : {1.5, 3.0, 8.0})
    for (const double s : {0.3, 1.7}) {
      CHECK(eval(1.0, p, -s).value == doctest::Approx(eval(1.0, p, s).value));
      CHECK(eval(1.0, p, -s).first == doctest::Approx(-eval(1.0, p, s).first));
    }
}

TEST_CASE("branches meet in value and slope at |s| = t; curvature jumps by p - 1") {
  for (const double p : {1.5, 3.0, 4.0, 8.0})
    for (const double t : {0.01, 1.0, 30.0}) {
      const auto in = eval(t, p, t);
      const auto out = eval(t, p, std::nextafter(t, 10 * t));
      CHECK(out.value == doctest::Approx(in.value).epsilon(1e-12));
      CHECK(out.first == doctest::Approx(in.first).epsilon(1e-12));
      CHECK(out.second / in.second == doctest::Approx(p - 1).epsilon(1e-12));
    }
}

TEST_CASE("eval_extended follows Definition 1") {
  CHECK(eval_extended(1.0, 4.0, 0.5, 2.0, 1.0).value == doctest::Approx(2));
  CHECK(eval_extended(1.0, 4.0, 0.5, 2.0, 3.0).value == doctest::Approx(73));
  CHECK(eval_extended(1.0, 4.0, 0.5, 2.0, 0.2).value == doctest::Approx(0.08));
  CHECK_THROWS_AS(eval_extended(1.0, 4.0, 2.0, 0.5, 1.0), ParameterError);
}

TEST_CASE("build_intervals") {
  auto iv = build_intervals(vec({0}), 1.0, 4.0);
  CHECK(iv[0].lower == 0);
  CHECK(iv[0].upper == doctest::Approx(1));
  iv = build_intervals(vec({2}), 0.5, 4.0);
  CHECK(iv[0].lower == doctest::Approx(std::sqrt(3.5)));
  CHECK(iv[0].upper == doctest::Approx(std::sqrt(4.5)));
  const auto s = vec({-3, 0.1, 2, 0});
  iv = build_intervals(s, 0.7, 3.0);
  for (Index i = 0; i < s.size(); ++i) {
    CHECK(iv[std::size_t(i)].lower <= std::abs(s(i)));
    CHECK(std::abs(s(i)) <= iv[std::size_t(i)].upper);
  }
}

TEST_CASE("signed bands follow the reference residual") {
  const SmoothedLoss<double> loss(1.0, 4.0, vec({-2, 2, 0.1}), 0.5);
  CHECK(loss.band_upper()(0) == doctest::Approx(-std::sqrt(3.5)));
  CHECK(loss.band_lower()(1) == doctest::Approx(std::sqrt(3.5)));
  CHECK(loss.band_lower()(2) == doctest::Approx(-loss.band_upper()(2)));
}

TEST_CASE("tilde_eval") {
  const double t = 1.3, p = 3, h = 1 / (2 * p);
  const auto s = vec({0.4, -2.5, 1.1});
  SUBCASE("huge intervals reduce to f at the shrunk radius") {
    const SmoothedLoss<double> loss(t, p, vec({0, 0, 0}), 1e12);
    const auto tv = tilde_eval(loss, h, s);
    double sum = 0;
    for (Index i = 0; i < s.size(); ++i) sum += eval((1 - h) * t, p, s(i)).value;
    CHECK(tv.value == doctest::Approx(sum).epsilon(1e-12));
  }
  SUBCASE("inside its interval a coordinate equals f") {
    const SmoothedLoss<double> loss(t, p, s, 0.1);
    const auto tv = tilde_eval(loss, h, s);
    CHECK(tv.gradient(1) == doctest::Approx(eval((1 - h) * t, p, s(1)).first));
  }
  SUBCASE("errors") {
    const SmoothedLoss<double> loss(t, p, s, 0.1);
    CHECK_THROWS_AS(tilde_eval(loss, h, vec({1, 2})), DimensionError);
    CHECK_THROWS_AS(tilde_eval(SmoothedLoss<double>(t, p), h, s), ParameterError);
  }
}

TEST_CASE("BoundLoss agrees with SmoothedLoss::coordinate") {
  const auto ref = vec({-2, 0.05, 3, 0});
  const SmoothedLoss<double> loss(1.1, 4.0, ref, 0.6);
  const BoundLoss<double> bound(loss, 0.9);
  for (Index i = 0; i < ref.size(); ++i)
    for (const double s : {-5.0, -1.0, -0.1, 0.0, 0.3, 1.5, 4.0}) {
      CHECK(bound(i, s).value == loss.coordinate(i, 0.9, s).value);
      CHECK(bound(i, s).first == loss.coordinate(i, 0.9, s).first);
      CHECK(bound(i, s).second == loss.coordinate(i, 0.9, s).second);
    }
}

TEST_CASE("uniform_gap") {
  CHECK(uniform_gap(0.5, 4.0) == doctest::Approx(0.0625));
  CHECK(uniform_gap(7.0, 2.0) == 0);
  CHECK(uniform_gap(1.0, 1.5) == doctest::Approx(0.25));
  double grid_max = 0;
  for (int k = 0; k <= 30000; ++k) {
    const double s = 1e-4 * k;
    grid_max = std::max(grid_max, std::abs(eval(1.0, 1.5, s).value - std::pow(s, 1.5)));
  }
  CHECK(grid_max == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("loss parameter checks") {
  CHECK_THROWS_AS(SmoothedLoss<double>(0.0, 3.0), ParameterError);
  CHECK_THROWS_AS(SmoothedLoss<double>(1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(SmoothedLoss<double>(1.0, 3.0, vec({1}), -1.0), ParameterError);
}
