#include "helpers.hpp"
#include "lph/homotopy.hpp"
#include "lph/validation.hpp"

#include <doctest.h>

#include <random>

using namespace lph;
using namespace lph::homotopy;
using test::M;
using test::V;
using test::vec;

TEST_CASE("gamma") {
  CHECK(gamma(1.0, 4.0, 1.0 / 8, 16) == doctest::Approx(35.0 / 3));
  CHECK(gamma(2.5, 3.0, 0.0, 9) == doctest::Approx(std::pow(2.5, 1.5)));
  CHECK(gamma(4.0, 2.0, 0.25, 1) == doctest::Approx(12));
  CHECK_THROWS_AS(gamma(1.0, 4.0, 0.2, 4), ParameterError);
  CHECK_THROWS_AS(gamma(1.0, 4.0, -0.1, 4), ParameterError);
}

TEST_CASE("kappa") {
  CHECK(kappa(4.0, 1.0 / 8, 16) == doctest::Approx(2336.0 / 9));
  CHECK(kappa(2.0, 0.25, 100) == doctest::Approx(8));
  CHECK(kappa(2.0, 0.1, 7) == doctest::Approx(8));
  const long double p = 8, h = 1.0L / 16, n = 4;
  const long double ref = 2 * p * p / (p - 1) * std::pow(3 + 2 * p * p * p / (p - 1) * std::sqrt(n) * h, 1.5L);
  CHECK(kappa(8.0, 1.0 / 16, 4) == doctest::Approx(double(ref)).epsilon(1e-13));
  CHECK_THROWS_AS(kappa(4.0, 0.5, 4), ParameterError);
}

TEST_CASE("diag_Dt") {
  CHECK(diag_Dt(vec({2}), 1.0, 4.0, 35.0 / 3)(0) == doctest::Approx(1.5));
  CHECK(diag_Dt(vec({3}), 1.0, 4.0, 0.5)(0) == doctest::Approx(12.75));
  const V d = diag_Dt(vec({0.1, 5, -3}), 0.7, 2.0, 2.0);
  for (Index i = 0; i < d.size(); ++i) CHECK(d(i) == doctest::Approx(0.5));
}

TEST_CASE("in_neighborhood") {
  CHECK(in_neighborhood(vec({1, -2}), vec({1, -2}), 0.0, 3.0));
  CHECK_FALSE(in_neighborhood(vec({2}), vec({1}), 2.9, 4.0));
  CHECK(in_neighborhood(vec({2}), vec({1}), 3.0, 4.0));
  CHECK_THROWS_AS(in_neighborhood(vec({1, 2}), vec({1}), 1.0, 4.0), DimensionError);
}

TEST_CASE("termination_t") {
  CHECK(termination_t(400.0, 100, 4.0) == doctest::Approx(1));
  CHECK(termination_t(1e-6, 100, 4.0) == doctest::Approx(std::pow(2.5e-9, 0.25)));
  CHECK_THROWS_AS(termination_t(0.0, 3, 2.0), ParameterError);
}

TEST_CASE("initial_t0") {
  M a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  CHECK(initial_t0(test::dense_problem(a, vec({2, 2, 1}), vec({0, 0}), 3)) == doctest::Approx(6));
  CHECK(initial_t0(test::dense_problem(M::Identity(2, 2), vec({0, 0}), vec({1, 0}), 2)) == doctest::Approx(2));
  CHECK(initial_t0(test::dense_problem(M::Identity(2, 2), vec({0, 0}), vec({0, 0}), 3)) == 1);
}

TEST_CASE("initial_point") {
  SUBCASE("c = 0 gives least squares") {
    const auto p = generate_random<double>(12, 3, 3.0, 1.0, 2);
    const auto q = test::dense_problem(p.A().to_dense(), p.b(), V::Zero(3), 3);
    const V x = initial_point(q, 3 * initial_t0(q));
    const M a = q.A().to_dense();
    const V ls = (a.transpose() * a).ldlt().solve(a.transpose() * q.b());
    CHECK((x - ls).norm() < 1e-10);
  }
  SUBCASE("identity with small c") {
    const V c = vec({1e-3, -2e-3, 5e-4});
    const auto q = test::dense_problem(M::Identity(3, 3), V::Zero(3), c, 4);
    const double t = 10;
    const V x = initial_point(q, t);
    CHECK((x + c / (4 * t * t)).norm() < 1e-15);
    CHECK(kkt_residual(q, t, x) < 1e-15);
  }
  SUBCASE("random instances satisfy KKT") {
    for (const double p : {1.5, 3.0, 4.0}) {
      const auto q = generate_random<double>(30, 4, p, 1.0, 9);
      const double t = 1.05 * initial_t0(q);
      CHECK(kkt_residual(q, t, initial_point(q, t)) <= 1e-8 * (1 + q.c().norm()));
    }
  }
  SUBCASE("below the threshold") {
    const auto q = generate_random<double>(30, 4, 3.0, 1.0, 9);
    CHECK_THROWS_AS(initial_point(q, 0.5 * initial_t0(q)), ParameterError);
  }
}

TEST_CASE("kkt_residual") {
  CHECK(kkt_residual(test::dense_problem(M::Identity(2, 2), V::Zero(2), V::Zero(2), 3), 1.0, V(V::Zero(2))) == 0);
  const auto q = generate_random<double>(30, 4, 3.0, 1.0, 4);
  const double t = 1.05 * initial_t0(q);
  const V x = initial_point(q, t);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  V dir(4);
  for (Index i = 0; i < 4; ++i) dir(i) = normal(rng);
  dir.normalize();
  const double r2 = kkt_residual(q, t, V(x + 1e-2 * dir));
  const double r3 = kkt_residual(q, t, V(x + 1e-3 * dir));
  CHECK(r2 / r3 == doctest::Approx(10).epsilon(0.05));
  CHECK_THROWS_AS(kkt_residual(q, 0.0, x), ParameterError);
}

TEST_CASE("path_velocity") {
  const auto q2 = generate_random<double>(10, 2, 2.0, 1.0, 3);
  CHECK(path_velocity(q2, 0.5, V(V::Random(2))).norm() == 0);
  // all residuals outside the quadratic region
  const auto q = test::dense_problem(M::Identity(2, 2), vec({5, -5}), V::Zero(2), 3);
  CHECK(path_velocity(q, 1.0, V(V::Zero(2))).norm() == 0);
  // d = 1: compare with the bisection path oracle
  const auto s = test::scalar_problem(1, 1, 0.1, 4);
  for (const double t : {0.3, 0.6, 2.0}) {
    const double x = validation::bisection_path_point(s, t);
    const double delta = 1e-4;
    const double fd = (validation::bisection_path_point(s, t * (1 + delta)) -
                       validation::bisection_path_point(s, t * (1 - delta))) /
                      (2 * t * delta);
    const double v = path_velocity(s, t, vec({x}))(0);
    CHECK(v == doctest::Approx(fd).epsilon(1e-3));
  }
}

TEST_CASE("solver kind names") {
  CHECK(to_string(SolverKind::agd_dense) == "agd-dense");
  CHECK(parse_solver_kind("katyusha") == SolverKind::katyusha);
  CHECK(parse_solver_kind("agd-sparse") == SolverKind::agd_sparse);
  CHECK_THROWS_AS(parse_solver_kind("newton"), ParameterError);
}

TEST_CASE("run on scalar instances") {
  HomotopyConfig cfg;
  SUBCASE("global minimizer at the origin") {
    for (const double p : {1.5, 3.0}) {
      const auto r = run(test::scalar_problem(1, 0, 0, p), cfg);
      CHECK(std::abs(r.final_x(0)) < 1e-6);
      CHECK(r.final_objective < 1e-6);
    }
  }
  SUBCASE("p = 2") {
    cfg.epsilon = 1e-8;
    const auto r = run(test::scalar_problem(1, 1, 1, 2), cfg);
    CHECK(r.final_x(0) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(r.final_objective == doctest::Approx(0.75).epsilon(1e-8));
  }
  SUBCASE("p = 4") {
    cfg.epsilon = 1e-10;
    const auto q = test::scalar_problem(1, 1, 1, 4);
    const auto r = run(q, cfg);
    const double x_star = 1 - std::pow(0.25, 1.0 / 3);
    CHECK(r.final_x(0) == doctest::Approx(x_star).epsilon(1e-2));
    CHECK(r.final_objective <= objective(q, vec({x_star})) + cfg.epsilon);
  }
}

TEST_CASE("run records a consistent schedule") {
  const auto q = generate_random<double>(50, 3, 3.0, 1.0, 8);
  HomotopyConfig cfg;
  cfg.epsilon = 1e-6;
  const auto r = run(q, cfg);
  REQUIRE(r.phases.size() > 1);
  for (std::size_t k = 1; k < r.phases.size(); ++k)
    CHECK(r.phases[k].t_k / r.phases[k - 1].t_k == doctest::Approx(1 - 1.0 / 6).epsilon(1e-12));
  for (const auto& ph : r.phases) {
    CHECK(ph.in_neighborhood);
    CHECK(std::isfinite(ph.objective));
    CHECK(ph.kkt_residual <= 1e-4 * (1 + q.c().norm()));
  }
  CHECK(r.t_final <= termination_t(cfg.epsilon, q.n(), 3.0));
}

TEST_CASE("run is deterministic for a fixed seed") {
  const auto q = generate_random<double>(80, 4, 3.0, 1.0, 12);
  HomotopyConfig cfg;
  cfg.solver_kind = SolverKind::katyusha;
  cfg.seed = 5;
  const auto a = run(q, cfg), b = run(q, cfg);
  CHECK((a.final_x - b.final_x).norm() == 0);
  CHECK(a.final_objective == b.final_objective);
}

TEST_CASE("max_phases exceeded carries the partial report") {
  const auto q = generate_random<double>(30, 3, 4.0, 1.0, 1);
  HomotopyConfig cfg;
  cfg.max_phases = 3;
  try {
    run(q, cfg);
    FAIL("expected HomotopyError");
  } catch (const HomotopyError<double>& e) {
    CHECK(e.partial().phases.size() == 3);
    CHECK(e.partial().final_x.size() == 3);
  }
  cfg.max_phases = 0;
  CHECK_THROWS_AS(run(q, cfg), ParameterError);
  cfg.max_phases = 10;
  cfg.epsilon = -1;
  CHECK_THROWS_AS(run(q, cfg), ParameterError);
}
