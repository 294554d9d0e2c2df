#include "helpers.hpp"
#include "lph/io.hpp"
#include "lph/problem.hpp"

#include <doctest.h>

#include <sstream>

using namespace lph;
using test::M;
using test::V;
using test::vec;

TEST_CASE("LpProblem construction") {
  M a(2, 1);
  a << 1, 1;
  const auto problem = test::dense_problem(a, vec({1, 1}), vec({0}), 3);
  CHECK(problem.n() == 2);
  CHECK(problem.d() == 1);
  CHECK(problem.nnz() == 2);
}

TEST_CASE("LpProblem validation") {
  const M a = M::Random(4, 2);
  CHECK_THROWS_AS(test::dense_problem(a, V::Zero(5), V::Zero(2), 3), DimensionError);
  try {
    test::dense_problem(a, V::Zero(5), V::Zero(2), 3);
  } catch (const DimensionError& e) {
    CHECK(e.object() == "b");
  }
  CHECK_THROWS_AS(test::dense_problem(a, V::Zero(4), V::Zero(3), 3), DimensionError);
  CHECK_THROWS_AS(test::dense_problem(a, V::Zero(4), V::Zero(2), 1), ParameterError);
  CHECK_THROWS_AS(test::dense_problem(a, V::Zero(4), V::Zero(2), std::nan("")), ParameterError);
}

TEST_CASE("row-space projection of c") {
  CHECK((project_to_rowspace<double>(M::Identity(3, 3), vec({1, 2, 3})) - vec({1, 2, 3})).norm() < 1e-14);
  M row(1, 2);
  row << 1, 0;
  CHECK((project_to_rowspace<double>(row, vec({2, 5})) - vec({2, 0})).norm() < 1e-14);
  const M a = M::Random(10, 4);
  const V r = project_to_rowspace<double>(a, V::Random(4));
  CHECK((project_to_rowspace<double>(a, r) - r).norm() <= 1e-10);
  CHECK(project_to_rowspace<double>(M::Zero(3, 2), vec({1, 1})).norm() == 0);
}

TEST_CASE("LpProblem replaces c by its row-space projection") {
  M a(2, 2);
  a << 1, 0, 2, 0;
  const auto problem = test::dense_problem(a, vec({1, 1}), vec({3, 4}), 3);
  CHECK(problem.c()(0) == doctest::Approx(3));
  CHECK(problem.c()(1) == doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("random generator") {
  const auto p1 = generate_random<double>(8, 2, 3.0, 1.0, 7);
  const auto p2 = generate_random<double>(8, 2, 3.0, 1.0, 7);
  CHECK((p1.A().to_dense() - p2.A().to_dense()).norm() == 0);
  CHECK((p1.b() - p2.b()).norm() == 0);
  CHECK((p1.c() - p2.c()).norm() == 0);
  const auto sparse = generate_random<double>(8, 2, 3.0, 0.25, 1);
  CHECK(sparse.nnz() <= 16);
  const auto big = generate_random<double>(60, 7, 4.0, 0.3, 3);
  CHECK((big.rowspace().project(big.c()) - big.c()).norm() <= 1e-10 * (1 + big.c().norm()));
  CHECK_THROWS_AS(generate_random<double>(2, 3, 3.0, 1.0, 0), ParameterError);
}

TEST_CASE("objective") {
  const auto p = test::dense_problem(M::Identity(2, 2), vec({0, 0}), vec({0, 0}), 3);
  CHECK(objective(p, vec({1, 1})) == doctest::Approx(2));
  const auto q = test::scalar_problem(1, 1, 1, 2);
  CHECK(objective(q, vec({0.5})) == doctest::Approx(0.75));

  const auto r = generate_random<double>(40, 3, 3.5, 1.0, 11);
  const V x = V::Random(3);
  long double sum = 0;
  const V s = r.A().apply(x) - r.b();
  for (Index i = 0; i < s.size(); ++i) sum += std::pow(std::abs((long double)s(i)), 3.5L);
  sum += (long double)r.c().dot(x);
  CHECK(objective(r, x) == doctest::Approx(double(sum)).epsilon(1e-12));
}

TEST_CASE("Matrix Market reader") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n% comment\n3 2 3\n1 1 1.5\n2 2 -2\n3 1 4\n");
  const auto m = read_matrix_market(in);
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 2);
  CHECK(m.nonZeros() == 3);
  CHECK(m.coeff(1, 1) == -2);

  std::istringstream dup("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 1\n1 1 2\n");
  CHECK(read_matrix_market(dup).coeff(0, 0) == 3);

  std::istringstream array("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  const M dense = M(read_matrix_market(array));
  CHECK(dense(1, 0) == 2);
  CHECK(dense(0, 1) == 3);
}

TEST_CASE("Matrix Market errors carry line numbers") {
  std::istringstream bad("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 x 2\n");
  try {
    read_matrix_market(bad);
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  std::istringstream header("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1\n");
  CHECK_THROWS_AS(read_matrix_market(header), ParseError);
  std::istringstream range("%%MatrixMarket matrix coordinate real general\n1 1 1\n2 1 1\n");
  CHECK_THROWS_AS(read_matrix_market(range), ParseError);
}

TEST_CASE("Matrix Market and vector round trip") {
  const auto p = generate_random<double>(9, 3, 3.0, 0.3, 5);
  std::stringstream mm, vb;
  write_matrix_market(mm, p.A());
  write_vector(vb, p.b());
  const M back = M(read_matrix_market(mm));
  CHECK((back - p.A().to_dense()).norm() == 0);
  CHECK((read_vector(vb) - p.b()).norm() == 0);
}
