#ifndef LPH_TEST_HELPERS_HPP
#define LPH_TEST_HELPERS_HPP

#include "lph/problem.hpp"

#include <initializer_list>

namespace test {

using V = lph::Vector<double>;
using M = lph::Matrix<double>;

inline V vec(std::initializer_list<double> xs) {
  V v(lph::Index(xs.size()));
  lph::Index i = 0;
  for (const double x : xs) v(i++) = x;
  return v;
}

inline lph::LpProblem<double> dense_problem(const M& a, const V& b, const V& c, double p) {
  return lph::LpProblem<double>(lph::DesignMatrix<double>(a), b, c, p);
}

inline lph::LpProblem<double> scalar_problem(double a, double b, double c, double p) {
  M m(1, 1);
  m << a;
  return dense_problem(m, vec({b}), vec({c}), p);
}

}  // namespace test

#endif  // LPH_TEST_HELPERS_HPP
