#ifndef LPH_PROBLEM_HPP
#define LPH_PROBLEM_HPP

#include "lph/design_matrix.hpp"
#include "lph/linalg.hpp"
#include "lph/log.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <random>

namespace lph {

/// Orthonormal basis V of row-space(A) and the matching singular values,
/// with singular values below 1e-12 * sigma_max discarded.
template <typename Scalar>
struct RowSpace {
  Matrix<Scalar> basis;
  Vector<Scalar> singular_values;

  RowSpace() = default;
  explicit RowSpace(const Matrix<Scalar>& a) {
    const Eigen::BDCSVD<Matrix<Scalar>> svd(a, Eigen::ComputeThinV);
    const Vector<Scalar>& sv = svd.singularValues();
    const Scalar top = sv.size() ? sv(0) : Scalar(0);
    Index r = 0;
    while (r < sv.size() && top > 0 && sv(r) > Scalar(kRankCutoff) * top) ++r;
    basis = svd.matrixV().leftCols(r);
    singular_values = sv.head(r);
  }

  Index rank() const { return singular_values.size(); }
  Vector<Scalar> project(const Vector<Scalar>& v) const { return basis * (basis.transpose() * v); }

  /// (A^T A)^dagger applied to v.
  Vector<Scalar> gram_pinv_apply(const Vector<Scalar>& v) const {
    const Vector<Scalar> inv2 = singular_values.array().square().inverse().matrix();
    return basis * (inv2.asDiagonal() * (basis.transpose() * v));
  }
};

/// Orthogonal projection of c onto row-space(A).
template <typename Scalar>
Vector<Scalar> project_to_rowspace(const Matrix<Scalar>& a, const Vector<Scalar>& c) {
  if (a.cols() != c.size()) throw DimensionError("c", "length does not match the column count of A");
  return RowSpace<Scalar>(a).project(c);
}

/// An l_p regression instance  min_x c.x + ||Ax - b||_p^p.
///
/// Construction validates dimensions and the exponent, then replaces c by
/// its projection onto row-space(A) so that the problem is bounded.
template <typename Scalar>
class LpProblem {
 public:
  LpProblem(DesignMatrix<Scalar> a, Vector<Scalar> b, Vector<Scalar> c, Scalar p)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), p_(p) {
    if (!std::isfinite(double(p_)) || !(p_ > Scalar(1)))
      throw ParameterError("exponent p must be finite and satisfy p > 1");
    if (a_.rows() < 1 || a_.cols() < 1) throw DimensionError("A", "matrix must have n >= 1 rows and d >= 1 columns");
    if (b_.size() != a_.rows())
      throw DimensionError("b", "length " + std::to_string(b_.size()) + " does not match the " +
                                    std::to_string(a_.rows()) + " rows of A");
    if (c_.size() != a_.cols())
      throw DimensionError("c", "length " + std::to_string(c_.size()) + " does not match the " +
                                    std::to_string(a_.cols()) + " columns of A");
    rowspace_ = RowSpace<Scalar>(a_.to_dense());
    Vector<Scalar> projected = rowspace_.project(c_);
    const Scalar moved = (projected - c_).norm();
    if (moved > Scalar(1e-8) * std::max(c_.norm(), Scalar(1e-300)) && moved > 0)
      log_warning("c is not in the row space of A; using its projection");
    c_ = std::move(projected);
  }

  const DesignMatrix<Scalar>& A() const { return a_; }
  const Vector<Scalar>& b() const { return b_; }
  const Vector<Scalar>& c() const { return c_; }
  Scalar p() const { return p_; }
  Index n() const { return a_.rows(); }
  Index d() const { return a_.cols(); }
  Index nnz() const { return a_.nnz(); }
  const RowSpace<Scalar>& rowspace() const { return rowspace_; }

  Vector<Scalar> residual(const Vector<Scalar>& x) const { return a_.apply(x) - b_; }

 private:
  DesignMatrix<Scalar> a_;
  Vector<Scalar> b_;
  Vector<Scalar> c_;
  Scalar p_;
  RowSpace<Scalar> rowspace_;
};

/// c.x + sum_i |(Ax - b)_i|^p, residual terms summed in ascending row order.
template <typename Scalar>
Scalar objective(const LpProblem<Scalar>& problem, const Vector<Scalar>& x) {
  if (x.size() != problem.d()) throw DimensionError("x", "length does not match the column count of A");
  const Vector<Scalar> s = problem.residual(x);
  Scalar total(0);
  for (Index i = 0; i < s.size(); ++i) total += std::pow(std::abs(s(i)), problem.p());
  return problem.c().dot(x) + total;
}

/// Random overdetermined instance: Gaussian entries of A kept with
/// probability `density`, Gaussian b, and c = A^T w / ||A^T w|| for a
/// Gaussian n-vector w so that c lies in the row space by construction.
template <typename Scalar = double>
LpProblem<Scalar> generate_random(Index n, Index d, Scalar p, double density, std::uint64_t seed) {
  if (n < d) throw ParameterError("generator requires n >= d");
  if (d < 1) throw ParameterError("generator requires d >= 1");
  if (!(density > 0.0) || density > 1.0) throw ParameterError("density must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Eigen::Triplet<Scalar>> entries;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) {
      const bool keep = density >= 1.0 || unit(rng) < density;
      const double v = normal(rng);
      if (keep) entries.emplace_back(i, j, Scalar(v));
    }
  SparseRowMatrix<Scalar> a(n, d);
  a.setFromTriplets(entries.begin(), entries.end());

  Vector<Scalar> b(n);
  for (Index i = 0; i < n; ++i) b(i) = Scalar(normal(rng));
  Vector<Scalar> w(n);
  for (Index i = 0; i < n; ++i) w(i) = Scalar(normal(rng));

  DesignMatrix<Scalar> design = DesignMatrix<Scalar>::automatic(a);
  Vector<Scalar> c = design.apply_transpose(w);
  const Scalar norm = c.norm();
  if (norm > 0) c /= norm;
  return LpProblem<Scalar>(std::move(design), std::move(b), std::move(c), p);
}

}  // namespace lph

#endif  // LPH_PROBLEM_HPP
