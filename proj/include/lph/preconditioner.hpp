#ifndef LPH_PRECONDITIONER_HPP
#define LPH_PRECONDITIONER_HPP

#include "lph/design_matrix.hpp"
#include "lph/linalg.hpp"
#include "lph/log.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstdint>
#include <random>

namespace lph::solvers {

enum class PreconditionerKind { dense, factored, sketched };

// Every preconditioner maps a search variable y to x = P y and exposes
//   apply(y)            x-space image P y
//   apply_transpose(v)  P^T v, back in y-space
//   preimage(x)         minimum-norm y with P y = x (x in the row space)
//   project(y)          orthogonal projection onto range(P^T)
// so that objectives and solvers can be written once over all three.

/// P = ((A^T D A)^dagger)^{1/2}, held explicitly.
template <typename Scalar>
class DensePreconditioner {
 public:
  static constexpr PreconditionerKind kind = PreconditionerKind::dense;

  DensePreconditioner(const DesignMatrix<Scalar>& a, const Vector<Scalar>& weights) {
    if (weights.size() != a.rows()) throw DimensionError("D", "length does not match the rows of A");
    const PsdSpectrum<Scalar> spec(a.weighted_gram(weights));
    p_ = spec.pinv_sqrt();
    p_pinv_ = spec.sqrt();
    q_ = spec.projector();
  }

  Index dim() const { return p_.rows(); }
  Vector<Scalar> apply(const Vector<Scalar>& y) const { return p_ * y; }
  Vector<Scalar> apply_transpose(const Vector<Scalar>& v) const { return p_ * v; }
  Vector<Scalar> preimage(const Vector<Scalar>& x) const { return p_pinv_ * x; }
  Vector<Scalar> project(const Vector<Scalar>& y) const { return q_ * y; }

  const Matrix<Scalar>& matrix() const { return p_; }
  const Matrix<Scalar>& projector() const { return q_; }

 private:
  Matrix<Scalar> p_;
  Matrix<Scalar> p_pinv_;
  Matrix<Scalar> q_;
};

/// P' = (A^T D A)^dagger A^T sqrt(D), applied through a retained sparse
/// LDL^T factorization of A^T D A. A singular Gram matrix switches to
/// conjugate gradients, which return the minimum-norm solution for
/// right-hand sides in the range.
template <typename Scalar>
class FactoredPreconditioner {
 public:
  static constexpr PreconditionerKind kind = PreconditionerKind::factored;
  using Sparse = Eigen::SparseMatrix<Scalar>;

  FactoredPreconditioner(const DesignMatrix<Scalar>& a, const Vector<Scalar>& weights)
      : a_(&a), sqrt_w_(weights.cwiseSqrt()) {
    if (weights.size() != a.rows()) throw DimensionError("D", "length does not match the rows of A");
    if ((weights.array() <= 0).any()) throw ParameterError("preconditioner weights must be positive");
    gram_ = a.weighted_gram(weights).sparseView();
    ldlt_.compute(gram_);
    bool singular = ldlt_.info() != Eigen::Success;
    if (!singular) {
      const Vector<Scalar> piv = ldlt_.vectorD().cwiseAbs();
      singular = piv.minCoeff() <= Scalar(kRankCutoff) * piv.maxCoeff();
    }
    if (singular) {
      log_warning("A^T D A is singular; falling back to conjugate gradients");
      use_cg_ = true;
      cg_.setTolerance(Scalar(1e-14));
      cg_.setMaxIterations(std::max<Index>(20 * gram_.rows(), 100));
      cg_.compute(gram_);
    }
  }

  // The iterative solver keeps a reference to gram_.
  FactoredPreconditioner(const FactoredPreconditioner&) = delete;
  FactoredPreconditioner& operator=(const FactoredPreconditioner&) = delete;

  Index dim() const { return a_->rows(); }
  bool uses_iterative_fallback() const { return use_cg_; }

  /// (A^T D A)^dagger v
  Vector<Scalar> solve(const Vector<Scalar>& v) const {
    if (use_cg_) return cg_.solve(v);
    return ldlt_.solve(v);
  }

  Vector<Scalar> apply(const Vector<Scalar>& y) const {
    return solve(a_->apply_transpose(sqrt_w_.cwiseProduct(y)));
  }
  Vector<Scalar> apply_transpose(const Vector<Scalar>& v) const {
    return sqrt_w_.cwiseProduct(a_->apply(solve(v)));
  }
  Vector<Scalar> preimage(const Vector<Scalar>& x) const { return sqrt_w_.cwiseProduct(a_->apply(x)); }
  Vector<Scalar> project(const Vector<Scalar>& y) const { return sqrt_w_.cwiseProduct(a_->apply(apply(y))); }

 private:
  const DesignMatrix<Scalar>* a_;
  Vector<Scalar> sqrt_w_;
  Sparse gram_;
  Eigen::SimplicialLDLT<Sparse> ldlt_;
  Eigen::ConjugateGradient<Sparse, Eigen::Lower | Eigen::Upper> cg_;
  bool use_cg_ = false;
};

/// P'' = (A^T W A)^dagger A^T sqrt(W) for a sparse diagonal W. Only rows in
/// the support of W are retained; y lives on that support.
template <typename Scalar>
class SketchedPreconditioner {
 public:
  static constexpr PreconditionerKind kind = PreconditionerKind::sketched;

  SketchedPreconditioner(const DesignMatrix<Scalar>& a, const Vector<Scalar>& w) {
    if (w.size() != a.rows()) throw DimensionError("W", "length does not match the rows of A");
    for (Index i = 0; i < w.size(); ++i)
      if (w(i) > 0) support_.push_back(i);
    rows_ = a.gather_rows(support_);
    sqrt_w_.resize(Index(support_.size()));
    for (std::size_t k = 0; k < support_.size(); ++k) sqrt_w_(Index(k)) = std::sqrt(w(support_[k]));
    const Matrix<Scalar> scaled = sqrt_w_.asDiagonal() * rows_;
    gram_pinv_ = pinv_symmetric<Scalar>(scaled.transpose() * scaled);
  }

  Index dim() const { return Index(support_.size()); }
  const std::vector<Index>& support() const { return support_; }
  /// (A^T W A)^dagger, precomputed once per phase.
  const Matrix<Scalar>& gram_pinv() const { return gram_pinv_; }

  Vector<Scalar> apply(const Vector<Scalar>& y) const {
    return gram_pinv_ * (rows_.transpose() * sqrt_w_.cwiseProduct(y));
  }
  Vector<Scalar> apply_transpose(const Vector<Scalar>& v) const {
    return sqrt_w_.cwiseProduct(rows_ * (gram_pinv_ * v));
  }
  Vector<Scalar> preimage(const Vector<Scalar>& x) const { return sqrt_w_.cwiseProduct(rows_ * x); }
  Vector<Scalar> project(const Vector<Scalar>& y) const { return sqrt_w_.cwiseProduct(rows_ * apply(y)); }

 private:
  std::vector<Index> support_;
  Matrix<Scalar> rows_;
  Vector<Scalar> sqrt_w_;
  Matrix<Scalar> gram_pinv_;
};

/// Diagonal of sqrt(D) A (A^T D A)^dagger A^T sqrt(D).
template <typename Scalar>
Vector<Scalar> leverage_scores(const DesignMatrix<Scalar>& a, const Vector<Scalar>& weights) {
  if (weights.size() != a.rows()) throw DimensionError("D", "length does not match the rows of A");
  const Matrix<Scalar> g = pinv_symmetric<Scalar>(a.weighted_gram(weights));
  Vector<Scalar> tau(a.rows());
  if (a.is_sparse()) {
    Vector<Scalar> row = Vector<Scalar>::Zero(a.cols());
    for (Index i = 0; i < a.rows(); ++i) {
      row.setZero();
      a.add_row(i, Scalar(1), row);
      tau(i) = weights(i) * row.dot(g * row);
    }
  } else {
    const Matrix<Scalar>& dense = a.dense();
    tau = weights.cwiseProduct((dense * g).cwiseProduct(dense).rowwise().sum());
  }
  return tau;
}

template <typename Scalar>
struct SparsifyResult {
  Vector<Scalar> weights;   // W, length n, mostly zero
  bool accepted = false;
  Scalar lower = 0;         // extreme eigenvalues of (A^T W A, A^T D A) on the range
  Scalar upper = 0;
  Index samples = 0;
  int attempts = 0;
  bool fallback = false;    // W = D after every attempt was rejected
};

/// Number of leverage-score samples drawn by `sparsify`.
inline Index sparsifier_sample_count(Index d, double oversample = 4.0) {
  const double dd = double(std::max<Index>(d, 2));
  return Index(std::ceil(8.0 * double(d) * std::log(dd) * oversample));
}

/// Leverage-score row sampling with replacement, rescaled so that
/// E[A^T W A] = A^T D A, followed by an explicit check of
/// (1/2) A^T D A <= A^T W A <= 2 A^T D A.
template <typename Scalar>
SparsifyResult<Scalar> sparsify(const DesignMatrix<Scalar>& a, const Vector<Scalar>& weights, std::uint64_t seed,
                                double oversample = 4.0) {
  SparsifyResult<Scalar> out;
  out.attempts = 1;
  const Vector<Scalar> tau = leverage_scores(a, weights);
  const Scalar total = tau.sum();
  out.weights = Vector<Scalar>::Zero(a.rows());
  if (!(total > 0)) {
    out.weights = weights;
    out.accepted = true;
    out.lower = out.upper = 1;
    return out;
  }
  const Index m = sparsifier_sample_count(a.cols(), oversample);
  std::vector<double> prob(static_cast<std::size_t>(a.rows()));
  for (Index i = 0; i < a.rows(); ++i) prob[std::size_t(i)] = double(std::max(tau(i), Scalar(0)) / total);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<Index> pick(prob.begin(), prob.end());
  for (Index k = 0; k < m; ++k) {
    const Index i = pick(rng);
    out.weights(i) += weights(i) / (Scalar(m) * Scalar(prob[std::size_t(i)]));
  }
  out.samples = m;
  const auto [lo, hi] = pencil_extremes<Scalar>(a.weighted_gram(out.weights), a.weighted_gram(weights));
  out.lower = lo;
  out.upper = hi;
  out.accepted = lo >= Scalar(0.5) && hi <= Scalar(2);
  return out;
}

/// Up to `max_attempts` seeds seed, seed+1, ...; then W = D.
template <typename Scalar>
SparsifyResult<Scalar> sparsify_with_retries(const DesignMatrix<Scalar>& a, const Vector<Scalar>& weights,
                                             std::uint64_t seed, int max_attempts = 8) {
  for (int k = 0; k < max_attempts; ++k) {
    SparsifyResult<Scalar> r = sparsify(a, weights, seed + std::uint64_t(k));
    r.attempts = k + 1;
    if (r.accepted) return r;
  }
  SparsifyResult<Scalar> r;
  r.weights = weights;
  r.accepted = true;
  r.lower = r.upper = 1;
  r.attempts = max_attempts;
  r.fallback = true;
  return r;
}

}  // namespace lph::solvers

#endif  // LPH_PRECONDITIONER_HPP
