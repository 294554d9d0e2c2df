#ifndef LPH_OBJECTIVE_HPP
#define LPH_OBJECTIVE_HPP

#include "lph/preconditioner.hpp"
#include "lph/problem.hpp"
#include "lph/smoothing.hpp"

namespace lph::solvers {

template <typename Scalar>
struct ValueGradient {
  Scalar value;
  Vector<Scalar> gradient;
};

/// g(y) = c . x + tilde-f(A x - b) with x = x_a + P y, for one phase of the
/// continuation. The anchor x_a defaults to 0, which gives the textbook
/// g(y) = c . P y + tilde-f(A P y - b); a nonzero anchor leaves the Hessian
/// unchanged and keeps iterates small when x_a is the warm start.
///
/// The preconditioner is held by reference and must outlive the objective.
template <typename Scalar, typename Precond>
class PreconditionedObjective {
 public:
  PreconditionedObjective(const LpProblem<Scalar>& problem, smoothing::SmoothedLoss<Scalar> loss, Scalar h,
                          const Precond& precond)
      : PreconditionedObjective(problem, std::move(loss), h, precond, Vector<Scalar>::Zero(problem.d())) {}

  PreconditionedObjective(const LpProblem<Scalar>& problem, smoothing::SmoothedLoss<Scalar> loss, Scalar h,
                          const Precond& precond, Vector<Scalar> anchor)
      : problem_(&problem), loss_(std::move(loss)), h_(h), bound_(loss_, (1 - h) * loss_.t()), precond_(&precond),
        anchor_(std::move(anchor)) {
    if (!loss_.extended() || loss_.size() != problem.n())
      throw DimensionError("loss", "extension intervals must match the rows of A");
    if (anchor_.size() != problem.d()) throw DimensionError("anchor", "length does not match the columns of A");
    c_image_ = precond.apply_transpose(problem.c());
    anchor_residual_ = problem.residual(anchor_);
    anchor_value_ = problem.c().dot(anchor_);
  }

  Index dim() const { return precond_->dim(); }
  const LpProblem<Scalar>& problem() const { return *problem_; }
  const smoothing::SmoothedLoss<Scalar>& loss() const { return loss_; }
  const Precond& preconditioner() const { return *precond_; }
  Scalar h() const { return h_; }
  Scalar radius() const { return bound_.radius(); }
  /// tilde-f_i at s, smoothing radius (1 - h) t.
  smoothing::Extended<Scalar> coordinate(Index i, Scalar s) const { return bound_(i, s); }
  /// P^T c
  const Vector<Scalar>& c_image() const { return c_image_; }

  const Vector<Scalar>& anchor() const { return anchor_; }
  /// A x_a - b
  const Vector<Scalar>& anchor_residual() const { return anchor_residual_; }

  Vector<Scalar> x_of(const Vector<Scalar>& y) const { return anchor_ + precond_->apply(y); }
  Vector<Scalar> preimage(const Vector<Scalar>& x) const { return precond_->preimage(x - anchor_); }
  Vector<Scalar> project(const Vector<Scalar>& y) const { return precond_->project(y); }

  /// A x_of(y) - b, accumulated from the anchor residual.
  Vector<Scalar> residual_of(const Vector<Scalar>& y) const {
    return anchor_residual_ + problem_->A().apply(precond_->apply(y));
  }

  Scalar value(const Vector<Scalar>& y) const {
    const Vector<Scalar> step = precond_->apply(y);
    return value_of(anchor_value_ + problem_->c().dot(step), anchor_residual_ + problem_->A().apply(step));
  }

  Scalar value_at_x(const Vector<Scalar>& x) const { return value_of(problem_->c().dot(x), problem_->residual(x)); }

  ValueGradient<Scalar> evaluate(const Vector<Scalar>& y) const {
    ++evaluations_;
    const Vector<Scalar> step = precond_->apply(y);
    const Vector<Scalar> s = anchor_residual_ + problem_->A().apply(step);
    Scalar total(0);
    Vector<Scalar> slope(s.size());
    for (Index i = 0; i < s.size(); ++i) {
      const smoothing::Extended<Scalar> e = bound_(i, s(i));
      total += e.value;
      slope(i) = e.first;
    }
    Vector<Scalar> grad = precond_->apply_transpose(problem_->c() + problem_->A().apply_transpose(slope));
    return {anchor_value_ + problem_->c().dot(step) + total, std::move(grad)};
  }

  /// c + A^T tilde-f'(A x - b), the x-space gradient.
  Vector<Scalar> x_gradient(const Vector<Scalar>& x) const {
    const Vector<Scalar> s = problem_->residual(x);
    Vector<Scalar> slope(s.size());
    for (Index i = 0; i < s.size(); ++i) slope(i) = bound_(i, s(i)).first;
    return problem_->c() + problem_->A().apply_transpose(slope);
  }

  /// Diagonal of tilde-f'' at A x - b.
  Vector<Scalar> curvature_at_x(const Vector<Scalar>& x) const {
    const Vector<Scalar> s = problem_->residual(x);
    Vector<Scalar> out(s.size());
    for (Index i = 0; i < s.size(); ++i) out(i) = bound_(i, s(i)).second;
    return out;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  Scalar value_of(Scalar linear, const Vector<Scalar>& s) const {
    Scalar total(0);
    for (Index i = 0; i < s.size(); ++i) total += bound_(i, s(i)).value;
    return linear + total;
  }

  const LpProblem<Scalar>* problem_;
  smoothing::SmoothedLoss<Scalar> loss_;
  Scalar h_;
  smoothing::BoundLoss<Scalar> bound_;
  const Precond* precond_;
  Vector<Scalar> anchor_;
  Vector<Scalar> anchor_residual_;
  Scalar anchor_value_ = 0;
  Vector<Scalar> c_image_;
  mutable std::size_t evaluations_ = 0;
};

/// Value and analytic gradient of the preconditioned phase objective.
template <typename Scalar, typename Precond>
ValueGradient<Scalar> g_eval(const PreconditionedObjective<Scalar, Precond>& obj, const Vector<Scalar>& y) {
  if (y.size() != obj.dim()) throw DimensionError("y", "length does not match the preconditioner");
  return obj.evaluate(y);
}

/// Hessian of g in the y variable for the dense preconditioner,
/// P A^T Sigma A P with Sigma the diagonal of tilde-f''.
template <typename Scalar>
Matrix<Scalar> dense_hessian(const PreconditionedObjective<Scalar, DensePreconditioner<Scalar>>& obj,
                             const Vector<Scalar>& y) {
  const Matrix<Scalar>& p = obj.preconditioner().matrix();
  const Matrix<Scalar> ap = obj.problem().A().to_dense() * p;
  const Vector<Scalar> sigma = obj.curvature_at_x(obj.x_of(y));
  return ap.transpose() * sigma.asDiagonal() * ap;
}

}  // namespace lph::solvers

#endif  // LPH_OBJECTIVE_HPP
