#ifndef LPH_LINALG_HPP
#define LPH_LINALG_HPP

#include "lph/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace lph {

/// Relative cutoff below which singular values are treated as zero.
inline constexpr double kRankCutoff = 1e-12;

/// Spectral decomposition of a symmetric positive semidefinite matrix with
/// the numerically-zero part of the spectrum removed. Functions of the
/// matrix (pseudo-inverse, square roots, range projector) are read off the
/// retained eigenpairs.
template <typename Scalar>
struct PsdSpectrum {
  Matrix<Scalar> basis;     // n x r, orthonormal eigenvectors spanning the range
  Vector<Scalar> values;    // r retained eigenvalues, all > cutoff * max

  explicit PsdSpectrum(const Matrix<Scalar>& m, Scalar cutoff = Scalar(kRankCutoff)) {
    const Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(m);
    const Vector<Scalar>& ev = eig.eigenvalues();
    const Scalar top = ev.size() ? std::max(ev.maxCoeff(), Scalar(0)) : Scalar(0);
    Index r = 0;
    for (Index j = 0; j < ev.size(); ++j)
      if (top > 0 && ev(j) > cutoff * top) ++r;
    basis.resize(m.rows(), r);
    values.resize(r);
    Index k = 0;
    for (Index j = 0; j < ev.size(); ++j) {
      if (top > 0 && ev(j) > cutoff * top) {
        basis.col(k) = eig.eigenvectors().col(j);
        values(k) = ev(j);
        ++k;
      }
    }
  }

  Index rank() const { return values.size(); }

  /// V f(Λ) V^T for a scalar function f applied to the retained spectrum.
  template <typename F>
  Matrix<Scalar> function(F&& f) const {
    Vector<Scalar> fv = values.unaryExpr(f);
    return basis * fv.asDiagonal() * basis.transpose();
  }

  Matrix<Scalar> pinv() const {
    return function([](Scalar v) { return Scalar(1) / v; });
  }
  Matrix<Scalar> sqrt() const {
    return function([](Scalar v) { return std::sqrt(v); });
  }
  Matrix<Scalar> pinv_sqrt() const {
    return function([](Scalar v) { return Scalar(1) / std::sqrt(v); });
  }
  Matrix<Scalar> projector() const { return basis * basis.transpose(); }
};

template <typename Scalar>
Matrix<Scalar> pinv_symmetric(const Matrix<Scalar>& m) {
  return PsdSpectrum<Scalar>(m).pinv();
}

/// Extreme eigenvalues of the pencil (a, b) restricted to range(b), i.e. the
/// extreme values of z^T a z / z^T b z over z in range(b).
template <typename Scalar>
std::pair<Scalar, Scalar> pencil_extremes(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  const PsdSpectrum<Scalar> spec(b);
  if (spec.rank() == 0) return {Scalar(0), Scalar(0)};
  const Vector<Scalar> inv_sqrt = spec.values.cwiseSqrt().cwiseInverse();
  const Matrix<Scalar> w = spec.basis * inv_sqrt.asDiagonal();
  const Matrix<Scalar> reduced = w.transpose() * a * w;
  const Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(reduced, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

}  // namespace lph

#endif  // LPH_LINALG_HPP
