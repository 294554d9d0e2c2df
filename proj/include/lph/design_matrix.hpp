#ifndef LPH_DESIGN_MATRIX_HPP
#define LPH_DESIGN_MATRIX_HPP

#include "lph/types.hpp"

#include <variant>
#include <vector>

namespace lph {

/// Fraction of stored entries below which a matrix is kept in compressed rows.
inline constexpr double kSparseDensityThreshold = 0.25;

/// The n x d regression matrix, held either densely or in compressed sparse
/// rows.
template <typename Scalar>
class DesignMatrix {
 public:
  using Dense = Matrix<Scalar>;
  using Sparse = SparseRowMatrix<Scalar>;

  DesignMatrix() : store_(Dense()) {}
  explicit DesignMatrix(Dense a) : store_(std::move(a)) {}
  explicit DesignMatrix(Sparse a) : store_(std::move(a)) { std::get<Sparse>(store_).makeCompressed(); }

  /// Picks the storage from the actual fill: sparse when nnz/(n d) < 0.25.
  static DesignMatrix automatic(const Dense& a) {
    const Index nz = (a.array() != Scalar(0)).count();
    const double fill = a.size() ? double(nz) / double(a.size()) : 1.0;
    if (fill < kSparseDensityThreshold) return DesignMatrix(Sparse(a.sparseView()));
    return DesignMatrix(a);
  }
  static DesignMatrix automatic(const Sparse& a) {
    const double fill = a.size() ? double(a.nonZeros()) / double(a.size()) : 1.0;
    if (fill < kSparseDensityThreshold) return DesignMatrix(a);
    return DesignMatrix(Dense(a));
  }

  bool is_sparse() const { return std::holds_alternative<Sparse>(store_); }
  Index rows() const { return std::visit([](const auto& m) { return Index(m.rows()); }, store_); }
  Index cols() const { return std::visit([](const auto& m) { return Index(m.cols()); }, store_); }

  /// Stored nonzeros (explicit zeros in dense storage are not counted).
  Index nnz() const {
    if (is_sparse()) return std::get<Sparse>(store_).nonZeros();
    return (std::get<Dense>(store_).array() != Scalar(0)).count();
  }

  const Dense& dense() const { return std::get<Dense>(store_); }
  const Sparse& sparse() const { return std::get<Sparse>(store_); }

  Dense to_dense() const {
    if (is_sparse()) return Dense(sparse());
    return dense();
  }

  Vector<Scalar> apply(const Vector<Scalar>& x) const {
    Vector<Scalar> out(rows());
    if (is_sparse()) {
      const Sparse& a = sparse();
      for (Index i = 0; i < a.outerSize(); ++i) {
        Scalar acc(0);
        for (typename Sparse::InnerIterator it(a, i); it; ++it) acc += it.value() * x(it.col());
        out(i) = acc;
      }
    } else {
      out.noalias() = dense() * x;
    }
    return out;
  }

  /// |A| |x|, entrywise absolute values.
  Vector<Scalar> apply_abs(const Vector<Scalar>& x) const {
    if (is_sparse()) return sparse().cwiseAbs() * x.cwiseAbs();
    return dense().cwiseAbs() * x.cwiseAbs();
  }

  Vector<Scalar> apply_transpose(const Vector<Scalar>& r) const {
    if (is_sparse()) return sparse().transpose() * r;
    return dense().transpose() * r;
  }

  /// A^T diag(w) A as a dense d x d matrix.
  Dense weighted_gram(const Vector<Scalar>& w) const {
    if (is_sparse()) {
      const Sparse& a = sparse();
      Sparse wa = w.asDiagonal() * a;
      return Dense(Sparse(a.transpose() * wa));
    }
    const Dense& a = dense();
    Dense out = a.transpose() * w.asDiagonal() * a;
    return Scalar(0.5) * (out + out.transpose());
  }

  Scalar row_dot(Index i, const Vector<Scalar>& x) const {
    if (is_sparse()) {
      Scalar acc(0);
      for (typename Sparse::InnerIterator it(sparse(), i); it; ++it) acc += it.value() * x(it.col());
      return acc;
    }
    return dense().row(i).dot(x);
  }

  /// out += alpha * a_i
  void add_row(Index i, Scalar alpha, Vector<Scalar>& out) const {
    if (is_sparse()) {
      for (typename Sparse::InnerIterator it(sparse(), i); it; ++it) out(it.col()) += alpha * it.value();
    } else {
      out += alpha * dense().row(i).transpose();
    }
  }

  /// Rows listed in `rows`, gathered densely.
  Dense gather_rows(const std::vector<Index>& rows) const {
    Dense out = Dense::Zero(Index(rows.size()), cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (is_sparse()) {
        for (typename Sparse::InnerIterator it(sparse(), rows[k]); it; ++it) out(Index(k), it.col()) = it.value();
      } else {
        out.row(Index(k)) = dense().row(rows[k]);
      }
    }
    return out;
  }

 private:
  std::variant<Dense, Sparse> store_;
};

}  // namespace lph

#endif  // LPH_DESIGN_MATRIX_HPP
