#ifndef LPH_TYPES_HPP
#define LPH_TYPES_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lph {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using SparseRowMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Inconsistent sizes between objects; `object()` names the offender.
class DimensionError : public Error {
 public:
  DimensionError(const std::string& object, const std::string& what)
      : Error(object + ": " + what), object_(object) {}
  const std::string& object() const noexcept { return object_; }

 private:
  std::string object_;
};

/// A scalar parameter outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to meet its contract.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace lph

#endif  // LPH_TYPES_HPP
