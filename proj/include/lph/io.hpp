#ifndef LPH_IO_HPP
#define LPH_IO_HPP

#include "lph/problem.hpp"

#include <iosfwd>
#include <string>

namespace lph {

/// Reads a Matrix Market `matrix coordinate|array real general` file.
/// Coordinate files may repeat an (i, j) pair; repeated entries are summed.
SparseRowMatrix<double> read_matrix_market(std::istream& in);
SparseRowMatrix<double> read_matrix_market_file(const std::string& path);

/// Writes coordinate format for sparse storage and array format for dense
/// storage, with 17 significant digits so a reload is entry-exact.
void write_matrix_market(std::ostream& out, const DesignMatrix<double>& a);
void write_matrix_market_file(const std::string& path, const DesignMatrix<double>& a);

/// One real per line; blank lines are ignored.
Vector<double> read_vector(std::istream& in);
Vector<double> read_vector_file(const std::string& path);
void write_vector(std::ostream& out, const Vector<double>& v);
void write_vector_file(const std::string& path, const Vector<double>& v);

/// Loads A, b and c from disk and validates them into an LpProblem.
LpProblem<double> load_problem(const std::string& matrix_path, const std::string& b_path,
                               const std::string& c_path, double p);

}  // namespace lph

#endif  // LPH_IO_HPP
