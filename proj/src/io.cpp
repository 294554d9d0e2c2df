#include "lph/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace lph {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); });
}

double parse_real(const std::string& token, std::size_t line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw ParseError("expected a real number, got '" + token + "'", line_no);
  return v;
}

long long parse_int(const std::string& token, std::size_t line_no) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError("expected an integer, got '" + token + "'", line_no);
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

}  // namespace

SparseRowMatrix<double> read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market file", 1);
  ++line_no;
  const std::vector<std::string> header = split(lower(line));
  if (header.size() != 5 || header[0] != "%%matrixmarket" || header[1] != "matrix")
    throw ParseError("missing '%%MatrixMarket matrix' header", line_no);
  const bool coordinate = header[2] == "coordinate";
  if (!coordinate && header[2] != "array") throw ParseError("unsupported layout '" + header[2] + "'", line_no);
  if (header[3] != "real") throw ParseError("unsupported field '" + header[3] + "', expected real", line_no);
  if (header[4] != "general") throw ParseError("unsupported symmetry '" + header[4] + "', expected general", line_no);

  std::vector<std::string> size_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line) || line[0] == '%') continue;
    size_line = split(line);
    break;
  }
  if (size_line.empty()) throw ParseError("missing size line", line_no + 1);
  if (size_line.size() != (coordinate ? 3u : 2u)) throw ParseError("malformed size line", line_no);
  const long long rows = parse_int(size_line[0], line_no);
  const long long cols = parse_int(size_line[1], line_no);
  const long long count = coordinate ? parse_int(size_line[2], line_no) : rows * cols;
  if (rows < 0 || cols < 0 || count < 0) throw ParseError("negative size", line_no);

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(std::size_t(count));
  long long seen = 0;
  while (seen < count && std::getline(in, line)) {
    ++line_no;
    if (blank(line) || line[0] == '%') continue;
    const std::vector<std::string> tok = split(line);
    if (coordinate) {
      if (tok.size() != 3) throw ParseError("expected 'row col value'", line_no);
      const long long i = parse_int(tok[0], line_no);
      const long long j = parse_int(tok[1], line_no);
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError("entry index out of range", line_no);
      entries.emplace_back(Index(i - 1), Index(j - 1), parse_real(tok[2], line_no));
    } else {
      if (tok.size() != 1) throw ParseError("expected one value per line", line_no);
      const double v = parse_real(tok[0], line_no);
      // array layout is column-major
      if (v != 0.0) entries.emplace_back(Index(seen % rows), Index(seen / rows), v);
    }
    ++seen;
  }
  if (seen < count)
    throw ParseError("expected " + std::to_string(count) + " entries, found " + std::to_string(seen), line_no);
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line) && line[0] != '%') throw ParseError("unexpected data after the last entry", line_no);
  }
  SparseRowMatrix<double> a(rows, cols);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return a;
}

SparseRowMatrix<double> read_matrix_market_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const DesignMatrix<double>& a) {
  out << std::setprecision(17);
  if (a.is_sparse()) {
    const SparseRowMatrix<double>& m = a.sparse();
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (Index i = 0; i < m.outerSize(); ++i)
      for (SparseRowMatrix<double>::InnerIterator it(m, i); it; ++it)
        out << (i + 1) << ' ' << (it.col() + 1) << ' ' << it.value() << '\n';
  } else {
    const Matrix<double>& m = a.dense();
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i) out << m(i, j) << '\n';
  }
}

void write_matrix_market_file(const std::string& path, const DesignMatrix<double>& a) {
  std::ofstream out = open_output(path);
  write_matrix_market(out, a);
}

Vector<double> read_vector(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const std::vector<std::string> tok = split(line);
    if (tok.size() != 1) throw ParseError("expected one value per line", line_no);
    values.push_back(parse_real(tok[0], line_no));
  }
  return Eigen::Map<const Vector<double>>(values.data(), Index(values.size()));
}

Vector<double> read_vector_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_vector(in);
}

void write_vector(std::ostream& out, const Vector<double>& v) {
  out << std::setprecision(17);
  for (Index i = 0; i < v.size(); ++i) out << v(i) << '\n';
}

void write_vector_file(const std::string& path, const Vector<double>& v) {
  std::ofstream out = open_output(path);
  write_vector(out, v);
}

LpProblem<double> load_problem(const std::string& matrix_path, const std::string& b_path,
                               const std::string& c_path, double p) {
  if (!std::isfinite(p) || !(p > 1.0)) throw ParameterError("exponent p must be finite and satisfy p > 1");
  SparseRowMatrix<double> a = read_matrix_market_file(matrix_path);
  Vector<double> b = read_vector_file(b_path);
  Vector<double> c = read_vector_file(c_path);
  return LpProblem<double>(DesignMatrix<double>::automatic(a), std::move(b), std::move(c), p);
}

}  // namespace lph
