#include "lrcert/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lrcert {

Matrix read_matrix(std::istream& in) {
  long long rows = 0;
  long long cols = 0;
  if (!(in >> rows >> cols)) {
    throw std::invalid_argument("matrix read: missing 'rows cols' header");
  }
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("matrix read: dimensions must be positive");
  }
  Matrix A(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    for (long long j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!(in >> v)) {
        std::ostringstream msg;
        msg << "matrix read: expected " << rows * cols << " entries, stream ended at ("
            << i << "," << j << ")";
        throw std::invalid_argument(msg.str());
      }
      if (!std::isfinite(v)) {
        throw std::invalid_argument("matrix read: non-finite entry");
      }
      A(i, j) = v;
    }
  }
  return A;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("matrix read: cannot open '" + path + "'");
  }
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& A) {
  out << A.rows() << " " << A.cols() << "\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out << A(i, j) << (j + 1 < A.cols() ? " " : "");
    }
    out << "\n";
  }
}

void write_matrix_file(const std::string& path, const Matrix& A) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("matrix write: cannot open '" + path + "'");
  }
  write_matrix(out, A);
}

}  // namespace lrcert
