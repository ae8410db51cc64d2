#pragma once

#include <iosfwd>
#include <string>

#include "lrcert/matrix_ops.hpp"

namespace lrcert {

// Matrix text format: first line "rows cols", then `rows` lines of `cols`
// whitespace-separated decimal reals (scientific notation accepted).

Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);

void write_matrix(std::ostream& out, const Matrix& A);
void write_matrix_file(const std::string& path, const Matrix& A);

}  // namespace lrcert
