#pragma once

#include <Eigen/Dense>
#include <string>

namespace dtr {

// Comma-separated dense matrix, row-major, optional single header row
// (detected: any cell of the first row that does not parse as a number).
// Ragged rows are rejected with a message naming the file and row.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Writes with %.17g so a read round-trips bit-exactly. `header` may be empty.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& header = "");

// Single-column convenience wrappers. Reading accepts an n x 1 matrix (or a
// 1 x n row, transposed).
Eigen::VectorXd read_vector_csv(const std::string& path);
void write_vector_csv(const std::string& path, const Eigen::VectorXd& v,
                      const std::string& header = "");

std::string format_double(double value);  // %.17g

}  // namespace dtr
