#include "dtr/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "dtr/errors.hpp"

namespace dtr {

namespace {

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw_error(ErrorCode::io_error, "cannot open '" + path + "' for reading");
  }

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t ncols = 0;
  bool first_data_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_double(cells[j], row[j])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (line_no == 1) continue;  // header row
      throw_error(ErrorCode::io_error, "'" + path + "' row " +
                                           std::to_string(line_no) +
                                           ": non-numeric cell");
    }
    if (first_data_row) {
      ncols = row.size();
      first_data_row = false;
    } else if (row.size() != ncols) {
      throw_error(ErrorCode::io_error,
                  "'" + path + "' row " + std::to_string(line_no) +
                      ": ragged row (" + std::to_string(row.size()) +
                      " cells, expected " + std::to_string(ncols) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw_error(ErrorCode::io_error, "'" + path + "' contains no data rows");
  }

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(ncols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& header) {
  std::ofstream out(path);
  if (!out) {
    throw_error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  }
  if (!header.empty()) out << header << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) {
    throw_error(ErrorCode::io_error, "write to '" + path + "' failed");
  }
}

Eigen::VectorXd read_vector_csv(const std::string& path) {
  Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw_error(ErrorCode::io_error,
              "'" + path + "' is " + std::to_string(m.rows()) + "x" +
                  std::to_string(m.cols()) + ", expected a single column");
}

void write_vector_csv(const std::string& path, const Eigen::VectorXd& v,
                      const std::string& header) {
  write_matrix_csv(path, v, header);
}

}  // namespace dtr
