#include "chernoff/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "chernoff/errors.hpp"

namespace chernoff {

Eigen::MatrixXd read_real_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!ss.eof()) throw Error(ErrorCode::Io, "non-numeric entry in '" + path + "'");
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::Io, "ragged rows in '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::Io, "empty matrix file '" + path + "'");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_real_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
}

Eigen::MatrixXcd read_complex_matrix(const std::string& real_path, const std::string& imag_path) {
  const Eigen::MatrixXd re = read_real_matrix(real_path);
  const Eigen::MatrixXd im = read_real_matrix(imag_path);
  if (re.rows() != im.rows() || re.cols() != im.cols())
    throw Error(ErrorCode::Io, "real and imaginary parts differ in shape");
  Eigen::MatrixXcd m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

void write_complex_matrix(const std::string& real_path, const std::string& imag_path,
                          const Eigen::MatrixXcd& m) {
  write_real_matrix(real_path, m.real());
  write_real_matrix(imag_path, m.imag());
}

}  // namespace chernoff
