#pragma once

#include <Eigen/Dense>
#include <string>

namespace chernoff {

// Plain-text matrices: whitespace-separated values, one row per line. Lines starting
// with '#' are ignored.
Eigen::MatrixXd read_real_matrix(const std::string& path);
void write_real_matrix(const std::string& path, const Eigen::MatrixXd& m);

// Complex matrices are stored as two real matrices (real part, imaginary part).
Eigen::MatrixXcd read_complex_matrix(const std::string& real_path, const std::string& imag_path);
void write_complex_matrix(const std::string& real_path, const std::string& imag_path,
                          const Eigen::MatrixXcd& m);

}  // namespace chernoff
