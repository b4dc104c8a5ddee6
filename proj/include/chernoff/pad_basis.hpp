#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "chernoff/optics_psf.hpp"

namespace chernoff {

struct DerivKetIndex {
  int m = 0;
  int k = 0;
  int l = 0;
  int p() const { return k + l; }
};

// (0,0),(1,0),(0,1),(2,0),(1,1),(0,2), then ascending total order with descending k.
std::vector<DerivKetIndex> pad_indexing(int max_total_order);

// Sampled PSF derivatives on the PSF grid, one matrix per index.
std::vector<Eigen::MatrixXcd> derivative_functions(const PsfModel& psf, int max_total_order);

struct PadBasis {
  std::vector<DerivKetIndex> indices;
  std::vector<Eigen::MatrixXcd> functions;
  Eigen::MatrixXcd w;          // upper-triangular, derivative_m = sum_n w(n, m) phi_n
  Eigen::MatrixXcd w_inverse;
  double cell_area = 0.0;
  // Sampled 1D factor derivatives (columns k = 0..4) for separable PSFs; empty otherwise.
  Eigen::MatrixXcd factor_x;
  Eigen::MatrixXcd factor_y;
  std::vector<std::string> warnings;

  int dim() const { return static_cast<int>(indices.size()); }
  int parity(int m) const { return indices[m].p() % 2; }
};

// Modified Gram-Schmidt with one re-orthogonalization pass. Functions that are numerically
// dependent on earlier ones are dropped with a warning.
PadBasis gram_schmidt(const std::vector<Eigen::MatrixXcd>& functions, const std::vector<DerivKetIndex>& indices,
                      double cell_area);

PadBasis build_pad_basis(const PsfModel& psf, int max_total_order = 4);

// <phi_m | psi_x> by 2D quadrature on the grid.
Complex overlap_with_shifted_psf(const PadBasis& basis, const PsfModel& psf, int m, const Eigen::Vector2d& x);

// All overlaps <phi_m | psi_x> at once. Uses 1D factor sums for separable PSFs.
Eigen::VectorXcd shifted_psf_overlaps(const PadBasis& basis, const PsfModel& psf, const Eigen::Vector2d& x);

// Writes mode_<m>_re.txt and mode_<m>_im.txt into directory.
void dump_basis(const PadBasis& basis, const std::string& directory);

}  // namespace chernoff
