#pragma once

#include <Eigen/Dense>
#include <string>

#include "chernoff/pad_basis.hpp"
#include "chernoff/scene.hpp"

namespace chernoff {

// Truncated single-photon state in the PAD basis.
struct DensityMatrix {
  Eigen::MatrixXcd entries;
  double trace_deficit = 0.0;  // 1 - trace before any renormalization
  double gamma = 0.0;

  int dim() const { return static_cast<int>(entries.rows()); }
};

// rho = rho_0 + nu with rho_0 = |phi_0><phi_0|.
struct PerturbativeBlocks {
  double nu_b = 0.0;     // nu(0, 0)
  Eigen::VectorXd nu_d;  // diagonal of nu on modes 1..D-1
  Eigen::MatrixXcd nu;
};

// Integrates the object's photon distribution against mode overlaps of the shifted PSF.
// Continuous shapes are checked against a coarser rule and throw QuadratureNotConverged
// when the two disagree.
DensityMatrix assemble_exact(const ObjectModel& obj, const PsfModel& psf, const PadBasis& basis, double gamma);

// Sparse O(gamma^2) form on the six lowest modes. Trace is exactly one; not PSD in general.
DensityMatrix assemble_perturbative(const MomentTable& moments, const PsfScalars& scalars, const Eigen::MatrixXcd& w,
                                    double gamma);

PerturbativeBlocks perturbative_blocks(const DensityMatrix& rho);

// Clamps eigenvalues in [-1e-10, 0) to zero and rescales to unit trace. Throws NotPSD for
// anything more negative and TruncationTooLossy when trace_deficit >= 0.05.
DensityMatrix repair_psd(const DensityMatrix& rho);

// Conjugation by diag((-1)^{p_m}) (point inversion) or diag((-1)^{k_m}) (mirror x -> -x).
enum class Reflection { Inversion, MirrorX };
DensityMatrix reflect_state(const DensityMatrix& rho, const PadBasis& basis, Reflection r);

void write_density_matrix(const DensityMatrix& rho, const std::string& stem);

}  // namespace chernoff
