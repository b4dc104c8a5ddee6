#include "chernoff/quantum_state.hpp"

#include <Eigen/Eigenvalues>

#include "chernoff/errors.hpp"
#include "chernoff/matrix_io.hpp"

namespace chernoff {
namespace {

Eigen::MatrixXcd integrate(const std::vector<QuadratureNode>& nodes, const PsfModel& psf, const PadBasis& basis,
                           double gamma) {
  const int d = basis.dim();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& node : nodes) {
    const Eigen::VectorXcd o = shifted_psf_overlaps(basis, psf, gamma * node.position);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(o, node.weight);
  }
  return acc.selfadjointView<Eigen::Lower>();
}

}  // namespace

DensityMatrix assemble_exact(const ObjectModel& obj, const PsfModel& psf, const PadBasis& basis, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  DensityMatrix rho;
  rho.gamma = gamma;
  rho.entries = integrate(obj.quadrature(1), psf, basis, gamma);
  if (!std::holds_alternative<PointSet>(obj.shape())) {
    const Eigen::MatrixXcd coarse = integrate(obj.quadrature(0), psf, basis, gamma);
    const double diff = (coarse - rho.entries).cwiseAbs().maxCoeff();
    if (diff > 1e-8)
      throw Error(ErrorCode::QuadratureNotConverged,
                  "object quadrature changed by " + std::to_string(diff) + " under refinement");
  }
  rho.entries = 0.5 * (rho.entries + rho.entries.adjoint()).eval();
  rho.trace_deficit = 1.0 - rho.entries.trace().real();
  if (rho.trace_deficit >= 0.05)
    throw Error(ErrorCode::TruncationTooLossy, "trace deficit " + std::to_string(rho.trace_deficit));
  return rho;
}

DensityMatrix assemble_perturbative(const MomentTable& moments, const PsfScalars& scalars, const Eigen::MatrixXcd& w,
                                    double gamma) {
  if (w.rows() < 6 || w.cols() < 6) throw Error(ErrorCode::DimensionMismatch, "perturbative form needs six modes");
  if (moments.max_order() < 2) throw Error(ErrorCode::InvalidArgument, "moments through order 2 are required");
  const double g2 = gamma * gamma;
  const double mx = moments.x2(), my = moments.y2();
  DensityMatrix rho;
  rho.gamma = gamma;
  rho.entries = Eigen::MatrixXcd::Zero(6, 6);
  rho.entries(1, 1) = mx * scalars.gamma_x2 * g2;
  rho.entries(2, 2) = my * scalars.gamma_y2 * g2;
  rho.entries(0, 0) = 1.0 - rho.entries(1, 1) - rho.entries(2, 2);
  rho.entries(3, 0) = 0.5 * (mx * w(3, 3) + my * w(3, 5)) * g2;
  rho.entries(5, 0) = 0.5 * my * w(5, 5) * g2;
  rho.entries(0, 3) = std::conj(rho.entries(3, 0));
  rho.entries(0, 5) = std::conj(rho.entries(5, 0));
  return rho;
}

PerturbativeBlocks perturbative_blocks(const DensityMatrix& rho) {
  PerturbativeBlocks b;
  b.nu = rho.entries;
  b.nu(0, 0) -= 1.0;
  b.nu_b = b.nu(0, 0).real();
  b.nu_d = b.nu.diagonal().real().tail(rho.dim() - 1);
  return b;
}

DensityMatrix repair_psd(const DensityMatrix& rho) {
  if (rho.trace_deficit >= 0.05)
    throw Error(ErrorCode::TruncationTooLossy, "trace deficit " + std::to_string(rho.trace_deficit));
  const Eigen::MatrixXcd h = 0.5 * (rho.entries + rho.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-10) throw Error(ErrorCode::NotPSD, "eigenvalue " + std::to_string(ev.minCoeff()));
  DensityMatrix out = rho;
  if (ev.minCoeff() < 0.0) {
    ev = ev.cwiseMax(0.0);
    out.entries = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  } else {
    out.entries = h;
  }
  const double tr = out.entries.trace().real();
  if (!(tr > 0.0)) throw Error(ErrorCode::NotPSD, "state has zero trace");
  out.entries /= tr;
  return out;
}

DensityMatrix reflect_state(const DensityMatrix& rho, const PadBasis& basis, Reflection r) {
  if (rho.dim() > basis.dim()) throw Error(ErrorCode::DimensionMismatch, "state larger than basis");
  Eigen::VectorXd sign(rho.dim());
  for (int m = 0; m < rho.dim(); ++m) {
    const int order = r == Reflection::Inversion ? basis.indices[m].p() : basis.indices[m].k;
    sign[m] = order % 2 ? -1.0 : 1.0;
  }
  DensityMatrix out = rho;
  out.entries = sign.asDiagonal() * rho.entries * sign.asDiagonal();
  return out;
}

void write_density_matrix(const DensityMatrix& rho, const std::string& stem) {
  write_complex_matrix(stem + "_re.txt", stem + "_im.txt", rho.entries);
}

}  // namespace chernoff
