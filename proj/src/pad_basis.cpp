#include "chernoff/pad_basis.hpp"

#include <Eigen/Eigenvalues>
#include <filesystem>

#include "chernoff/errors.hpp"
#include "chernoff/matrix_io.hpp"

namespace chernoff {
namespace {

Complex inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double area) {
  return Eigen::Map<const Eigen::VectorXcd>(a.data(), a.size()).dot(Eigen::Map<const Eigen::VectorXcd>(b.data(), b.size())) *
         area;
}

}  // namespace

std::vector<DerivKetIndex> pad_indexing(int max_total_order) {
  if (max_total_order < 0 || max_total_order > 4)
    throw Error(ErrorCode::InvalidArgument, "max total order must be in [0, 4]");
  std::vector<DerivKetIndex> out;
  for (int p = 0; p <= max_total_order; ++p)
    for (int k = p; k >= 0; --k) out.push_back({static_cast<int>(out.size()), k, p - k});
  return out;
}

std::vector<Eigen::MatrixXcd> derivative_functions(const PsfModel& psf, int max_total_order) {
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& idx : pad_indexing(max_total_order)) out.push_back(psf.sampled(idx.k, idx.l));
  return out;
}

PadBasis gram_schmidt(const std::vector<Eigen::MatrixXcd>& functions, const std::vector<DerivKetIndex>& indices,
                      double cell_area) {
  if (functions.size() != indices.size() || functions.empty())
    throw Error(ErrorCode::DimensionMismatch, "functions and indices must be non-empty and equal in length");
  const int n = static_cast<int>(functions.size());

  PadBasis b;
  b.cell_area = cell_area;
  std::vector<Eigen::VectorXcd> kept_coeffs;  // coefficients on the kept basis, per kept function
  for (int m = 0; m < n; ++m) {
    const double norm0 = std::sqrt(std::max(0.0, inner(functions[m], functions[m], cell_area).real()));
    if (!(norm0 > 0.0)) {
      b.warnings.push_back("dropped derivative " + std::to_string(indices[m].k) + "," + std::to_string(indices[m].l) +
                           ": zero norm");
      continue;
    }
    Eigen::MatrixXcd v = functions[m];
    const int d = static_cast<int>(b.functions.size());
    Eigen::VectorXcd coeff = Eigen::VectorXcd::Zero(d + 1);
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < d; ++j) {
        const Complex c = inner(b.functions[j], v, cell_area);
        v -= c * b.functions[j];
        coeff[j] += c;
      }
    }
    const double r = std::sqrt(std::max(0.0, inner(v, v, cell_area).real()));
    if (r < 1e-6 * norm0) {
      b.warnings.push_back("dropped derivative " + std::to_string(indices[m].k) + "," + std::to_string(indices[m].l) +
                           ": numerically dependent");
      continue;
    }
    coeff[d] = r;
    b.functions.push_back(v / r);
    kept_coeffs.push_back(coeff);
    DerivKetIndex idx = indices[m];
    idx.m = d;
    b.indices.push_back(idx);
  }

  const int d = static_cast<int>(b.functions.size());
  b.w = Eigen::MatrixXcd::Zero(d, d);
  for (int m = 0; m < d; ++m) b.w.col(m).head(m + 1) = kept_coeffs[m];
  b.w_inverse = b.w.triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(d, d));

  // Scale-free conditioning of the kept functions: W^H W is the Gram matrix.
  Eigen::MatrixXcd gram = b.w.adjoint() * b.w;
  const Eigen::VectorXd scale = gram.diagonal().real().cwiseSqrt().cwiseInverse();
  gram = scale.asDiagonal() * gram * scale.asDiagonal();
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(ev[0] > 0.0) || ev[d - 1] / ev[0] > 1e10)
    throw Error(ErrorCode::NumericallyDependent, "Gram matrix condition number exceeds 1e10");
  return b;
}

PadBasis build_pad_basis(const PsfModel& psf, int max_total_order) {
  PadBasis b = gram_schmidt(derivative_functions(psf, max_total_order), pad_indexing(max_total_order),
                            psf.grid().cell_area());
  if (psf.is_separable()) {
    const int n = psf.grid().size();
    b.factor_x.resize(n, 5);
    b.factor_y.resize(n, 5);
    for (int k = 0; k <= 4; ++k) {
      b.factor_x.col(k) = psf.sampled_factor(0, k);
      b.factor_y.col(k) = psf.sampled_factor(1, k);
    }
  }
  return b;
}

Complex overlap_with_shifted_psf(const PadBasis& basis, const PsfModel& psf, int m, const Eigen::Vector2d& x) {
  if (m < 0 || m >= basis.dim()) throw Error(ErrorCode::InvalidArgument, "mode index out of range");
  const Grid& g = psf.grid();
  if (x.norm() > 2.0 * g.half_width) throw Error(ErrorCode::OutOfDomain, "shift outside 2R");
  const int n = g.size();
  const Eigen::MatrixXcd& f = basis.functions[m];
  Complex acc = 0.0;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) acc += std::conj(f(r, c)) * psf.amplitude(g.coord(c) - x.x(), g.coord(r) - x.y());
  return acc * g.cell_area();
}

Eigen::VectorXcd shifted_psf_overlaps(const PadBasis& basis, const PsfModel& psf, const Eigen::Vector2d& x) {
  const Grid& g = psf.grid();
  if (x.norm() > 2.0 * g.half_width) throw Error(ErrorCode::OutOfDomain, "shift outside 2R");
  const int n = g.size();
  const int d = basis.dim();
  if (basis.factor_x.size() == 0) {
    Eigen::MatrixXcd shifted(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) shifted(r, c) = psf.amplitude(g.coord(c) - x.x(), g.coord(r) - x.y());
    Eigen::VectorXcd out(d);
    for (int m = 0; m < d; ++m) out[m] = inner(basis.functions[m], shifted, g.cell_area());
    return out;
  }
  Eigen::VectorXcd sx(n), sy(n);
  for (int i = 0; i < n; ++i) {
    sx[i] = psf.factor(0, 0, g.coord(i) - x.x());
    sy[i] = psf.factor(1, 0, g.coord(i) - x.y());
  }
  const Eigen::VectorXcd ax = basis.factor_x.adjoint() * sx * g.step;
  const Eigen::VectorXcd ay = basis.factor_y.adjoint() * sy * g.step;
  Eigen::VectorXcd deriv(d);
  for (int m = 0; m < d; ++m) deriv[m] = ax[basis.indices[m].k] * ay[basis.indices[m].l];
  return basis.w_inverse.adjoint() * deriv;
}

void dump_basis(const PadBasis& basis, const std::string& directory) {
  std::filesystem::create_directories(directory);
  for (int m = 0; m < basis.dim(); ++m) {
    const std::string stem = directory + "/mode_" + std::to_string(m);
    write_complex_matrix(stem + "_re.txt", stem + "_im.txt", basis.functions[m]);
  }
}

}  // namespace chernoff
