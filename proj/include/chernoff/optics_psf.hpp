#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>

#include "chernoff/numerics.hpp"

namespace chernoff {

// Uniformly sampled 1D complex profile; sample i sits at origin + i * step.
struct TabulatedProfile {
  double origin = 0.0;
  double step = 0.0;
  Eigen::VectorXcd values;

  Complex value(double t) const;
  double min_coord() const { return origin; }
  double max_coord() const { return origin + step * static_cast<double>(values.size() - 1); }
};

// Unit-width Gaussian amplitude (2 pi)^(-1/2) exp(-(x^2 + y^2) / 4).
struct Gaussian2D {};
struct SeparableTabulated {
  TabulatedProfile x;
  TabulatedProfile y;
};
// Row index runs along +y, column index along +x; both axes share origin and step.
struct Tabulated2D {
  double origin = 0.0;
  double step = 0.0;
  Eigen::MatrixXcd values;
};

using PsfKind = std::variant<Gaussian2D, SeparableTabulated, Tabulated2D>;

// Coherent amplitude PSF in non-dimensional image coordinates (units of sigma).
class PsfModel {
 public:
  static PsfModel gaussian(Grid grid = {});
  static PsfModel separable(TabulatedProfile x, TabulatedProfile y, Grid grid = {});
  static PsfModel tabulated(Tabulated2D table, Grid grid = {});
  static PsfModel load_tabulated(const std::string& real_path, const std::string& imag_path, double origin,
                                 double step, Grid grid = {});

  const PsfKind& kind() const { return kind_; }
  const Grid& grid() const { return grid_; }
  std::string kind_name() const;
  bool is_separable() const { return !std::holds_alternative<Tabulated2D>(kind_); }

  Complex amplitude(double x, double y) const;
  // k-th derivative of the 1D factor along axis 0 (x) or 1 (y). Separable kinds only.
  Complex factor(int axis, int k, double t) const;
  Complex derivative(int k, int l, double x, double y) const;

  // Factor derivative sampled on the grid coordinates.
  Eigen::VectorXcd sampled_factor(int axis, int k) const;
  // d^(k+l) psi / dx^k dy^l on the grid; rows along y, columns along x.
  Eigen::MatrixXcd sampled(int k = 0, int l = 0) const;

 private:
  PsfModel(PsfKind kind, Grid grid);
  void validate() const;

  PsfKind kind_;
  Grid grid_;
};

struct PsfScalars {
  double gamma_x2 = 0.0;
  double gamma_y2 = 0.0;
  double psi_x2 = 0.0;
  double psi_y2 = 0.0;
  bool has_zeros = false;
  bool separable = true;

  // Throws DivergentIntegral when the PSF has zeros.
  double psi(int axis) const;
  double gamma(int axis) const { return axis == 0 ? gamma_x2 : gamma_y2; }
};

Complex autocorrelation(const PsfModel& psf, const Eigen::Vector2d& x);
PsfScalars psf_scalars(const PsfModel& psf);
// d^(k+l) |psi|^2 / dx^k dy^l at x, k + l <= 4.
double incoherent_psf_derivative(const PsfModel& psf, int k, int l, const Eigen::Vector2d& x);

// True when the samples show a sign change or an isolated near-zero dip of the amplitude.
bool profile_has_zeros(const Eigen::VectorXcd& samples);

}  // namespace chernoff
