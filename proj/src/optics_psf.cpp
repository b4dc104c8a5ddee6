#include "chernoff/optics_psf.hpp"

#include <cmath>
#include <numbers>

#include "chernoff/errors.hpp"
#include "chernoff/matrix_io.hpp"

namespace chernoff {
namespace {

const double kGaussNorm = std::pow(2.0 * std::numbers::pi, -0.25);

Complex gaussian_factor(int k, double t) {
  return kGaussNorm * std::pow(-0.5, k) * hermite_phys(k, 0.5 * t) * std::exp(-0.25 * t * t);
}

Complex table_value(const Eigen::VectorXcd& v, double origin, double step, double t) {
  const double u = (t - origin) / step;
  const long i0 = static_cast<long>(std::floor(u));
  Complex acc = 0.0;
  for (long j = i0 - 1; j <= i0 + 2; ++j) {
    if (j < 0 || j >= v.size()) continue;
    acc += v[j] * keys_kernel(u - static_cast<double>(j));
  }
  return acc;
}

Complex table_value_2d(const Tabulated2D& tab, double x, double y) {
  const double u = (x - tab.origin) / tab.step;
  const double v = (y - tab.origin) / tab.step;
  const long c0 = static_cast<long>(std::floor(u));
  const long r0 = static_cast<long>(std::floor(v));
  Complex acc = 0.0;
  for (long r = r0 - 1; r <= r0 + 2; ++r) {
    if (r < 0 || r >= tab.values.rows()) continue;
    const double wr = keys_kernel(v - static_cast<double>(r));
    if (wr == 0.0) continue;
    for (long c = c0 - 1; c <= c0 + 2; ++c) {
      if (c < 0 || c >= tab.values.cols()) continue;
      acc += tab.values(r, c) * wr * keys_kernel(u - static_cast<double>(c));
    }
  }
  return acc;
}

// Finite-difference derivative of an interpolated profile at the table spacing.
template <class F>
Complex stencil_1d(const F& f, int k, double t, double s) {
  if (k == 0) return f(t);
  const double* w = central_stencil(k);
  Complex acc = 0.0;
  for (int i = 0; i < 5; ++i)
    if (w[i] != 0.0) acc += w[i] * f(t + (i - 2) * s);
  return acc / std::pow(s, k);
}

bool near_zero(double a, double scale) { return std::abs(a) <= 1e-12 * scale; }

}  // namespace

Complex TabulatedProfile::value(double t) const { return table_value(values, origin, step, t); }

bool profile_has_zeros(const Eigen::VectorXcd& samples) {
  const Eigen::Index n = samples.size();
  if (n == 0) return false;
  const double max2 = samples.cwiseAbs2().maxCoeff();
  const double amp = std::sqrt(max2);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const Complex a = samples[i], b = samples[i + 1];
    const bool re_cross = a.real() * b.real() < 0.0;
    const bool im_cross = a.imag() * b.imag() < 0.0;
    const bool re_flat = near_zero(a.real(), amp) && near_zero(b.real(), amp);
    const bool im_flat = near_zero(a.imag(), amp) && near_zero(b.imag(), amp);
    if ((re_cross && (im_cross || im_flat)) || (im_cross && re_flat)) return true;
  }
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double c = std::norm(samples[i]);
    if (c < 1e-12 * max2 && c <= std::norm(samples[i - 1]) && c <= std::norm(samples[i + 1]) &&
        (c < std::norm(samples[i - 1]) || c < std::norm(samples[i + 1])))
      return true;
  }
  return false;
}

PsfModel::PsfModel(PsfKind kind, Grid grid) : kind_(std::move(kind)), grid_(grid) {}

PsfModel PsfModel::gaussian(Grid grid) {
  PsfModel p(Gaussian2D{}, grid);
  p.validate();
  return p;
}

PsfModel PsfModel::separable(TabulatedProfile x, TabulatedProfile y, Grid grid) {
  for (auto* prof : {&x, &y}) {
    if (!(prof->step > 0.0) || prof->values.size() < 4 || !prof->values.allFinite())
      throw Error(ErrorCode::InvalidPsf, "tabulated profile needs >= 4 finite samples and a positive step");
    double norm = 0.0;
    for (int i = 0; i < grid.size(); ++i) norm += std::norm(prof->value(grid.coord(i)));
    norm *= grid.step;
    if (!(norm > 0.0)) throw Error(ErrorCode::InvalidPsf, "tabulated profile vanishes on the domain");
    prof->values /= std::sqrt(norm);
  }
  PsfModel p(SeparableTabulated{std::move(x), std::move(y)}, grid);
  p.validate();
  return p;
}

PsfModel PsfModel::tabulated(Tabulated2D table, Grid grid) {
  if (!(table.step > 0.0) || table.values.rows() < 4 || table.values.cols() < 4 || !table.values.allFinite())
    throw Error(ErrorCode::InvalidPsf, "tabulated PSF needs >= 4x4 finite samples and a positive step");
  double norm = 0.0;
  for (int r = 0; r < grid.size(); ++r)
    for (int c = 0; c < grid.size(); ++c) norm += std::norm(table_value_2d(table, grid.coord(c), grid.coord(r)));
  norm *= grid.cell_area();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidPsf, "tabulated PSF vanishes on the domain");
  table.values /= std::sqrt(norm);
  PsfModel p(std::move(table), grid);
  p.validate();
  return p;
}

PsfModel PsfModel::load_tabulated(const std::string& real_path, const std::string& imag_path, double origin,
                                  double step, Grid grid) {
  return tabulated(Tabulated2D{origin, step, read_complex_matrix(real_path, imag_path)}, grid);
}

void PsfModel::validate() const {
  if (!(grid_.half_width >= 6.0)) throw Error(ErrorCode::InvalidPsf, "domain half-width must be >= 6");
  if (!(grid_.step > 0.0 && grid_.step <= 0.1)) throw Error(ErrorCode::InvalidPsf, "grid step must be in (0, 0.1]");
  const int n = grid_.size();
  if (is_separable()) {
    for (int axis = 0; axis < 2; ++axis) {
      const Eigen::VectorXcd f = sampled_factor(axis, 0);
      const double scale = f.cwiseAbs().maxCoeff();
      for (int i = 0; i < n; ++i)
        if (std::abs(f[i] - f[n - 1 - i]) > 1e-6 * scale)
          throw Error(ErrorCode::InvalidPsf, "PSF must be even in x and y");
    }
    return;
  }
  const Eigen::MatrixXcd s = sampled(0, 0);
  const double scale = s.cwiseAbs().maxCoeff();
  if ((s - s.rowwise().reverse()).cwiseAbs().maxCoeff() > 1e-6 * scale ||
      (s - s.colwise().reverse()).cwiseAbs().maxCoeff() > 1e-6 * scale)
    throw Error(ErrorCode::InvalidPsf, "PSF must be even in x and y");
}

std::string PsfModel::kind_name() const {
  switch (kind_.index()) {
    case 0: return "gaussian";
    case 1: return "separable_tabulated";
    default: return "tabulated_2d";
  }
}

Complex PsfModel::factor(int axis, int k, double t) const {
  if (k < 0 || k > 4) throw Error(ErrorCode::InvalidArgument, "derivative order must be in [0, 4]");
  if (std::holds_alternative<Gaussian2D>(kind_)) return gaussian_factor(k, t);
  if (const auto* s = std::get_if<SeparableTabulated>(&kind_)) {
    const TabulatedProfile& p = axis == 0 ? s->x : s->y;
    return stencil_1d([&](double u) { return p.value(u); }, k, t, p.step);
  }
  throw Error(ErrorCode::InvalidPsf, "factor() requires a separable PSF");
}

Complex PsfModel::amplitude(double x, double y) const {
  if (const auto* t = std::get_if<Tabulated2D>(&kind_)) return table_value_2d(*t, x, y);
  return factor(0, 0, x) * factor(1, 0, y);
}

Complex PsfModel::derivative(int k, int l, double x, double y) const {
  if (is_separable()) return factor(0, k, x) * factor(1, l, y);
  if (k < 0 || l < 0 || k > 4 || l > 4) throw Error(ErrorCode::InvalidArgument, "derivative order must be in [0, 4]");
  const auto& tab = std::get<Tabulated2D>(kind_);
  const double s = tab.step;
  const double* wx = central_stencil(k);
  const double* wy = central_stencil(l);
  Complex acc = 0.0;
  for (int j = 0; j < 5; ++j) {
    if (wy[j] == 0.0) continue;
    for (int i = 0; i < 5; ++i)
      if (wx[i] != 0.0) acc += wx[i] * wy[j] * table_value_2d(tab, x + (i - 2) * s, y + (j - 2) * s);
  }
  return acc / std::pow(s, k + l);
}

Eigen::VectorXcd PsfModel::sampled_factor(int axis, int k) const {
  const int n = grid_.size();
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = factor(axis, k, grid_.coord(i));
  return v;
}

Eigen::MatrixXcd PsfModel::sampled(int k, int l) const {
  if (is_separable()) {
    const Eigen::VectorXcd fx = sampled_factor(0, k);
    const Eigen::VectorXcd fy = sampled_factor(1, l);
    return fy * fx.transpose();
  }
  const int n = grid_.size();
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = derivative(k, l, grid_.coord(c), grid_.coord(r));
  return m;
}

double PsfScalars::psi(int axis) const {
  if (has_zeros) throw Error(ErrorCode::DivergentIntegral, "PSF has zeros; the incoherent-PSF integral diverges");
  return axis == 0 ? psi_x2 : psi_y2;
}

Complex autocorrelation(const PsfModel& psf, const Eigen::Vector2d& x) {
  const Grid& g = psf.grid();
  if (x.norm() > 2.0 * g.half_width) throw Error(ErrorCode::OutOfDomain, "autocorrelation shift outside 2R");
  const int n = g.size();
  if (psf.is_separable()) {
    Complex ax = 0.0, ay = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = g.coord(i);
      ax += std::conj(psf.factor(0, 0, a)) * psf.factor(0, 0, a - x.x());
      ay += std::conj(psf.factor(1, 0, a)) * psf.factor(1, 0, a - x.y());
    }
    return ax * ay * g.cell_area();
  }
  Complex acc = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double a = g.coord(c), b = g.coord(r);
      acc += std::conj(psf.amplitude(a, b)) * psf.amplitude(a - x.x(), b - x.y());
    }
  return acc * g.cell_area();
}

namespace {

double curvature(const PsfModel& psf, int axis, double h) {
  Eigen::Vector2d e = Eigen::Vector2d::Zero();
  e[axis] = h;
  const Complex c0 = autocorrelation(psf, Eigen::Vector2d::Zero());
  const Complex d2 = autocorrelation(psf, e) - 2.0 * c0 + autocorrelation(psf, -e);
  return -d2.real() / (h * h);
}

// Integral of (d^2 |f|^2 / dt^2)^2 / |f|^2 over the grid line.
double psi_line(const Eigen::VectorXcd& f, const Eigen::VectorXcd& f1, const Eigen::VectorXcd& f2, double step) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double inten = std::norm(f[i]);
    if (inten < 1e-300) continue;
    const double d2 = 2.0 * (f2[i] * std::conj(f[i])).real() + 2.0 * std::norm(f1[i]);
    acc += d2 * d2 / inten;
  }
  return acc * step;
}

}  // namespace

PsfScalars psf_scalars(const PsfModel& psf) {
  PsfScalars s;
  s.separable = psf.is_separable();
  for (int axis = 0; axis < 2; ++axis) {
    const double h = 1e-3;
    const double coarse = curvature(psf, axis, h);
    const double fine = curvature(psf, axis, 0.5 * h);
    (axis == 0 ? s.gamma_x2 : s.gamma_y2) = (4.0 * fine - coarse) / 3.0;
  }
  if (!(s.gamma_x2 > 0.0) || !(s.gamma_y2 > 0.0))
    throw Error(ErrorCode::InvalidPsf, "autocorrelation curvature must be positive");

  const PsfKind& kind = psf.kind();
  if (const auto* sep = std::get_if<SeparableTabulated>(&kind)) {
    s.has_zeros = profile_has_zeros(sep->x.values) || profile_has_zeros(sep->y.values);
  } else if (const auto* tab = std::get_if<Tabulated2D>(&kind)) {
    for (Eigen::Index r = 0; r < tab->values.rows() && !s.has_zeros; ++r)
      s.has_zeros = profile_has_zeros(tab->values.row(r).transpose());
    for (Eigen::Index c = 0; c < tab->values.cols() && !s.has_zeros; ++c)
      s.has_zeros = profile_has_zeros(tab->values.col(c));
  }
  if (s.has_zeros) return s;

  const Grid& g = psf.grid();
  if (psf.is_separable()) {
    for (int axis = 0; axis < 2; ++axis) {
      const double v = psi_line(psf.sampled_factor(axis, 0), psf.sampled_factor(axis, 1),
                                psf.sampled_factor(axis, 2), g.step);
      const double other = psf.sampled_factor(1 - axis, 0).squaredNorm() * g.step;
      (axis == 0 ? s.psi_x2 : s.psi_y2) = v * other;
    }
    return s;
  }
  const Eigen::MatrixXcd f = psf.sampled(0, 0);
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::MatrixXcd f1 = axis == 0 ? psf.sampled(1, 0) : psf.sampled(0, 1);
    const Eigen::MatrixXcd f2 = axis == 0 ? psf.sampled(2, 0) : psf.sampled(0, 2);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double inten = std::norm(f(i));
      if (inten < 1e-300) continue;
      const double d2 = 2.0 * (f2(i) * std::conj(f(i))).real() + 2.0 * std::norm(f1(i));
      acc += d2 * d2 / inten;
    }
    (axis == 0 ? s.psi_x2 : s.psi_y2) = acc * g.cell_area();
  }
  return s;
}

double incoherent_psf_derivative(const PsfModel& psf, int k, int l, const Eigen::Vector2d& x) {
  if (k < 0 || l < 0 || k + l > 4) throw Error(ErrorCode::InvalidArgument, "k + l must be <= 4");
  const double R = psf.grid().half_width;
  if (std::abs(x.x()) > R || std::abs(x.y()) > R) throw Error(ErrorCode::OutOfDomain, "point outside PSF domain");
  auto inten = [&](double a, double b) { return std::norm(psf.amplitude(a, b)); };
  if (k + l == 0) return inten(x.x(), x.y());
  auto diff = [&](double h) {
    const double* wx = central_stencil(k);
    const double* wy = central_stencil(l);
    double acc = 0.0;
    for (int j = 0; j < 5; ++j) {
      if (wy[j] == 0.0) continue;
      for (int i = 0; i < 5; ++i)
        if (wx[i] != 0.0) acc += wx[i] * wy[j] * inten(x.x() + (i - 2) * h, x.y() + (j - 2) * h);
    }
    return acc / std::pow(h, k + l);
  };
  const double h = k + l <= 2 ? 1e-3 : 2e-2;
  return (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
}

}  // namespace chernoff
