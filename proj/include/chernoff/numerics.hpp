#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <utility>

namespace chernoff {

using Complex = std::complex<double>;

// Uniform midpoint grid on [-half_width, half_width]; nodes sit at cell centers
// so the grid is symmetric about zero and never samples the origin itself.
struct Grid {
  double half_width = 8.0;
  double step = 0.05;

  int size() const { return static_cast<int>(std::lround(2.0 * half_width / step)); }
  double coord(int i) const { return -half_width + (i + 0.5) * step; }
  double cell_area() const { return step * step; }

  Eigen::VectorXd coords() const {
    Eigen::VectorXd c(size());
    for (int i = 0; i < size(); ++i) c[i] = coord(i);
    return c;
  }
};

// Gauss-Legendre nodes and weights on [a, b].
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n, double a, double b);

// Probabilists' Hermite polynomial He_n(x).
double hermite_prob(int n, double x);

// Physicists' Hermite polynomial H_n(x).
double hermite_phys(int n, double x);

double binomial(int n, int k);

// Keys cubic convolution kernel (a = -1/2).
inline double keys_kernel(double t) {
  t = std::abs(t);
  if (t < 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
  if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
  return 0.0;
}

// Central finite-difference weights for the k-th derivative (k <= 4) on offsets -2..2.
inline const double* central_stencil(int k) {
  static const double w[5][5] = {
      {0, 0, 1, 0, 0},
      {0, -0.5, 0, 0.5, 0},
      {0, 1, -2, 1, 0},
      {-0.5, 1, 0, -1, 0.5},
      {1, -4, 6, -4, 1},
  };
  return w[k];
}

template <class Scalar>
struct MinimizeResult {
  Scalar x;
  Scalar value;
  int iterations;
};

// Golden-section search for a unimodal f on [a, b]. Only interior points are evaluated.
template <class Scalar, class F>
MinimizeResult<Scalar> golden_section_minimize(F&& f, Scalar a, Scalar b, Scalar tol = Scalar(1e-10),
                                               int max_iter = 200) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = f(c), fd = f(d);
  int it = 0;
  for (; it < max_iter && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? MinimizeResult<Scalar>{c, fc, it} : MinimizeResult<Scalar>{d, fd, it};
}

// rho^s for a Hermitian PSD matrix; eigenvalues at or below cutoff count as zero, with
// 0^s = 0 for s > 0 and rho^0 the support projector.
template <class Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> hermitian_power(
    const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>& rho, Scalar s,
    Scalar cutoff = Scalar(1e-12)) {
  using Mat = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> ev =
      es.eigenvalues()
          .unaryExpr([&](Scalar v) { return v > cutoff ? std::pow(v, s) : Scalar(0); })
          .template cast<std::complex<Scalar>>();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace chernoff
