#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "chernoff/errors.hpp"
#include "chernoff/pad_basis.hpp"

using namespace chernoff;

namespace {

const PadBasis& gauss_basis() {
  static const PadBasis b = build_pad_basis(PsfModel::gaussian(), 4);
  return b;
}

}  // namespace

TEST_CASE("PAD indexing order") {
  const auto idx = pad_indexing(4);
  REQUIRE(idx.size() == 15);
  const int expect[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (int m = 0; m < 6; ++m) {
    CHECK(idx[m].m == m);
    CHECK(idx[m].k == expect[m][0]);
    CHECK(idx[m].l == expect[m][1]);
  }
  CHECK(idx[6].k == 3);
  CHECK(idx[9].l == 3);
  CHECK(idx[10].k == 4);
  CHECK(pad_indexing(2).size() == 6);
  CHECK_THROWS_AS(pad_indexing(5), Error);
  CHECK_THROWS_AS(pad_indexing(-1), Error);
}

TEST_CASE("basis is orthonormal and W is upper triangular") {
  const PadBasis& b = gauss_basis();
  REQUIRE(b.dim() == 15);
  CHECK(b.warnings.empty());
  for (int i = 0; i < b.dim(); ++i)
    for (int j = 0; j <= i; ++j) {
      const Complex g = (b.functions[i].array().conjugate() * b.functions[j].array()).sum() * b.cell_area;
      CHECK(std::abs(g - Complex(i == j ? 1.0 : 0.0)) < 1e-10);
    }
  for (int n = 0; n < b.dim(); ++n)
    for (int m = 0; m < n; ++m) CHECK(std::abs(b.w(n, m)) < 1e-14);
  CHECK((b.w * b.w_inverse - Eigen::MatrixXcd::Identity(15, 15)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gaussian W entries") {
  const PadBasis& b = gauss_basis();
  CHECK(std::norm(b.w(0, 0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::norm(b.w(1, 1)) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(std::norm(b.w(2, 2)) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(std::abs(b.w(3, 5)) < 1e-12);
  CHECK(std::abs(b.w(1, 2)) < 1e-12);
  // d^2/dx^2 psi = (x^2/4 - 1/2) psi: component on phi_0 is -1/4
  CHECK(b.w(0, 3).real() == doctest::Approx(-0.25).epsilon(1e-8));
}

TEST_CASE("shifted PSF overlaps match coherent-state amplitudes") {
  const PsfModel psf = PsfModel::gaussian();
  const PadBasis& b = gauss_basis();
  for (double x : {0.0, 0.3, 1.1}) {
    const Eigen::VectorXcd o = shifted_psf_overlaps(b, psf, {x, 0.0});
    const double env = std::exp(-x * x / 8);
    CHECK(std::abs(o[0]) == doctest::Approx(env).epsilon(1e-9));
    CHECK(std::abs(o[1]) == doctest::Approx(env * x / 2).epsilon(1e-8));
    CHECK(std::abs(o[3]) == doctest::Approx(env * x * x / 4 / std::sqrt(2.0)).epsilon(1e-7));
    CHECK(std::abs(o[2]) < 1e-12);
  }
}

TEST_CASE("separable fast path agrees with direct quadrature") {
  const PsfModel psf = PsfModel::gaussian();
  const PadBasis& b = gauss_basis();
  const Eigen::Vector2d x(0.21, -0.37);
  const Eigen::VectorXcd fast = shifted_psf_overlaps(b, psf, x);
  for (int m = 0; m < b.dim(); ++m) CHECK(std::abs(fast[m] - overlap_with_shifted_psf(b, psf, m, x)) < 1e-10);
}

TEST_CASE("dependent functions are dropped") {
  const PsfModel psf = PsfModel::gaussian();
  auto f = derivative_functions(psf, 1);
  auto idx = pad_indexing(1);
  f.push_back(f[1] * 2.0);
  idx.push_back({3, 1, 0});
  const PadBasis b = gram_schmidt(f, idx, psf.grid().cell_area());
  CHECK(b.dim() == 3);
  CHECK_FALSE(b.warnings.empty());
}

TEST_CASE("basis dump writes one pair of files per mode") {
  const std::string dir = "pad_dump_test";
  PadBasis b = build_pad_basis(PsfModel::gaussian(), 1);
  dump_basis(b, dir);
  CHECK(std::filesystem::exists(dir + "/mode_2_im.txt"));
  std::filesystem::remove_all(dir);
}
