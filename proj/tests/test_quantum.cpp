#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "chernoff/errors.hpp"
#include "chernoff/quantum_state.hpp"

using namespace chernoff;

namespace {

struct Fixture {
  PsfModel psf = PsfModel::gaussian();
  PadBasis basis = build_pad_basis(psf, 4);
  PsfScalars scalars = psf_scalars(psf);
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
}

// Exact state restricted to the six lowest modes.
Eigen::MatrixXcd top6(const DensityMatrix& r) { return r.entries.topLeftCorner(6, 6); }

}  // namespace

TEST_CASE("point source on axis is the fundamental mode") {
  const auto pt = ObjectModel::build(PointSet{{{{0, 0}, 1.0}}});
  const DensityMatrix r = assemble_exact(pt, fx().psf, fx().basis, 0.1);
  CHECK(std::abs(r.entries(0, 0) - Complex(1.0)) < 1e-10);
  CHECK(r.entries.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("exact states are hermitian with small deficit") {
  const auto e = ObjectModel::build(FilledEllipse{1.0, 0.5});
  const DensityMatrix r = assemble_exact(e, fx().psf, fx().basis, 0.2);
  CHECK((r.entries - r.entries.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(r.trace_deficit >= -1e-12);
  CHECK(r.trace_deficit < 1e-6);
  CHECK(r.entries.trace().real() == doctest::Approx(1.0 - r.trace_deficit).epsilon(1e-12));
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(r.entries).eigenvalues();
  CHECK(ev.minCoeff() > -1e-12);
}

TEST_CASE("perturbative elements") {
  const auto t = moments(ObjectModel::build(FilledEllipse{1.0, 0.5}), 2);
  const double g = 0.1;
  const DensityMatrix p = assemble_perturbative(t, fx().scalars, fx().basis.w, g);
  REQUIRE(p.dim() == 6);
  CHECK(p.entries(1, 1).real() == doctest::Approx(t.x2() * 0.25 * g * g).epsilon(1e-6));
  CHECK(p.entries(2, 2).real() == doctest::Approx(t.y2() * 0.25 * g * g).epsilon(1e-6));
  CHECK(p.entries.trace().real() == doctest::Approx(1.0).epsilon(1e-14));
  const PerturbativeBlocks b = perturbative_blocks(p);
  CHECK(b.nu_b == doctest::Approx(-(t.x2() + t.y2()) * 0.25 * g * g).epsilon(1e-6));
  CHECK(b.nu_d.size() == 5);
}

TEST_CASE("exact and perturbative states agree to third order") {
  const ObjectModel scenes[] = {ObjectModel::build(FilledEllipse{1.0, 0.5}), ObjectModel::build(Annulus{0.6, 1.0}),
                                recenter(ObjectModel::build(PointSet{{{{0, 0}, 0.9}, {{1, 0}, 0.1}}}))};
  for (const auto& obj : scenes) {
    const MomentTable t = moments(obj, 2);
    double worst = 0.0;
    for (double g : {0.02, 0.05, 0.1}) {
      const DensityMatrix ex = assemble_exact(obj, fx().psf, fx().basis, g);
      const DensityMatrix pe = assemble_perturbative(t, fx().scalars, fx().basis.w, g);
      worst = std::max(worst, spectral_norm(top6(ex) - pe.entries) / (g * g * g));
    }
    CHECK(worst < 1.0);
  }
}

TEST_CASE("PSD repair") {
  DensityMatrix r;
  r.entries = Eigen::MatrixXcd::Zero(2, 2);
  r.entries(0, 0) = 1.0 + 1e-11;
  r.entries(1, 1) = -1e-11;
  const DensityMatrix fixed = repair_psd(r);
  CHECK(fixed.entries(1, 1).real() == doctest::Approx(0.0));
  CHECK(fixed.entries.trace().real() == doctest::Approx(1.0).epsilon(1e-15));

  r.entries(1, 1) = -1e-4;
  try {
    repair_psd(r);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPSD);
  }
  DensityMatrix lossy;
  lossy.entries = Eigen::MatrixXcd::Identity(1, 1) * 0.9;
  lossy.trace_deficit = 0.1;
  CHECK_THROWS_AS(repair_psd(lossy), Error);
}

TEST_CASE("wide objects lose too much light") {
  const auto disc = ObjectModel::build(UniformDisc{1.0});
  try {
    assemble_exact(disc, fx().psf, fx().basis, 6.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationTooLossy);
  }
}

TEST_CASE("reflections commute with state assembly") {
  const auto obj = ObjectModel::build(PointSet{{{{0.4, 0.1}, 0.3}, {{-0.2, 0.5}, 0.7}}});
  const double g = 0.3;
  const DensityMatrix r = assemble_exact(obj, fx().psf, fx().basis, g);
  const DensityMatrix inv = assemble_exact(obj.inverted(), fx().psf, fx().basis, g);
  const DensityMatrix mir = assemble_exact(obj.mirrored_x(), fx().psf, fx().basis, g);
  CHECK((reflect_state(r, fx().basis, Reflection::Inversion).entries - inv.entries).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((reflect_state(r, fx().basis, Reflection::MirrorX).entries - mir.entries).cwiseAbs().maxCoeff() < 1e-10);
}
