#include <doctest.h>

#include <cmath>

#include "chernoff/errors.hpp"
#include "chernoff/measurement.hpp"

using namespace chernoff;

namespace {

struct Fixture {
  PsfModel psf = PsfModel::gaussian();
  PadBasis basis = build_pad_basis(psf, 4);
  ObjectModel e1 = ObjectModel::build(FilledEllipse{1.0, 0.5});
  ObjectModel e2 = ObjectModel::build(FilledEllipse{0.5, 1.0});
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

Eigen::MatrixXcd unit_projector(int dim, int m) {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  p(m, m) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("sorter outcomes read the diagonal") {
  const DensityMatrix r = assemble_exact(fx().e1, fx().psf, fx().basis, 0.2);
  const Eigen::VectorXd b = outcome_probabilities(r, Bspade{});
  REQUIRE(b.size() == 2);
  CHECK(b[0] == doctest::Approx(r.entries(0, 0).real() / r.entries.trace().real()).epsilon(1e-12));
  const Eigen::VectorXd t = outcome_probabilities(r, Trispade{});
  REQUIRE(t.size() == 4);
  CHECK(t.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t[1] > t[2]);
  CHECK_THROWS_AS(outcome_probabilities(r, DirectImaging{}), Error);
}

TEST_CASE("custom projectors reproduce TriSPADE") {
  const int d = fx().basis.dim();
  CustomProjective c;
  for (int m = 0; m < 3; ++m) c.projectors.push_back(unit_projector(d, m));
  const double g = 0.1;
  const ExponentResult a = ce_measurement_exact(fx().e1, fx().e2, fx().psf, fx().basis, g, Trispade{});
  const ExponentResult b = ce_measurement_exact(fx().e1, fx().e2, fx().psf, fx().basis, g, c);
  CHECK(a.xi == doctest::Approx(b.xi).epsilon(1e-10));
}

TEST_CASE("invalid custom projectors") {
  const int d = fx().basis.dim();
  CustomProjective twice;
  twice.projectors = {unit_projector(d, 0), unit_projector(d, 0)};
  CHECK_THROWS_AS(validate_measurement(twice, d), Error);
  CustomProjective scaled;
  scaled.projectors = {unit_projector(d, 1) * 0.5};
  CHECK_THROWS_AS(validate_measurement(scaled, d), Error);
  CustomProjective wrong;
  wrong.projectors = {unit_projector(3, 0)};
  CHECK_THROWS_AS(validate_measurement(wrong, d), Error);
  CHECK_THROWS_AS(validate_measurement(CustomProjective{}, d), Error);
  try {
    validate_measurement(Trispade{}, 2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("direct image of a point source") {
  const auto pt = ObjectModel::build(PointSet{{{{0, 0}, 1.0}}});
  const DirectImage img = direct_image(pt, fx().psf, 0.1);
  CHECK(img.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(img.mass == doctest::Approx(1.0).epsilon(1e-9));
  const int c = img.grid.size() / 2;
  const double x = img.grid.coord(c);
  const double expect = std::exp(-x * x) / (2 * 3.14159265358979323846) * img.grid.cell_area();
  CHECK(img.probabilities(c, c) == doctest::Approx(expect).epsilon(1e-6));
  DirectImaging small;
  small.domain_halfwidth = 1.0;
  try {
    direct_image(pt, fx().psf, 0.1, small);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationTooLossy);
  }
}

TEST_CASE("direct imaging tracks its lowest-order form") {
  const double g = 0.05;
  const PsfScalars sc = psf_scalars(fx().psf);
  const double exact = ce_measurement_exact(fx().e1, fx().e2, fx().psf, fx().basis, g, DirectImaging{}).xi;
  const double lo = ce_direct_lowest_order(moments(fx().e1, 2), moments(fx().e2, 2), sc, g).xi;
  CHECK(exact == doctest::Approx(lo).epsilon(0.02));
}

TEST_CASE("misaligned sorter") {
  const double g = 0.05;
  const auto star = ObjectModel::build(PointSet{{{{0, 0}, 1.0}}});
  const auto planet = recenter(ObjectModel::build(PointSet{{{{0, 0}, 0.9}, {{1, 0}, 0.1}}}));
  const double aligned = ce_measurement_exact(star, planet, fx().psf, fx().basis, g, Trispade{}).xi;
  Trispade tiny;
  tiny.misalignment = {1e-9, 0.0};
  CHECK(measurement_name(tiny) == "trispade_misaligned");
  const double near = ce_measurement_exact(star, planet, fx().psf, fx().basis, g, tiny).xi;
  CHECK(near == doctest::Approx(aligned).epsilon(1e-5));
  Trispade off;
  off.misalignment = {0.1, 0.0};
  const double shifted = ce_measurement_exact(star, planet, fx().psf, fx().basis, g, off).xi;
  CHECK(shifted < aligned);
}
