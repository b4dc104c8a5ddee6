#include <doctest.h>

#include <cmath>

#include "chernoff/errors.hpp"
#include "chernoff/mary_database.hpp"

using namespace chernoff;

namespace {

const PsfScalars& gauss() {
  static const PsfScalars s = psf_scalars(PsfModel::gaussian());
  return s;
}

}  // namespace

TEST_CASE("quadratic packing spaces square roots evenly") {
  DatabaseSpec spec;
  const auto db = generate_database(spec);
  REQUIRE(db.size() == 4);
  CHECK(std::sqrt(db[0].x2()) == doctest::Approx(0.22361).epsilon(1e-4));
  CHECK(std::sqrt(db[1].x2()) == doctest::Approx(0.31623).epsilon(1e-4));
  CHECK(db[1].y2() == doctest::Approx(db[0].y2()));
  CHECK(db[2].y2() == doctest::Approx(0.1));

  spec.mx = spec.my = 5;
  const auto big = generate_database(spec);
  const double step = std::sqrt(big[1].x2()) - std::sqrt(big[0].x2());
  for (int i = 1; i < 4; ++i)
    CHECK(std::abs(std::sqrt(big[i + 1].x2()) - std::sqrt(big[i].x2()) - step) < 1e-12);
}

TEST_CASE("linear packing spaces moments evenly") {
  DatabaseSpec spec;
  spec.packing = Packing::Linear;
  spec.mx = 3;
  spec.my = 2;
  const auto db = generate_database(spec);
  REQUIRE(db.size() == 6);
  CHECK(db[1].x2() - db[0].x2() == doctest::Approx(0.025));
  CHECK(db[2].x2() == doctest::Approx(0.1));
  CHECK(db[3].y2() == doctest::Approx(0.1));
}

TEST_CASE("database validation") {
  DatabaseSpec bad;
  bad.mx = 1;
  CHECK_THROWS_AS(validate_database(bad), Error);
  DatabaseSpec inverted;
  inverted.mx2_min = 0.2;
  CHECK_THROWS_AS(validate_database(inverted), Error);
  DatabaseSpec empty;
  empty.packing = Packing::Explicit;
  CHECK_THROWS_AS(validate_database(empty), Error);
}

TEST_CASE("pairwise minimum") {
  const std::vector<double> pos = {0.0, 1.0, 1.5, 4.0};
  const MaryResult r = mary_exponent(
      4, [&](int i, int j) { return std::abs(pos[i] - pos[j]); }, true);
  CHECK(r.xi == doctest::Approx(0.5));
  CHECK(r.argmin == std::make_pair(1, 2));
  CHECK(r.pairwise(3, 0) == doctest::Approx(4.0));
  CHECK(r.pairwise(2, 2) == 0.0);
  const MaryResult threaded = mary_exponent(
      4, [&](int i, int j) { return std::abs(pos[i] - pos[j]); }, false, 3);
  CHECK(threaded.xi == r.xi);
}

TEST_CASE("closed forms at the tightest packing") {
  DatabaseSpec spec;
  const double ds = std::sqrt(0.1) - std::sqrt(0.05);
  const double g = 0.1;
  CHECK(closed_form_mary(spec, gauss(), g, Receiver::Quantum) == doctest::Approx(1.0723304703e-5).epsilon(1e-8));
  CHECK(closed_form_mary(spec, gauss(), g, Receiver::Quantum) ==
        doctest::Approx(ds * ds * 0.25 / 2 * g * g).epsilon(1e-8));
  spec.packing = Packing::Linear;
  // d^2 Psi / 32 gamma^4 with d = 0.05
  CHECK(closed_form_mary(spec, gauss(), g, Receiver::Direct) ==
        doctest::Approx(0.05 * 0.05 * 2 / 32 * std::pow(g, 4)).epsilon(1e-7));
}

TEST_CASE("capacity under a relative threshold") {
  DatabaseSpec tight;
  const double g = 0.1;
  const double thr = 1e-4 * closed_form_mary(tight, gauss(), g, Receiver::Quantum);
  const CapacityResult tri = capacity(g, thr, tight, Receiver::Quantum, gauss());
  const CapacityResult dir = capacity(g, thr, tight, Receiver::Direct, gauss());
  CHECK(tri.mx == 101);
  CHECK(dir.mx == 4);
  CHECK(tri.m == tri.mx * tri.mx);
  CHECK(static_cast<double>(tri.m) / static_cast<double>(dir.m) > 100.0);
  // mx = 101 sits exactly on the threshold; ties count as reached
  CHECK(tri.xi == doctest::Approx(thr).epsilon(1e-12));
  try {
    capacity(g, 1.0, tight, Receiver::Direct, gauss());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ThresholdUnreachable);
  }
}

TEST_CASE("advantage regions") {
  DatabaseSpec spec;
  std::vector<double> gammas;
  for (int i = 0; i < 41; ++i) gammas.push_back(0.5 * std::pow(20.0, i / 40.0));
  const AdvantageMap map = advantage_regions(gammas, {2, 4}, spec, gauss(), 0.0);
  REQUIRE(map.boundary.size() == 2);
  CHECK(map.advantage(0, 0));
  CHECK_FALSE(map.advantage(40, 0));
  CHECK(std::isfinite(map.boundary[0]));
  CHECK(map.above_threshold.all());
}
