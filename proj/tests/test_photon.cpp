#include <doctest.h>

#include <cmath>

#include "chernoff/errors.hpp"
#include "chernoff/photon_sim.hpp"

using namespace chernoff;

namespace {

OutcomeModel coin_model() {
  Eigen::VectorXd p(2), q(2);
  p << 0.9, 0.1;
  q << 0.5, 0.5;
  return OutcomeModel::from_distributions(p, q);
}

}  // namespace

TEST_CASE("categorical sampler frequencies") {
  Eigen::VectorXd p(3);
  p << 0.2, 0.5, 0.3;
  CategoricalSampler s(p);
  auto rng = trial_stream(7, 0, 0);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(3);
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts[s(rng)] += 1.0;
  for (int k = 0; k < 3; ++k) CHECK(counts[k] / n == doctest::Approx(p[k]).epsilon(0.02));
}

TEST_CASE("seeded streams repeat") {
  auto a = trial_stream(5, 1, 2), b = trial_stream(5, 1, 2), c = trial_stream(5, 1, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
}

TEST_CASE("wilson interval") {
  const auto [lo, hi] = wilson_interval(10, 100);
  CHECK(lo == doctest::Approx(0.0552).epsilon(2e-3));
  CHECK(hi == doctest::Approx(0.1744).epsilon(2e-3));
}

TEST_CASE("outcome model log ratios") {
  const OutcomeModel m = coin_model();
  CHECK(m.llr[0] == doctest::Approx(std::log(1.8)));
  Eigen::VectorXd p(2), q(2);
  p << 1.0, 0.0;
  q << 0.5, 0.5;
  const OutcomeModel z = OutcomeModel::from_distributions(p, q);
  CHECK(std::isinf(z.llr[1]));
  CHECK(z.llr[1] < 0);
}

TEST_CASE("LLR binning keeps mass and nearly keeps the exponent") {
  const int n = 2000;
  Eigen::VectorXd p(n), q(n);
  for (int i = 0; i < n; ++i) {
    const double t = -4.0 + 8.0 * (i + 0.5) / n;
    p[i] = std::exp(-(t - 0.3) * (t - 0.3) / 2);
    q[i] = std::exp(-(t + 0.3) * (t + 0.3) / 2);
  }
  p /= p.sum();
  q /= q.sum();
  const OutcomeModel full = OutcomeModel::from_distributions(p, q);
  const OutcomeModel b = full.binned(64);
  CHECK(b.size() <= 66);
  CHECK(b.p1.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.p2.sum() == doctest::Approx(1.0).epsilon(1e-12));
  const double ce_full = classical_chernoff(p, q).xi;
  const double ce_bin = classical_chernoff(b.p1, b.p2).xi;
  CHECK(ce_bin <= ce_full + 1e-12);
  CHECK(ce_bin == doctest::Approx(ce_full).epsilon(1e-3));
}

TEST_CASE("error rates decay at the Chernoff rate") {
  TrialConfig cfg;
  cfg.trials = 40000;
  cfg.seed = 11;
  for (long n : {12, 20, 28, 36, 44, 52}) cfg.photons.push_back(n);
  const OutcomeModel m = coin_model();
  const ErrorEstimate est = run_trials(cfg, m);
  const double ce = classical_chernoff(m.p1, m.p2).xi;
  CHECK(est.fitted_exponent == doctest::Approx(ce).epsilon(0.15));
  for (size_t i = 1; i < est.points.size(); ++i) CHECK(est.points[i].rate <= est.points[i - 1].rate);
  for (const auto& p : est.points) {
    CHECK(p.ci_low <= p.rate);
    CHECK(p.rate <= p.ci_high);
    CHECK(p.temporal_modes == doctest::Approx(p.n / cfg.epsilon));
  }
}

TEST_CASE("trial runs are reproducible across thread counts") {
  TrialConfig cfg;
  cfg.trials = 3000;
  cfg.photons = {5, 10, 15, 20};
  const ErrorEstimate a = run_trials(cfg, coin_model());
  cfg.threads = 3;
  const ErrorEstimate b = run_trials(cfg, coin_model());
  for (size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].errors == b.points[i].errors);
}

TEST_CASE("too few usable points") {
  TrialConfig cfg;
  cfg.trials = 1000;
  cfg.photons = {2000, 3000, 4000, 5000};
  try {
    run_trials(cfg, coin_model());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateRates);
  }
}
