#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "chernoff/measurement.hpp"

namespace chernoff {

// Inverse-CDF sampler over a finite outcome set.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const Eigen::VectorXd& probabilities);
  int operator()(std::mt19937_64& rng) const;
  int size() const { return static_cast<int>(cdf_.size()); }

 private:
  std::vector<double> cdf_;
};

// Outcome distributions under both hypotheses with per-outcome log-likelihood ratios.
struct OutcomeModel {
  Eigen::VectorXd p1;
  Eigen::VectorXd p2;
  Eigen::VectorXd llr;  // log(p1 / p2); +inf or -inf where one side is zero

  static OutcomeModel from_distributions(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2);
  // Merges outcomes into equal-width LLR bins spanning the central 1 - 2e-4 of the mixture mass;
  // outliers join the end bins and one-sided zeros keep their own bins.
  OutcomeModel binned(int bins) const;
  int size() const { return static_cast<int>(p1.size()); }
};

OutcomeModel outcome_model(const ObjectModel& o1, const ObjectModel& o2, const PsfModel& psf, const PadBasis& basis,
                           double gamma, const MeasurementSpec& spec, int llr_bins = 192);

struct TrialConfig {
  std::vector<long> photons;  // N values, positive and increasing (0 allowed as a sanity point)
  long trials = 100000;
  std::uint64_t seed = 1;
  double epsilon = 1e-3;  // photons per temporal mode; reported as M = N / epsilon
  int threads = 1;
};

struct RatePoint {
  long n = 0;
  double temporal_modes = 0.0;
  double errors = 0.0;  // ties count one half
  long trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool in_window = false;
};

struct ErrorEstimate {
  std::vector<RatePoint> points;
  double fitted_exponent = 0.0;  // slope of -log P - log(N)/2 against N
  double raw_slope = 0.0;        // slope of -log P against N
  double intercept = 0.0;
  double fit_residual = 0.0;
};

std::pair<double, double> wilson_interval(double errors, long trials, double z = 1.96);

// Error rates of the maximum-likelihood decision with a fair-coin prior. Throws
// DegenerateRates when fewer than two N values fall inside the fit window.
ErrorEstimate run_trials(const TrialConfig& cfg, const OutcomeModel& model);

// Seeded stream for (seed, N index, block); the same inputs always give the same draws.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t n_index, std::uint64_t block);

}  // namespace chernoff
