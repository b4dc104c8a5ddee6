#include "chernoff/photon_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <tuple>

#include "chernoff/errors.hpp"

namespace chernoff {
namespace {

constexpr long kBlock = 256;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_distribution(const Eigen::VectorXd& p) {
  if (p.size() == 0 || !p.allFinite() || p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-9)
    throw Error(ErrorCode::UnnormalizedDistribution, "outcome probabilities must be non-negative and sum to one");
}

// Draws multinomial counts for one hypothesis and accumulates the log-likelihood ratio.
class HypothesisDraw {
 public:
  HypothesisDraw(const Eigen::VectorXd& p, const Eigen::VectorXd& llr) : sampler_(p), llr_(llr) {
    const Eigen::Index k = p.size();
    cond_.resize(static_cast<size_t>(k));
    double tail = 0.0;
    for (Eigen::Index z = k - 1; z >= 0; --z) {
      tail += p[z];
      cond_[static_cast<size_t>(z)] = tail > 0.0 ? std::clamp(p[z] / tail, 0.0, 1.0) : 0.0;
    }
  }

  double operator()(long n, std::mt19937_64& rng) const {
    const long k = static_cast<long>(cond_.size());
    double total = 0.0;
    if (n < 4 * k) {
      for (long i = 0; i < n; ++i) total += llr_[sampler_(rng)];
      return total;
    }
    long left = n;
    for (long z = 0; z < k && left > 0; ++z) {
      const double c = cond_[static_cast<size_t>(z)];
      long count = 0;
      if (c >= 1.0) {
        count = left;
      } else if (c > 0.0) {
        std::binomial_distribution<long> bin(left, c);
        count = bin(rng);
      }
      if (count > 0) total += static_cast<double>(count) * llr_[z];
      left -= count;
    }
    return total;
  }

 private:
  CategoricalSampler sampler_;
  Eigen::VectorXd llr_;
  std::vector<double> cond_;
};

}  // namespace

CategoricalSampler::CategoricalSampler(const Eigen::VectorXd& probabilities) {
  check_distribution(probabilities);
  cdf_.resize(static_cast<size_t>(probabilities.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) cdf_[static_cast<size_t>(i)] = acc += probabilities[i];
  for (auto& c : cdf_) c /= acc;
}

int CategoricalSampler::operator()(std::mt19937_64& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  // upper_bound never lands on a zero-probability outcome.
  return static_cast<int>(it - cdf_.begin());
}

OutcomeModel OutcomeModel::from_distributions(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2) {
  if (p1.size() != p2.size()) throw Error(ErrorCode::DimensionMismatch, "distributions differ in length");
  check_distribution(p1);
  check_distribution(p2);
  OutcomeModel m;
  m.p1 = p1;
  m.p2 = p2;
  m.llr.resize(p1.size());
  for (Eigen::Index z = 0; z < p1.size(); ++z) {
    if (p1[z] > 0.0 && p2[z] > 0.0)
      m.llr[z] = std::log(p1[z]) - std::log(p2[z]);
    else if (p1[z] > 0.0)
      m.llr[z] = kInf;
    else if (p2[z] > 0.0)
      m.llr[z] = -kInf;
    else
      m.llr[z] = 0.0;
  }
  return m;
}

OutcomeModel OutcomeModel::binned(int bins) const {
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "need at least two LLR bins");
  std::vector<Eigen::Index> order;
  for (Eigen::Index z = 0; z < size(); ++z)
    if (std::isfinite(llr[z]) && (p1[z] > 0.0 || p2[z] > 0.0)) order.push_back(z);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return llr[a] < llr[b]; });

  double lo = 0.0, hi = 0.0;
  if (!order.empty()) {
    double total = 0.0;
    for (auto z : order) total += 0.5 * (p1[z] + p2[z]);
    double acc = 0.0;
    lo = llr[order.front()];
    hi = llr[order.back()];
    bool lo_set = false;
    for (auto z : order) {
      acc += 0.5 * (p1[z] + p2[z]);
      if (!lo_set && acc >= 1e-4 * total) {
        lo = llr[z];
        lo_set = true;
      }
      if (acc >= (1.0 - 1e-4) * total) {
        hi = llr[z];
        break;
      }
    }
  }
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(bins + 2), b2 = Eigen::VectorXd::Zero(bins + 2);
  for (Eigen::Index z = 0; z < size(); ++z) {
    int k;
    if (llr[z] == kInf)
      k = bins;
    else if (llr[z] == -kInf)
      k = bins + 1;
    else
      k = std::clamp(static_cast<int>(std::floor((llr[z] - lo) / width)), 0, bins - 1);
    b1[k] += p1[z];
    b2[k] += p2[z];
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < b1.size(); ++k)
    if (b1[k] > 0.0 || b2[k] > 0.0) keep.push_back(k);
  Eigen::VectorXd q1(static_cast<Eigen::Index>(keep.size())), q2(static_cast<Eigen::Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    q1[static_cast<Eigen::Index>(i)] = b1[keep[i]];
    q2[static_cast<Eigen::Index>(i)] = b2[keep[i]];
  }
  return from_distributions(q1 / q1.sum(), q2 / q2.sum());
}

OutcomeModel outcome_model(const ObjectModel& o1, const ObjectModel& o2, const PsfModel& psf, const PadBasis& basis,
                           double gamma, const MeasurementSpec& spec, int llr_bins) {
  OutcomeModel m = OutcomeModel::from_distributions(outcome_probabilities(o1, psf, basis, gamma, spec),
                                                    outcome_probabilities(o2, psf, basis, gamma, spec));
  if (llr_bins > 0 && m.size() > llr_bins) return m.binned(llr_bins);
  return m;
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t n_index, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n_index), static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

std::pair<double, double> wilson_interval(double errors, long trials, double z) {
  const double n = static_cast<double>(trials);
  const double p = errors / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(std::max(0.0, p * (1.0 - p) / n + z2 / (4.0 * n * n))) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ErrorEstimate run_trials(const TrialConfig& cfg, const OutcomeModel& model) {
  if (cfg.photons.empty()) throw Error(ErrorCode::InvalidArgument, "no photon numbers given");
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be positive");
  for (size_t i = 0; i < cfg.photons.size(); ++i)
    if (cfg.photons[i] < 0 || (i > 0 && cfg.photons[i] <= cfg.photons[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "photon numbers must be non-negative and increasing");
  const HypothesisDraw draw1(model.p1, model.llr), draw2(model.p2, model.llr);
  const long blocks = (cfg.trials + kBlock - 1) / kBlock;
  const int workers = static_cast<int>(std::max(1L, std::min<long>(cfg.threads, blocks)));

  ErrorEstimate est;
  for (size_t ni = 0; ni < cfg.photons.size(); ++ni) {
    const long n = cfg.photons[ni];
    std::vector<double> block_errors(static_cast<size_t>(blocks), 0.0);
    auto work = [&](int w) {
      for (long b = w; b < blocks; b += workers) {
        std::mt19937_64 rng = trial_stream(cfg.seed, ni, static_cast<std::uint64_t>(b));
        std::bernoulli_distribution coin(0.5);
        const long end = std::min(cfg.trials, (b + 1) * kBlock);
        double errors = 0.0;
        for (long t = b * kBlock; t < end; ++t) {
          const bool truth_first = coin(rng);
          const double l = truth_first ? draw1(n, rng) : draw2(n, rng);
          if (l == 0.0 || std::isnan(l))
            errors += 0.5;
          else if ((l > 0.0) != truth_first)
            errors += 1.0;
        }
        block_errors[static_cast<size_t>(b)] = errors;
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
    RatePoint pt;
    pt.n = n;
    pt.temporal_modes = static_cast<double>(n) / cfg.epsilon;
    pt.errors = std::accumulate(block_errors.begin(), block_errors.end(), 0.0);
    pt.trials = cfg.trials;
    pt.rate = pt.errors / static_cast<double>(cfg.trials);
    std::tie(pt.ci_low, pt.ci_high) = wilson_interval(pt.errors, cfg.trials);
    pt.in_window = n > 0 && pt.errors >= 10.0 && pt.rate > 10.0 / static_cast<double>(cfg.trials) && pt.rate < 0.4;
    est.points.push_back(pt);
  }

  std::vector<const RatePoint*> fit;
  for (const auto& p : est.points)
    if (p.in_window) fit.push_back(&p);
  if (fit.size() < 2) throw Error(ErrorCode::DegenerateRates, "fewer than two error rates inside the fit window");
  auto weighted_fit = [&](bool corrected) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto* p : fit) {
      const double w = p->rate * static_cast<double>(p->trials) / (1.0 - p->rate);
      const double x = static_cast<double>(p->n);
      const double y = -std::log(p->rate) - (corrected ? 0.5 * std::log(x) : 0.0);
      sw += w;
      sx += w * x;
      sy += w * y;
      sxx += w * x * x;
      sxy += w * x * y;
    }
    const double slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / sw;
    double res = 0.0;
    for (const auto* p : fit) {
      const double w = p->rate * static_cast<double>(p->trials) / (1.0 - p->rate);
      const double x = static_cast<double>(p->n);
      const double y = -std::log(p->rate) - (corrected ? 0.5 * std::log(x) : 0.0);
      res += w * std::pow(y - intercept - slope * x, 2);
    }
    return std::array<double, 3>{slope, intercept, std::sqrt(res / sw)};
  };
  const auto c = weighted_fit(true);
  est.fitted_exponent = c[0];
  est.intercept = c[1];
  est.fit_residual = c[2];
  est.raw_slope = weighted_fit(false)[0];
  return est;
}

}  // namespace chernoff
