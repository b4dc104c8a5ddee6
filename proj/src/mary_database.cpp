#include "chernoff/mary_database.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "chernoff/errors.hpp"

namespace chernoff {
namespace {

std::vector<double> axis_values(Packing packing, int count, double lo, double hi) {
  std::vector<double> v(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    if (packing == Packing::Quadratic) {
      const double r = std::sqrt(lo) + t * (std::sqrt(hi) - std::sqrt(lo));
      v[static_cast<size_t>(i)] = r * r;
    } else {
      v[static_cast<size_t>(i)] = lo + t * (hi - lo);
    }
  }
  return v;
}

// Closed-form exponent along one axis with count grid values in [lo, hi].
double axis_form(Packing packing, Receiver which, int count, double lo, double hi, double gamma_a, double psi_a,
                 double gamma) {
  const double n = static_cast<double>(count - 1);
  const double g2 = gamma * gamma;
  if (packing == Packing::Quadratic) {
    const double ds = std::sqrt(hi) - std::sqrt(lo);
    if (which == Receiver::Quantum) return ds * ds * gamma_a / (2.0 * n * n) * g2;
    return ds * ds * psi_a * lo / (8.0 * n * n) * g2 * g2;
  }
  const double d = hi - lo;
  if (which == Receiver::Quantum) return d * d * gamma_a / (8.0 * n * n * hi) * g2;
  return d * d * psi_a / (32.0 * n * n) * g2 * g2;
}

}  // namespace

void validate_database(const DatabaseSpec& spec) {
  if (spec.packing == Packing::Explicit) {
    if (spec.tables.size() < 2) throw Error(ErrorCode::InvalidArgument, "explicit database needs >= 2 tables");
    return;
  }
  if (spec.mx < 2 || spec.my < 2) throw Error(ErrorCode::InvalidArgument, "grid counts must be >= 2");
  if (!(spec.mx2_min > 0.0 && spec.mx2_min < spec.mx2_max) || !(spec.my2_min > 0.0 && spec.my2_min < spec.my2_max))
    throw Error(ErrorCode::InvalidArgument, "moment bounds must satisfy 0 < min < max");
}

std::vector<MomentTable> generate_database(const DatabaseSpec& spec) {
  validate_database(spec);
  if (spec.packing == Packing::Explicit) return spec.tables;
  const auto xs = axis_values(spec.packing, spec.mx, spec.mx2_min, spec.mx2_max);
  const auto ys = axis_values(spec.packing, spec.my, spec.my2_min, spec.my2_max);
  std::vector<MomentTable> db;
  for (double y : ys)
    for (double x : xs) db.push_back(MomentTable::from_second_moments(x, y));
  return db;
}

MaryResult mary_exponent(int count, const PairEvaluator& evaluator, bool keep_pairwise, int threads) {
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "M-ary exponent needs at least two objects");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) pairs.emplace_back(i, j);
  std::vector<double> values(pairs.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(pairs.size())));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  auto work = [&](int w) {
    try {
      for (size_t k = static_cast<size_t>(w); k < pairs.size(); k += static_cast<size_t>(workers))
        values[k] = evaluator(pairs[k].first, pairs[k].second);
    } catch (...) {
      errors[static_cast<size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  MaryResult r;
  r.xi = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < pairs.size(); ++k)
    if (values[k] < r.xi) {
      r.xi = values[k];
      r.argmin = pairs[k];
    }
  if (keep_pairwise) {
    r.pairwise = Eigen::MatrixXd::Zero(count, count);
    for (size_t k = 0; k < pairs.size(); ++k)
      r.pairwise(pairs[k].first, pairs[k].second) = r.pairwise(pairs[k].second, pairs[k].first) = values[k];
  }
  return r;
}

MaryResult mary_exponent(const std::vector<MomentTable>& db,
                         const std::function<double(const MomentTable&, const MomentTable&)>& evaluator,
                         bool keep_pairwise, int threads) {
  return mary_exponent(
      static_cast<int>(db.size()),
      [&](int i, int j) { return evaluator(db[static_cast<size_t>(i)], db[static_cast<size_t>(j)]); }, keep_pairwise,
      threads);
}

double closed_form_mary(const DatabaseSpec& spec, const PsfScalars& scalars, double gamma, Receiver which) {
  validate_database(spec);
  if (spec.packing == Packing::Explicit)
    throw Error(ErrorCode::InvalidArgument, "closed forms apply to quadratic or linear packing only");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  const bool direct = which == Receiver::Direct;
  const double psi_x = direct ? scalars.psi(0) : 0.0;
  const double psi_y = direct ? scalars.psi(1) : 0.0;
  const double x = axis_form(spec.packing, which, spec.mx, spec.mx2_min, spec.mx2_max, scalars.gamma_x2, psi_x, gamma);
  const double y = axis_form(spec.packing, which, spec.my, spec.my2_min, spec.my2_max, scalars.gamma_y2, psi_y, gamma);
  return std::min(x, y);
}

CapacityResult capacity(double gamma, double xi_threshold, const DatabaseSpec& bounds, Receiver which,
                        const PsfScalars& scalars) {
  if (!(xi_threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
  DatabaseSpec spec = bounds;
  spec.packing = which == Receiver::Quantum ? Packing::Quadratic : Packing::Linear;
  auto xi_at = [&](long mx) {
    spec.mx = spec.my = static_cast<int>(std::min<long>(mx, std::numeric_limits<int>::max()));
    return closed_form_mary(spec, scalars, gamma, which);
  };
  // Boundary ties count as reaching the threshold.
  const double floor_thr = xi_threshold * (1.0 - 1e-12);
  const double c = xi_at(2);
  if (c < floor_thr)
    throw Error(ErrorCode::ThresholdUnreachable, "threshold not reached even for a 2x2 database");
  // Exponent scales as c / (mx - 1)^2.
  const double est = 1.0 + std::sqrt(c / xi_threshold);
  if (est > static_cast<double>(std::numeric_limits<int>::max() - 2))
    throw Error(ErrorCode::InvalidArgument, "capacity exceeds the representable range");
  long mx = std::max(2L, static_cast<long>(std::floor(est)));
  while (xi_at(mx + 1) >= floor_thr) ++mx;
  while (mx > 2 && xi_at(mx) < floor_thr) --mx;
  CapacityResult r;
  r.mx = mx;
  r.m = mx * mx;
  r.xi = xi_at(mx);
  return r;
}

AdvantageMap advantage_regions(const std::vector<double>& gammas, const std::vector<int>& mx_values,
                               const DatabaseSpec& spec, const PsfScalars& scalars, double xi_threshold) {
  if (gammas.empty() || mx_values.empty()) throw Error(ErrorCode::InvalidArgument, "grids must be non-empty");
  AdvantageMap map;
  map.gammas = gammas;
  map.mx_values = mx_values;
  const auto ng = static_cast<Eigen::Index>(gammas.size());
  const auto nm = static_cast<Eigen::Index>(mx_values.size());
  map.advantage.resize(ng, nm);
  map.above_threshold.resize(ng, nm);
  const double g_lo = *std::min_element(gammas.begin(), gammas.end());
  const double g_hi = *std::max_element(gammas.begin(), gammas.end());
  for (Eigen::Index c = 0; c < nm; ++c) {
    DatabaseSpec s = spec;
    s.mx = s.my = mx_values[static_cast<size_t>(c)];
    auto gap = [&](double g) {
      return std::log(closed_form_mary(s, scalars, g, Receiver::Quantum)) -
             std::log(closed_form_mary(s, scalars, g, Receiver::Direct));
    };
    for (Eigen::Index r = 0; r < ng; ++r) {
      const double g = gammas[static_cast<size_t>(r)];
      const double xq = closed_form_mary(s, scalars, g, Receiver::Quantum);
      map.advantage(r, c) = xq > closed_form_mary(s, scalars, g, Receiver::Direct);
      map.above_threshold(r, c) = xq > xi_threshold;
    }
    double lo = g_lo, hi = g_hi;
    double flo = gap(lo), fhi = gap(hi);
    if ((flo > 0.0) == (fhi > 0.0)) {
      map.boundary.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = gap(mid);
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    map.boundary.push_back(0.5 * (lo + hi));
  }
  return map;
}

}  // namespace chernoff
