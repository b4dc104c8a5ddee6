#include "chernoff/chernoff_engine.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "chernoff/errors.hpp"
#include "chernoff/numerics.hpp"

namespace chernoff {
namespace {

constexpr double kRankCut = 1e-12;
constexpr double kPureCut = 1e-10;

// sum_k w_k [expm1(s l_k) - s expm1(l_k)]; every term is <= 0 for s in [0, 1].
double remainder(const Eigen::VectorXd& w, const Eigen::VectorXd& l, double s) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) acc += w[k] * (std::expm1(s * l[k]) - s * std::expm1(l[k]));
  return acc;
}

double xi_from(double q_minus_one) {
  if (q_minus_one <= -1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(q_minus_one);
}

// Minimizes a convex Q(s) - 1 given on the open interval plus one-sided endpoint values.
template <class F>
ExponentResult minimize_convex(const F& f, double end0, double end1) {
  const double lo = 1e-3, hi = 1.0 - 1e-3;
  auto best = golden_section_minimize<double>(f, lo, hi);
  if (best.x < lo + 1e-6) {
    const auto edge = golden_section_minimize<double>(f, 0.0, lo);
    if (edge.value < best.value) best = edge;
  } else if (best.x > hi - 1e-6) {
    const auto edge = golden_section_minimize<double>(f, hi, 1.0);
    if (edge.value < best.value) best = edge;
  }
  ExponentResult r;
  double value = best.value;
  r.s_star = best.x;
  r.diagnostics.region = SearchRegion::Interior;
  if (end0 < value) {
    value = end0;
    r.s_star = 0.0;
    r.diagnostics.region = SearchRegion::LowerEndpoint;
  }
  if (end1 < value) {
    value = end1;
    r.s_star = 1.0;
    r.diagnostics.region = SearchRegion::UpperEndpoint;
  }
  double grid_min = std::min(end0, end1);
  for (int k = 1; k < 20; ++k) grid_min = std::min(grid_min, f(k / 20.0));
  r.diagnostics.s_grid_residual = grid_min - value;
  r.xi = xi_from(value);
  return r;
}

struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

Spectrum spectrum(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.entries);
  Spectrum s{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    if (s.values[i] <= kRankCut) s.values[i] = 0.0;
  return s;
}

bool make_pure_if_rank_one(Spectrum& s) {
  const Eigen::Index n = s.values.size();
  if (n > 1 && s.values[n - 2] >= kPureCut) return false;
  s.values.setZero();
  s.values[n - 1] = 1.0;
  return true;
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::ExactQuantum: return "exact-quantum";
    case Method::ClosedFormQuantum: return "closed-form-quantum";
    case Method::ExactMeasurement: return "exact-measurement";
    case Method::ClosedFormDirect: return "closed-form-direct";
    case Method::Bhattacharyya: return "bhattacharyya";
  }
  return "unknown";
}

const char* to_string(SearchRegion r) {
  switch (r) {
    case SearchRegion::Interior: return "interior";
    case SearchRegion::LowerEndpoint: return "lower-endpoint";
    case SearchRegion::UpperEndpoint: return "upper-endpoint";
    case SearchRegion::PureState: return "pure-state";
    case SearchRegion::Fixed: return "fixed";
  }
  return "unknown";
}

ChernoffFunctional::ChernoffFunctional(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) throw Error(ErrorCode::DimensionMismatch, "states have different dimensions");
  Spectrum s1 = spectrum(repair_psd(rho1));
  Spectrum s2 = spectrum(repair_psd(rho2));
  pure1_ = make_pure_if_rank_one(s1);
  pure2_ = make_pure_if_rank_one(s2);
  const Eigen::MatrixXd t = (s1.vectors.adjoint() * s2.vectors).cwiseAbs2();
  const Eigen::VectorXd& a = s1.values;
  const Eigen::VectorXd& b = s2.values;
  const Eigen::Index n = a.size();
  std::vector<double> w, l;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (a[i] > 0.0 && b[j] > 0.0) {
        w.push_back(t(i, j) * b[j]);
        l.push_back(std::log(a[i]) - std::log(b[j]));
      } else if (a[i] > 0.0) {
        end1_ -= t(i, j) * a[i];
      } else if (b[j] > 0.0) {
        end0_ -= t(i, j) * b[j];
      }
    }
  }
  weight_ = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  log_ratio_ = Eigen::Map<Eigen::VectorXd>(l.data(), static_cast<Eigen::Index>(l.size()));
  singular_ = end0_ < -1e-14 || end1_ < -1e-14;
}

double ChernoffFunctional::q_minus_one(double s) const {
  return (1.0 - s) * end0_ + s * end1_ + remainder(weight_, log_ratio_, s);
}

ExponentResult qce_exact(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  const ChernoffFunctional q(rho1, rho2);
  ExponentResult r;
  if (q.rho1_pure() || q.rho2_pure()) {
    r.s_star = q.rho1_pure() ? 0.0 : 1.0;
    r.xi = xi_from(q.rho1_pure() ? q.lower_endpoint() : q.upper_endpoint());
    r.diagnostics.region = SearchRegion::PureState;
  } else {
    r = minimize_convex([&](double s) { return q.q_minus_one(s); }, q.lower_endpoint(), q.upper_endpoint());
  }
  r.method = Method::ExactQuantum;
  r.diagnostics.trace_deficit_1 = rho1.trace_deficit;
  r.diagnostics.trace_deficit_2 = rho2.trace_deficit;
  r.diagnostics.singular_support = q.singular_support();
  return r;
}

ExponentResult bhattacharyya(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  const ChernoffFunctional q(rho1, rho2);
  ExponentResult r;
  r.s_star = 0.5;
  r.xi = xi_from(q.q_minus_one(0.5));
  r.method = Method::Bhattacharyya;
  r.diagnostics.region = SearchRegion::Fixed;
  r.diagnostics.trace_deficit_1 = rho1.trace_deficit;
  r.diagnostics.trace_deficit_2 = rho2.trace_deficit;
  r.diagnostics.singular_support = q.singular_support();
  return r;
}

ExponentResult qce_pure_vs_object(const Eigen::Vector2d& point, const ObjectModel& obj, const PsfModel& psf,
                                  double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  const double g0 = std::norm(autocorrelation(psf, Eigen::Vector2d::Zero()));
  auto integrate = [&](int refinement) {
    double acc = 0.0;
    for (const auto& node : obj.quadrature(refinement))
      acc += node.weight * (std::norm(autocorrelation(psf, gamma * (node.position - point))) / g0 - 1.0);
    return acc;
  };
  const double fine = integrate(1);
  if (!std::holds_alternative<PointSet>(obj.shape())) {
    const double coarse = integrate(0);
    if (std::abs(fine - coarse) > 1e-12 + 1e-6 * std::abs(fine))
      throw Error(ErrorCode::QuadratureNotConverged, "overlap integral changed under refinement");
  }
  ExponentResult r;
  r.xi = xi_from(fine);
  r.s_star = 0.0;
  r.method = Method::ExactQuantum;
  r.diagnostics.region = SearchRegion::PureState;
  return r;
}

ExponentResult qce_lowest_order(const MomentTable& t1, const MomentTable& t2, const PsfScalars& scalars,
                                double gamma) {
  if (t1.max_order() < 2 || t2.max_order() < 2)
    throw Error(ErrorCode::InvalidArgument, "moments through order 2 are required");
  const double m1[2] = {t1.x2(), t1.y2()};
  const double m2[2] = {t2.x2(), t2.y2()};
  const double g[2] = {scalars.gamma_x2, scalars.gamma_y2};
  auto pw = [](double m, double s) { return m > 0.0 ? std::pow(m, s) : 0.0; };
  auto bracket = [&](double s) {
    double acc = 0.0;
    for (int a = 0; a < 2; ++a) acc += g[a] * (s * m1[a] + (1.0 - s) * m2[a] - pw(m1[a], s) * pw(m2[a], 1.0 - s));
    return acc;
  };
  double lower = 0.0, upper = 0.0;
  for (int a = 0; a < 2; ++a) {
    lower += g[a] * (m2[a] - (m1[a] > 0.0 ? m2[a] : 0.0));
    upper += g[a] * (m1[a] - (m2[a] > 0.0 ? m1[a] : 0.0));
  }
  const auto inner = golden_section_minimize<double>([&](double s) { return -bracket(s); }, 0.0, 1.0);
  ExponentResult r;
  r.method = Method::ClosedFormQuantum;
  double best = -inner.value;
  r.s_star = inner.x;
  r.diagnostics.region = SearchRegion::Interior;
  if (lower > best) {
    best = lower;
    r.s_star = 0.0;
    r.diagnostics.region = SearchRegion::LowerEndpoint;
  }
  if (upper > best) {
    best = upper;
    r.s_star = 1.0;
    r.diagnostics.region = SearchRegion::UpperEndpoint;
  }
  r.xi = best * gamma * gamma;
  return r;
}

ExponentResult ce_direct_lowest_order(const MomentTable& t1, const MomentTable& t2, const PsfScalars& scalars,
                                      double gamma) {
  if (scalars.has_zeros || !scalars.separable)
    throw Error(ErrorCode::InapplicablePSF, "lowest-order direct-imaging form needs a separable PSF without zeros");
  if (t1.max_order() < 2 || t2.max_order() < 2)
    throw Error(ErrorCode::InvalidArgument, "moments through order 2 are required");
  const double kx = std::pow(t1.x2() - t2.x2(), 2) * scalars.psi_x2;
  const double ky = std::pow(t1.y2() - t2.y2(), 2) * scalars.psi_y2;
  ExponentResult r;
  r.method = Method::ClosedFormDirect;
  r.xi = (kx + ky) * std::pow(gamma, 4) / 32.0;
  r.s_star = 0.5;
  r.diagnostics.region = SearchRegion::Fixed;
  return r;
}

ExponentResult classical_chernoff(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "distributions differ in length");
  if (!p.allFinite() || !q.allFinite() || p.minCoeff() < 0.0 || q.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-9 ||
      std::abs(q.sum() - 1.0) > 1e-9)
    throw Error(ErrorCode::UnnormalizedDistribution, "distributions must be non-negative and sum to one");
  std::vector<double> w, l;
  double end0 = 0.0, end1 = 0.0;
  int dropped = 0;
  for (Eigen::Index z = 0; z < p.size(); ++z) {
    // Below the rounding floor of a unit-sum vector an outcome counts as impossible.
    const bool pz = p[z] >= 1e-15, qz = q[z] >= 1e-15;
    if (pz && qz) {
      w.push_back(q[z]);
      l.push_back(std::log(p[z]) - std::log(q[z]));
    } else if (pz) {
      end1 -= p[z];
    } else if (qz) {
      end0 -= q[z];
    } else {
      ++dropped;
    }
  }
  const Eigen::VectorXd wv = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  const Eigen::VectorXd lv = Eigen::Map<Eigen::VectorXd>(l.data(), static_cast<Eigen::Index>(l.size()));
  auto f = [&](double s) { return (1.0 - s) * end0 + s * end1 + remainder(wv, lv, s); };
  ExponentResult r = minimize_convex(f, end0, end1);
  r.method = Method::ExactMeasurement;
  r.diagnostics.singular_support = end0 < 0.0 || end1 < 0.0;
  r.diagnostics.dropped_outcomes = dropped;
  return r;
}

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw Error(ErrorCode::InvalidArgument, "scaling fit needs at least four points");
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [gamma, xi] = points[static_cast<size_t>(i)];
    if (!(xi > 0.0) || !(gamma > 0.0)) throw Error(ErrorCode::NonPositiveExponent, "exponents must be positive");
    a(i, 0) = std::log(gamma);
    a(i, 1) = 1.0;
    y[i] = std::log(xi);
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
  ScalingFit fit;
  fit.slope = c[0];
  fit.intercept = c[1];
  fit.residual = std::sqrt((a * c - y).squaredNorm() / static_cast<double>(n));
  return fit;
}

}  // namespace chernoff
