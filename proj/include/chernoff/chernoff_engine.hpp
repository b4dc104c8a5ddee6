#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "chernoff/optics_psf.hpp"
#include "chernoff/quantum_state.hpp"
#include "chernoff/scene.hpp"

namespace chernoff {

enum class Method { ExactQuantum, ClosedFormQuantum, ExactMeasurement, ClosedFormDirect, Bhattacharyya };
const char* to_string(Method m);

// Which part of the s-range produced the minimum.
enum class SearchRegion { Interior, LowerEndpoint, UpperEndpoint, PureState, Fixed };
const char* to_string(SearchRegion r);

struct ExponentDiagnostics {
  double trace_deficit_1 = 0.0;
  double trace_deficit_2 = 0.0;
  double s_grid_residual = 0.0;  // min of Q on a 21-point s grid minus Q(s*); >= 0 when the search is sound
  SearchRegion region = SearchRegion::Interior;
  bool singular_support = false;  // some outcome or eigen-direction has zero weight under one hypothesis only
  int dropped_outcomes = 0;
};

struct ExponentResult {
  double xi = 0.0;
  double s_star = 0.5;
  Method method = Method::ExactQuantum;
  ExponentDiagnostics diagnostics;
};

// Q(s) - 1 with Q(s) = Tr(rho1^s rho2^(1-s)), both states repaired to unit trace. Written as
// (1-s)(Q(0)-1) + s(Q(1)-1) plus a non-positive convex remainder so small exponents keep
// their relative precision. A state whose second eigenvalue is below 1e-10 is treated as pure.
class ChernoffFunctional {
 public:
  ChernoffFunctional(const DensityMatrix& rho1, const DensityMatrix& rho2);
  double q_minus_one(double s) const;
  double lower_endpoint() const { return end0_; }  // support projector of rho1 against rho2
  double upper_endpoint() const { return end1_; }
  bool rho1_pure() const { return pure1_; }
  bool rho2_pure() const { return pure2_; }
  bool singular_support() const { return singular_; }

 private:
  Eigen::VectorXd weight_, log_ratio_;
  double end0_ = 0.0, end1_ = 0.0;
  bool pure1_ = false, pure2_ = false, singular_ = false;
};

ExponentResult qce_exact(const DensityMatrix& rho1, const DensityMatrix& rho2);
ExponentResult bhattacharyya(const DensityMatrix& rho1, const DensityMatrix& rho2);
ExponentResult qce_pure_vs_object(const Eigen::Vector2d& point, const ObjectModel& obj, const PsfModel& psf,
                                  double gamma);
ExponentResult qce_lowest_order(const MomentTable& t1, const MomentTable& t2, const PsfScalars& scalars,
                                double gamma);
ExponentResult ce_direct_lowest_order(const MomentTable& t1, const MomentTable& t2, const PsfScalars& scalars,
                                      double gamma);

// Classical Chernoff exponent of two discrete distributions over the same outcomes.
ExponentResult classical_chernoff(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log residuals
};
ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace chernoff
