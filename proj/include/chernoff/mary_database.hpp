#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "chernoff/optics_psf.hpp"
#include "chernoff/scene.hpp"

namespace chernoff {

enum class Packing { Quadratic, Linear, Explicit };

struct DatabaseSpec {
  Packing packing = Packing::Quadratic;
  int mx = 2;
  int my = 2;
  double mx2_min = 0.05;
  double mx2_max = 0.1;
  double my2_min = 0.05;
  double my2_max = 0.1;
  std::vector<MomentTable> tables;  // Explicit packing only

  int size() const { return packing == Packing::Explicit ? static_cast<int>(tables.size()) : mx * my; }
};

void validate_database(const DatabaseSpec& spec);

// Quadratic packing spaces square-root moments uniformly; linear packing spaces the moments.
// Index i = iy * mx + ix.
std::vector<MomentTable> generate_database(const DatabaseSpec& spec);

struct MaryResult {
  double xi = 0.0;
  std::pair<int, int> argmin{0, 1};
  Eigen::MatrixXd pairwise;  // filled only when requested; symmetric, zero diagonal
};

using PairEvaluator = std::function<double(int i, int j)>;

// Minimum over all unordered pairs. The evaluator must be safe to call concurrently.
MaryResult mary_exponent(int count, const PairEvaluator& evaluator, bool keep_pairwise = false, int threads = 1);

MaryResult mary_exponent(const std::vector<MomentTable>& db,
                         const std::function<double(const MomentTable&, const MomentTable&)>& evaluator,
                         bool keep_pairwise = false, int threads = 1);

enum class Receiver { Quantum, Direct };

// Lowest-order M-ary exponent for a quadratic or linear database, taking the smaller axis.
double closed_form_mary(const DatabaseSpec& spec, const PsfScalars& scalars, double gamma, Receiver which);

struct CapacityResult {
  long mx = 0;
  long m = 0;      // mx^2
  double xi = 0.0;  // closed-form exponent at mx
};

// Largest square database whose closed-form exponent stays at or above the threshold. The
// sorter uses quadratic packing, direct imaging linear packing.
CapacityResult capacity(double gamma, double xi_threshold, const DatabaseSpec& bounds, Receiver which,
                        const PsfScalars& scalars);

struct AdvantageMap {
  std::vector<double> gammas;
  std::vector<int> mx_values;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> advantage;        // rows: gamma, cols: mx
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> above_threshold;  // sorter exponent above threshold
  std::vector<double> boundary;  // per mx: gamma where sorter and direct exponents meet, NaN if none in range
};

AdvantageMap advantage_regions(const std::vector<double>& gammas, const std::vector<int>& mx_values,
                               const DatabaseSpec& spec, const PsfScalars& scalars, double xi_threshold);

}  // namespace chernoff
