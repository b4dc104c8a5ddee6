#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "chernoff/chernoff_engine.hpp"
#include "chernoff/pad_basis.hpp"
#include "chernoff/quantum_state.hpp"
#include "chernoff/scene.hpp"

namespace chernoff {

struct DirectImaging {
  double grid_step = 0.05;
  double domain_halfwidth = 8.0;
};
// Mode 0 against everything else.
struct Bspade {};
// Modes 0, 1, 2 and a completion bucket. The misalignment is in object units.
struct Trispade {
  Eigen::Vector2d misalignment = Eigen::Vector2d::Zero();
};
// Projectors in the PAD basis; the completion I - sum(P) is appended as a final outcome.
struct CustomProjective {
  std::vector<Eigen::MatrixXcd> projectors;
};

using MeasurementSpec = std::variant<DirectImaging, Bspade, Trispade, CustomProjective>;

std::string measurement_name(const MeasurementSpec& spec);
bool is_modal(const MeasurementSpec& spec);
// False only for a sorter with a non-zero misalignment.
bool is_aligned(const MeasurementSpec& spec);
void validate_measurement(const MeasurementSpec& spec, int dim);

// Tr(Pi_z rho) for aligned modal measurements, completion bucket last.
Eigen::VectorXd outcome_probabilities(const DensityMatrix& rho, const MeasurementSpec& spec);

// Outcome probabilities from the object directly. Handles misaligned sorters and direct imaging.
Eigen::VectorXd outcome_probabilities(const ObjectModel& obj, const PsfModel& psf, const PadBasis& basis, double gamma,
                                      const MeasurementSpec& spec);

struct DirectImage {
  Eigen::MatrixXd probabilities;  // rows along y, columns along x; unit sum
  double mass = 1.0;              // captured fraction before renormalization
  Grid grid;
};

DirectImage direct_image(const ObjectModel& obj, const PsfModel& psf, double gamma, const DirectImaging& pixels = {});

// Classical Chernoff exponent of a measurement applied to the two states (aligned modal specs).
ExponentResult ce_measurement_exact(const DensityMatrix& rho1, const DensityMatrix& rho2, const MeasurementSpec& spec,
                                    const PadBasis& basis);

// Same, starting from objects; required for direct imaging and misaligned sorters.
ExponentResult ce_measurement_exact(const ObjectModel& o1, const ObjectModel& o2, const PsfModel& psf,
                                    const PadBasis& basis, double gamma, const MeasurementSpec& spec);

}  // namespace chernoff
