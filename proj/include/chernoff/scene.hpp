#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

namespace chernoff {

// Object shapes. Every length is in units of the object scale theta.
struct WeightedPoint {
  Eigen::Vector2d position;
  double weight;
};
struct PointSet {
  std::vector<WeightedPoint> points;
};
struct UniformDisc {
  double radius;
};
struct Annulus {
  double r_inner;
  double r_outer;
};
struct FilledEllipse {
  double semi_axis_x;
  double semi_axis_y;
};
// Lit cells are uniform-intensity squares. Column index runs along +x, row index along +y,
// and the grid is centered on the object's center.
struct BinaryGrid {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> cells;
  double cell_size;
};
// Non-negative uniform-intensity pixels, same orientation as BinaryGrid.
struct Raster {
  Eigen::MatrixXd values;
  double pixel_size;
};

using Shape = std::variant<PointSet, UniformDisc, Annulus, FilledEllipse, BinaryGrid, Raster>;

struct QuadratureNode {
  Eigen::Vector2d position;
  double weight;
};

// Normalized radiant-exitance profile with unit total flux.
class ObjectModel {
 public:
  // Validates the geometry and normalizes weights/values to unit flux.
  static ObjectModel build(Shape shape, const Eigen::Vector2d& center = Eigen::Vector2d::Zero());

  const Shape& shape() const { return shape_; }
  const Eigen::Vector2d& center() const { return center_; }
  std::string kind_name() const;

  ObjectModel translated(const Eigen::Vector2d& offset) const;
  // Dilation about the origin by factor a > 0.
  ObjectModel dilated(double a) const;
  // Point inversion u -> -u.
  ObjectModel inverted() const;
  // Mirror x -> -x.
  ObjectModel mirrored_x() const;

  // Integration nodes over the object support; weights sum to one. A refinement of 0 gives
  // a coarser rule used for convergence checks, 1 is the default.
  std::vector<QuadratureNode> quadrature(int refinement = 1) const;

 private:
  ObjectModel(Shape shape, const Eigen::Vector2d& center) : shape_(std::move(shape)), center_(center) {}

  Shape shape_;
  Eigen::Vector2d center_;
};

Eigen::Vector2d centroid(const ObjectModel& obj);

// Shifts the object so that its first moments vanish.
ObjectModel recenter(const ObjectModel& obj);

// Moments m_{x^k y^l} for all k + l <= max_order.
class MomentTable {
 public:
  MomentTable() = default;
  explicit MomentTable(int max_order)
      : max_order_(max_order), values_(Eigen::MatrixXd::Zero(max_order + 1, max_order + 1)) {}

  int max_order() const { return max_order_; }
  double operator()(int k, int l) const { return values_(k, l); }
  double& operator()(int k, int l) { return values_(k, l); }
  double x2() const { return values_(2, 0); }
  double y2() const { return values_(0, 2); }

  // Table holding only second moments (first moments zero), for database work.
  static MomentTable from_second_moments(double mx2, double my2);

 private:
  int max_order_ = 0;
  Eigen::MatrixXd values_;
};

MomentTable moments(const ObjectModel& obj, int max_order);

// Smallest total order at which the two tables differ (tolerance absolute);
// returns max_order + 1 when none differ.
int lowest_differing_order(const MomentTable& a, const MomentTable& b, double tol = 1e-9);

// Symmetric four-point object (+-sqrt(2 mx2), 0), (0, +-sqrt(2 my2)) with the given
// second moments and vanishing first and mixed moments.
ObjectModel object_with_second_moments(double mx2, double my2);

struct SceneSpec {
  std::vector<ObjectModel> objects;
  double gamma = 0.1;
  double magnification = 1.0;
};

// Recenters every object and validates M >= 2, gamma > 0, mu > 0.
SceneSpec make_scene(std::vector<ObjectModel> objects, double gamma, double magnification = 1.0);

// Whitespace-separated non-negative floats, row-major, one row per line.
Raster load_raster(const std::string& path, double pixel_size);

}  // namespace chernoff
