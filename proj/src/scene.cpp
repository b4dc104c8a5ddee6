#include "chernoff/scene.hpp"

#include <cmath>
#include <numbers>

#include "chernoff/errors.hpp"
#include "chernoff/matrix_io.hpp"
#include "chernoff/numerics.hpp"

namespace chernoff {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double double_factorial(int n) {
  double r = 1.0;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

// Angular average of cos^k(t) sin^l(t).
double angular_average(int k, int l) {
  if (k % 2 || l % 2) return 0.0;
  return double_factorial(k - 1) * double_factorial(l - 1) / double_factorial(k + l);
}

// E[r^n] for a uniform annulus (r_inner = 0 gives the disc).
double radial_average(int n, double r_inner, double r_outer) {
  const double num = std::pow(r_outer, n + 2) - std::pow(r_inner, n + 2);
  const double den = r_outer * r_outer - r_inner * r_inner;
  return 2.0 * num / ((n + 2) * den);
}

// Average of x^k over [c - s/2, c + s/2].
double cell_average(int k, double c, double s) {
  const double a = c - 0.5 * s, b = c + 0.5 * s;
  return (std::pow(b, k + 1) - std::pow(a, k + 1)) / ((k + 1) * s);
}

double pixel_coord(Eigen::Index i, Eigen::Index n, double size) {
  return (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * size;
}

// Moments of a tabulated uniform-cell image relative to the grid center.
template <class Value>
Eigen::MatrixXd cell_moments(const Value& value, Eigen::Index rows, Eigen::Index cols, double size,
                             int max_order) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(max_order + 1, max_order + 1);
  double total = 0.0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double y = pixel_coord(r, rows, size);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double v = value(r, c);
      if (v == 0.0) continue;
      total += v;
      const double x = pixel_coord(c, cols, size);
      for (int k = 0; k <= max_order; ++k)
        for (int l = 0; k + l <= max_order; ++l) m(k, l) += v * cell_average(k, x, size) * cell_average(l, y, size);
    }
  }
  return m / total;
}

Eigen::MatrixXd local_moments(const Shape& shape, int max_order) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(max_order + 1, max_order + 1);
  auto polar = [&](double ri, double ro, double ax, double ay) {
    for (int k = 0; k <= max_order; ++k)
      for (int l = 0; k + l <= max_order; ++l)
        m(k, l) = std::pow(ax, k) * std::pow(ay, l) * radial_average(k + l, ri, ro) * angular_average(k, l);
  };
  std::visit(overloaded{
                 [&](const PointSet& ps) {
                   for (const auto& p : ps.points)
                     for (int k = 0; k <= max_order; ++k)
                       for (int l = 0; k + l <= max_order; ++l)
                         m(k, l) += p.weight * std::pow(p.position.x(), k) * std::pow(p.position.y(), l);
                 },
                 [&](const UniformDisc& d) { polar(0.0, d.radius, 1.0, 1.0); },
                 [&](const Annulus& a) { polar(a.r_inner, a.r_outer, 1.0, 1.0); },
                 [&](const FilledEllipse& e) { polar(0.0, 1.0, e.semi_axis_x, e.semi_axis_y); },
                 [&](const BinaryGrid& g) {
                   m = cell_moments([&](Eigen::Index r, Eigen::Index c) { return g.cells(r, c) ? 1.0 : 0.0; },
                                    g.cells.rows(), g.cells.cols(), g.cell_size, max_order);
                 },
                 [&](const Raster& r) {
                   m = cell_moments([&](Eigen::Index i, Eigen::Index j) { return r.values(i, j); }, r.values.rows(),
                                    r.values.cols(), r.pixel_size, max_order);
                 },
             },
             shape);
  return m;
}

void polar_nodes(std::vector<QuadratureNode>& out, const Eigen::Vector2d& center, double ri, double ro, double ax,
                 double ay, int n_r, int n_t) {
  const auto [r, wr] = gauss_legendre(n_r, ri, ro);
  const double area = std::numbers::pi * (ro * ro - ri * ri);
  for (int i = 0; i < n_r; ++i) {
    for (int j = 0; j < n_t; ++j) {
      const double t = 2.0 * std::numbers::pi * (j + 0.5) / n_t;
      const double w = wr[i] * r[i] * (2.0 * std::numbers::pi / n_t) / area;
      out.push_back({center + Eigen::Vector2d(ax * r[i] * std::cos(t), ay * r[i] * std::sin(t)), w});
    }
  }
}

template <class Value>
void cell_nodes(std::vector<QuadratureNode>& out, const Eigen::Vector2d& center, const Value& value,
                Eigen::Index rows, Eigen::Index cols, double size, int per_axis) {
  const auto [g, wg] = gauss_legendre(per_axis, -0.5 * size, 0.5 * size);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double v = value(r, c);
      if (v == 0.0) continue;
      const Eigen::Vector2d cell = center + Eigen::Vector2d(pixel_coord(c, cols, size), pixel_coord(r, rows, size));
      for (int a = 0; a < per_axis; ++a)
        for (int b = 0; b < per_axis; ++b)
          out.push_back({cell + Eigen::Vector2d(g[a], g[b]), v * wg[a] * wg[b]});
    }
  }
}

}  // namespace

ObjectModel ObjectModel::build(Shape shape, const Eigen::Vector2d& center) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(center.x()) || !finite(center.y())) throw Error(ErrorCode::InvalidGeometry, "non-finite center");
  Eigen::Vector2d c = center;
  std::visit(overloaded{
                 [&](PointSet& ps) {
                   if (ps.points.empty()) throw Error(ErrorCode::NonPositiveFlux, "empty point set");
                   double total = 0.0;
                   for (const auto& p : ps.points) {
                     if (!finite(p.weight) || p.weight < 0.0 || !p.position.allFinite())
                       throw Error(ErrorCode::InvalidGeometry, "point weights must be finite and non-negative");
                     total += p.weight;
                   }
                   if (!(total > 0.0)) throw Error(ErrorCode::NonPositiveFlux, "all point weights are zero");
                   for (auto& p : ps.points) {
                     p.weight /= total;
                     p.position += c;
                   }
                   c.setZero();
                 },
                 [&](UniformDisc& d) {
                   if (!(d.radius > 0.0) || !finite(d.radius))
                     throw Error(ErrorCode::InvalidGeometry, "disc radius must be positive");
                 },
                 [&](Annulus& a) {
                   if (!(a.r_inner >= 0.0) || !(a.r_inner < a.r_outer) || !finite(a.r_outer))
                     throw Error(ErrorCode::InvalidGeometry, "annulus requires 0 <= r_inner < r_outer");
                 },
                 [&](FilledEllipse& e) {
                   if (!(e.semi_axis_x > 0.0) || !(e.semi_axis_y > 0.0) || !finite(e.semi_axis_x) ||
                       !finite(e.semi_axis_y))
                     throw Error(ErrorCode::InvalidGeometry, "ellipse semi-axes must be positive");
                 },
                 [&](BinaryGrid& g) {
                   if (!(g.cell_size > 0.0) || g.cells.size() == 0)
                     throw Error(ErrorCode::InvalidGeometry, "binary grid needs cells and a positive cell size");
                   if (g.cells.count() == 0) throw Error(ErrorCode::NonPositiveFlux, "binary grid has no lit cells");
                 },
                 [&](Raster& r) {
                   if (!(r.pixel_size > 0.0) || r.values.size() == 0)
                     throw Error(ErrorCode::InvalidGeometry, "raster needs values and a positive pixel size");
                   if (!r.values.allFinite() || (r.values.array() < 0.0).any())
                     throw Error(ErrorCode::InvalidGeometry, "raster values must be finite and non-negative");
                   const double total = r.values.sum() * r.pixel_size * r.pixel_size;
                   if (!(total > 0.0)) throw Error(ErrorCode::NonPositiveFlux, "raster has zero flux");
                   r.values /= total;
                 },
             },
             shape);
  return ObjectModel(std::move(shape), c);
}

std::string ObjectModel::kind_name() const {
  return std::visit(overloaded{
                        [](const PointSet&) { return std::string("point_set"); },
                        [](const UniformDisc&) { return std::string("disc"); },
                        [](const Annulus&) { return std::string("annulus"); },
                        [](const FilledEllipse&) { return std::string("ellipse"); },
                        [](const BinaryGrid&) { return std::string("binary_grid"); },
                        [](const Raster&) { return std::string("raster"); },
                    },
                    shape_);
}

ObjectModel ObjectModel::translated(const Eigen::Vector2d& offset) const {
  return build(shape_, center_ + offset);
}

ObjectModel ObjectModel::dilated(double a) const {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidGeometry, "dilation factor must be positive");
  Shape s = shape_;
  std::visit(overloaded{
                 [&](PointSet& ps) {
                   for (auto& p : ps.points) p.position *= a;
                 },
                 [&](UniformDisc& d) { d.radius *= a; },
                 [&](Annulus& an) {
                   an.r_inner *= a;
                   an.r_outer *= a;
                 },
                 [&](FilledEllipse& e) {
                   e.semi_axis_x *= a;
                   e.semi_axis_y *= a;
                 },
                 [&](BinaryGrid& g) { g.cell_size *= a; },
                 [&](Raster& r) { r.pixel_size *= a; },
             },
             s);
  return build(std::move(s), center_ * a);
}

ObjectModel ObjectModel::inverted() const {
  Shape s = shape_;
  std::visit(overloaded{
                 [&](PointSet& ps) {
                   for (auto& p : ps.points) p.position = -p.position;
                 },
                 [&](BinaryGrid& g) { g.cells = g.cells.colwise().reverse().rowwise().reverse().eval(); },
                 [&](Raster& r) { r.values = r.values.colwise().reverse().rowwise().reverse().eval(); },
                 [&](auto&) {},
             },
             s);
  return build(std::move(s), -center_);
}

ObjectModel ObjectModel::mirrored_x() const {
  Shape s = shape_;
  std::visit(overloaded{
                 [&](PointSet& ps) {
                   for (auto& p : ps.points) p.position.x() = -p.position.x();
                 },
                 [&](BinaryGrid& g) { g.cells = g.cells.rowwise().reverse().eval(); },
                 [&](Raster& r) { r.values = r.values.rowwise().reverse().eval(); },
                 [&](auto&) {},
             },
             s);
  return build(std::move(s), Eigen::Vector2d(-center_.x(), center_.y()));
}

std::vector<QuadratureNode> ObjectModel::quadrature(int refinement) const {
  std::vector<QuadratureNode> nodes;
  const bool fine = refinement > 0;
  const int n_r = fine ? 16 : 10;
  const int n_t = fine ? 48 : 32;
  std::visit(overloaded{
                 [&](const PointSet& ps) {
                   for (const auto& p : ps.points)
                     if (p.weight > 0.0) nodes.push_back({p.position, p.weight});
                 },
                 [&](const UniformDisc& d) { polar_nodes(nodes, center_, 0.0, d.radius, 1.0, 1.0, n_r, n_t); },
                 [&](const Annulus& a) { polar_nodes(nodes, center_, a.r_inner, a.r_outer, 1.0, 1.0, n_r, n_t); },
                 [&](const FilledEllipse& e) {
                   polar_nodes(nodes, center_, 0.0, 1.0, e.semi_axis_x, e.semi_axis_y, n_r, n_t);
                 },
                 [&](const BinaryGrid& g) {
                   cell_nodes(nodes, center_, [&](Eigen::Index r, Eigen::Index c) { return g.cells(r, c) ? 1.0 : 0.0; },
                              g.cells.rows(), g.cells.cols(), g.cell_size, fine ? 3 : 2);
                 },
                 [&](const Raster& r) {
                   cell_nodes(nodes, center_, [&](Eigen::Index i, Eigen::Index j) { return r.values(i, j); },
                              r.values.rows(), r.values.cols(), r.pixel_size, fine ? 2 : 1);
                 },
             },
             shape_);
  double total = 0.0;
  for (const auto& n : nodes) total += n.weight;
  for (auto& n : nodes) n.weight /= total;
  return nodes;
}

Eigen::Vector2d centroid(const ObjectModel& obj) {
  const MomentTable t = moments(obj, 1);
  return {t(1, 0), t(0, 1)};
}

ObjectModel recenter(const ObjectModel& obj) { return obj.translated(-centroid(obj)); }

MomentTable MomentTable::from_second_moments(double mx2, double my2) {
  MomentTable t(2);
  t(0, 0) = 1.0;
  t(2, 0) = mx2;
  t(0, 2) = my2;
  return t;
}

MomentTable moments(const ObjectModel& obj, int max_order) {
  if (max_order < 0) throw Error(ErrorCode::InvalidArgument, "max_order must be non-negative");
  const Eigen::MatrixXd local = local_moments(obj.shape(), max_order);
  const Eigen::Vector2d c = obj.center();
  MomentTable t(max_order);
  for (int k = 0; k <= max_order; ++k) {
    for (int l = 0; k + l <= max_order; ++l) {
      double v = 0.0;
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= l; ++j)
          v += binomial(k, i) * binomial(l, j) * std::pow(c.x(), k - i) * std::pow(c.y(), l - j) * local(i, j);
      t(k, l) = v;
    }
  }
  return t;
}

int lowest_differing_order(const MomentTable& a, const MomentTable& b, double tol) {
  if (a.max_order() != b.max_order())
    throw Error(ErrorCode::DimensionMismatch, "moment tables have different max_order");
  for (int order = 0; order <= a.max_order(); ++order)
    for (int k = 0; k <= order; ++k)
      if (std::abs(a(k, order - k) - b(k, order - k)) > tol) return order;
  return a.max_order() + 1;
}

ObjectModel object_with_second_moments(double mx2, double my2) {
  if (!(mx2 >= 0.0) || !(my2 >= 0.0)) throw Error(ErrorCode::InvalidGeometry, "second moments must be >= 0");
  const double ax = std::sqrt(2.0 * mx2), ay = std::sqrt(2.0 * my2);
  PointSet ps{{{{ax, 0.0}, 0.25}, {{-ax, 0.0}, 0.25}, {{0.0, ay}, 0.25}, {{0.0, -ay}, 0.25}}};
  return ObjectModel::build(std::move(ps));
}

SceneSpec make_scene(std::vector<ObjectModel> objects, double gamma, double magnification) {
  if (objects.size() < 2) throw Error(ErrorCode::InvalidArgument, "a scene needs at least two objects");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  if (!(magnification > 0.0)) throw Error(ErrorCode::InvalidArgument, "magnification must be positive");
  SceneSpec s;
  for (auto& o : objects) s.objects.push_back(recenter(o));
  s.gamma = gamma;
  s.magnification = magnification;
  return s;
}

Raster load_raster(const std::string& path, double pixel_size) {
  return Raster{read_real_matrix(path), pixel_size};
}

}  // namespace chernoff
