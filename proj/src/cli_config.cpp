#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "chernoff/cli_runner.hpp"
#include "chernoff/errors.hpp"

namespace chernoff {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::Config, path + ": " + msg);
}

// Typed access to one JSON object that remembers which keys were read.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }
  ~Node() = default;

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }
  std::string sub(const std::string& key) const { return path_ + "." + key; }
  const std::string& path() const { return path_; }

  double number(const std::string& key) {
    if (!has(key)) fail(sub(key), "required");
    return as_number(raw(key), sub(key));
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(sub(key), "expected an integer");
    return v.get<long>();
  }
  std::string string(const std::string& key) {
    if (!has(key)) fail(sub(key), "required");
    const json& v = raw(key);
    if (!v.is_string()) fail(sub(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(sub(key), "expected true or false");
    return v.get<bool>();
  }

  // Rejects keys that were never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) fail(path_, "unknown key '" + it.key() + "'");
  }

  static double as_number(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
    fail(path, "expected a number");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Eigen::Vector2d vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
  return {Node::as_number(v[0], path + "[0]"), Node::as_number(v[1], path + "[1]")};
}

ObjectModel parse_object(const json& j, const std::string& path) {
  Node n(j, path);
  const std::string kind = n.string("kind");
  const Eigen::Vector2d center = n.has("center") ? vec2(n.raw("center"), n.sub("center")) : Eigen::Vector2d::Zero();
  Shape shape;
  if (kind == "points") {
    if (!n.has("points")) fail(n.sub("points"), "required");
    const json& pts = n.raw("points");
    if (!pts.is_array() || pts.empty()) fail(n.sub("points"), "expected a non-empty array of [x, y, weight]");
    PointSet ps;
    for (size_t i = 0; i < pts.size(); ++i) {
      const std::string p = n.sub("points") + "[" + std::to_string(i) + "]";
      if (!pts[i].is_array() || (pts[i].size() != 2 && pts[i].size() != 3)) fail(p, "expected [x, y] or [x, y, weight]");
      ps.points.push_back({{Node::as_number(pts[i][0], p), Node::as_number(pts[i][1], p)},
                           pts[i].size() == 3 ? Node::as_number(pts[i][2], p) : 1.0});
    }
    shape = ps;
  } else if (kind == "disc") {
    shape = UniformDisc{n.number("radius")};
  } else if (kind == "annulus") {
    shape = Annulus{n.number("r_inner"), n.number("r_outer")};
  } else if (kind == "ellipse") {
    shape = FilledEllipse{n.number("semi_axis_x"), n.number("semi_axis_y")};
  } else if (kind == "grid") {
    if (!n.has("cells")) fail(n.sub("cells"), "required");
    const json& rows = n.raw("cells");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) fail(n.sub("cells"), "expected rows of 0/1");
    BinaryGrid g;
    g.cells.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].is_array() || rows[r].size() != rows[0].size()) fail(n.sub("cells"), "ragged rows");
      for (size_t c = 0; c < rows[r].size(); ++c)
        g.cells(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Node::as_number(rows[r][c], n.sub("cells")) != 0.0;
    }
    g.cell_size = n.number("cell_size");
    shape = g;
  } else if (kind == "raster") {
    shape = load_raster(n.string("path"), n.number("pixel_size"));
  } else if (kind == "moments") {
    const ObjectModel o = object_with_second_moments(n.number("mx2"), n.number("my2"));
    n.finish();
    return o.translated(center);
  } else {
    fail(n.sub("kind"), "unknown object kind '" + kind + "'");
  }
  n.finish();
  return ObjectModel::build(std::move(shape), center);
}

TabulatedProfile parse_profile(const json& j, const std::string& path) {
  Node n(j, path);
  TabulatedProfile p;
  p.origin = n.number("origin");
  p.step = n.number("step");
  if (!n.has("real")) fail(n.sub("real"), "required");
  const json& re = n.raw("real");
  if (!re.is_array()) fail(n.sub("real"), "expected an array");
  const json empty = json::array();
  const json& im = n.has("imag") ? n.raw("imag") : empty;
  if (!im.is_array() || (!im.empty() && im.size() != re.size())) fail(n.sub("imag"), "must match real in length");
  p.values.resize(static_cast<Eigen::Index>(re.size()));
  for (size_t i = 0; i < re.size(); ++i)
    p.values[static_cast<Eigen::Index>(i)] = {Node::as_number(re[i], n.sub("real")),
                                              im.empty() ? 0.0 : Node::as_number(im[i], n.sub("imag"))};
  n.finish();
  return p;
}

PsfModel parse_psf(const json& j, const std::string& path) {
  Node n(j, path);
  Grid grid;
  grid.half_width = n.number("domain_halfwidth", grid.half_width);
  grid.step = n.number("grid_step", grid.step);
  const std::string kind = n.string("kind", "gaussian");
  std::optional<PsfModel> psf;
  if (kind == "gaussian") {
    psf = PsfModel::gaussian(grid);
  } else if (kind == "separable") {
    if (!n.has("profile_x") || !n.has("profile_y")) fail(path, "separable PSF needs profile_x and profile_y");
    psf = PsfModel::separable(parse_profile(n.raw("profile_x"), n.sub("profile_x")),
                              parse_profile(n.raw("profile_y"), n.sub("profile_y")), grid);
  } else if (kind == "tabulated") {
    psf = PsfModel::load_tabulated(n.string("real_path"), n.string("imag_path"), n.number("origin"), n.number("step"),
                                   grid);
  } else {
    fail(n.sub("kind"), "unknown PSF kind '" + kind + "'");
  }
  n.finish();
  return *psf;
}

MeasurementSpec parse_measurement(const json& j, const std::string& path) {
  if (j.is_string()) return parse_measurement(json{{"kind", j}}, path);
  Node n(j, path);
  const std::string kind = n.string("kind");
  MeasurementSpec spec;
  if (kind == "direct") {
    DirectImaging d;
    d.grid_step = n.number("grid_step", d.grid_step);
    d.domain_halfwidth = n.number("domain_halfwidth", d.domain_halfwidth);
    spec = d;
  } else if (kind == "bspade") {
    spec = Bspade{};
  } else if (kind == "trispade") {
    Trispade t;
    if (n.has("misalignment")) t.misalignment = vec2(n.raw("misalignment"), n.sub("misalignment"));
    spec = t;
  } else {
    fail(n.sub("kind"), "unknown measurement kind '" + kind + "'");
  }
  n.finish();
  return spec;
}

std::vector<double> parse_gammas(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) out.push_back(Node::as_number(j[i], path + "[" + std::to_string(i) + "]"));
  } else {
    Node n(j, path);
    const double lo = n.number("min"), hi = n.number("max");
    const long count = n.integer("count", 8);
    const std::string spacing = n.string("spacing", "log");
    if (spacing != "log" && spacing != "linear") fail(n.sub("spacing"), "expected 'log' or 'linear'");
    if (count < 1) fail(n.sub("count"), "must be >= 1");
    if (!(lo > 0.0) || !(hi >= lo)) fail(path, "need 0 < min <= max");
    for (long i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      out.push_back(spacing == "log" ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo));
    }
    n.finish();
  }
  if (out.empty()) fail(path, "must not be empty");
  for (double g : out)
    if (!(g > 0.0) || !std::isfinite(g)) fail(path, "every gamma must be positive and finite");
  return out;
}

DatabaseSpec parse_database(const json& j, const std::string& path) {
  Node n(j, path);
  DatabaseSpec d;
  const std::string packing = n.string("packing", "quadratic");
  if (packing == "quadratic")
    d.packing = Packing::Quadratic;
  else if (packing == "linear")
    d.packing = Packing::Linear;
  else
    fail(n.sub("packing"), "expected 'quadratic' or 'linear'");
  d.mx = static_cast<int>(n.integer("mx", d.mx));
  d.my = static_cast<int>(n.integer("my", d.mx));
  const double lo = n.number("m_min", d.mx2_min), hi = n.number("m_max", d.mx2_max);
  d.mx2_min = n.number("mx2_min", lo);
  d.mx2_max = n.number("mx2_max", hi);
  d.my2_min = n.number("my2_min", lo);
  d.my2_max = n.number("my2_max", hi);
  n.finish();
  try {
    validate_database(d);
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return d;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RunConfig parse_config(const std::string& text, const std::string& command, std::optional<std::uint64_t> seed_override) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("config: ") + e.what());
  }
  if (seed_override) j["seed"] = *seed_override;
  RunConfig cfg;
  cfg.canonical = j.dump();
  Node root(j, "config");
  const bool needs_scene = command == "exponent" || command == "simulate";

  try {
    cfg.psf = root.has("psf") ? parse_psf(root.raw("psf"), root.sub("psf")) : PsfModel::gaussian();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    fail(root.sub("psf"), e.what());
  }
  cfg.basis_order = static_cast<int>(root.integer("basis_order", cfg.basis_order));
  if (cfg.basis_order < 2 || cfg.basis_order > 4) fail(root.sub("basis_order"), "must be 2, 3 or 4");

  if (root.has("scene")) {
    Node scene(root.raw("scene"), root.sub("scene"));
    cfg.recenter = scene.boolean("recenter", true);
    if (!scene.has("objects")) fail(scene.sub("objects"), "required");
    const json& objs = scene.raw("objects");
    if (!objs.is_array()) fail(scene.sub("objects"), "expected an array");
    for (size_t i = 0; i < objs.size(); ++i) {
      const std::string p = scene.sub("objects") + "[" + std::to_string(i) + "]";
      try {
        ObjectModel o = parse_object(objs[i], p);
        cfg.objects.push_back(cfg.recenter ? recenter(o) : o);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        fail(p, e.what());
      }
    }
    scene.finish();
  }
  if (needs_scene && cfg.objects.size() != 2) fail("config.scene.objects", "exactly two objects are required");

  if (!root.has("gammas")) fail("config.gammas", "required");
  cfg.gammas = parse_gammas(root.raw("gammas"), root.sub("gammas"));

  if (root.has("measurements")) {
    const json& ms = root.raw("measurements");
    if (!ms.is_array() || ms.empty()) fail(root.sub("measurements"), "expected a non-empty array");
    for (size_t i = 0; i < ms.size(); ++i)
      cfg.measurements.push_back(parse_measurement(ms[i], root.sub("measurements") + "[" + std::to_string(i) + "]"));
  } else {
    cfg.measurements = {Trispade{}, DirectImaging{}};
  }

  if (root.has("database")) cfg.database = parse_database(root.raw("database"), root.sub("database"));
  if (root.has("mx_values")) {
    const json& v = root.raw("mx_values");
    if (!v.is_array() || v.empty()) fail(root.sub("mx_values"), "expected a non-empty array");
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<int>() < 2) fail(root.sub("mx_values"), "entries must be integers >= 2");
      cfg.mx_values.push_back(x.get<int>());
    }
  } else {
    cfg.mx_values = {2, 3, 4, 6, 8, 12, 16, 24, 32};
  }
  cfg.threshold = root.number("threshold", cfg.threshold);
  if (!(cfg.threshold > 0.0)) fail(root.sub("threshold"), "must be positive");
  const std::string mode = root.string("threshold_mode", "absolute");
  if (mode != "absolute" && mode != "relative") fail(root.sub("threshold_mode"), "expected 'absolute' or 'relative'");
  cfg.threshold_relative = mode == "relative";

  cfg.trials = root.integer("trials", cfg.trials);
  if (cfg.trials < 1) fail(root.sub("trials"), "must be positive");
  if (root.has("photons")) {
    const json& v = root.raw("photons");
    if (!v.is_array() || v.empty()) fail(root.sub("photons"), "expected a non-empty array");
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<long>() < 0) fail(root.sub("photons"), "entries must be integers >= 0");
      cfg.photons.push_back(x.get<long>());
    }
    for (size_t i = 1; i < cfg.photons.size(); ++i)
      if (cfg.photons[i] <= cfg.photons[i - 1]) fail(root.sub("photons"), "must be increasing");
  }
  if (root.has("photons_auto")) {
    Node a(root.raw("photons_auto"), root.sub("photons_auto"));
    cfg.photons_xi_min = a.number("xi_n_min", cfg.photons_xi_min);
    cfg.photons_xi_max = a.number("xi_n_max", cfg.photons_xi_max);
    cfg.photons_count = static_cast<int>(a.integer("count", cfg.photons_count));
    if (!(cfg.photons_xi_min > 0.0) || !(cfg.photons_xi_max > cfg.photons_xi_min) || cfg.photons_count < 2)
      fail(a.path(), "need 0 < xi_n_min < xi_n_max and count >= 2");
    a.finish();
  }
  if (root.has("seed")) {
    const json& s = root.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      fail(root.sub("seed"), "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.epsilon = root.number("epsilon", cfg.epsilon);
  if (!(cfg.epsilon > 0.0)) fail(root.sub("epsilon"), "must be positive");
  cfg.llr_bins = static_cast<int>(root.integer("llr_bins", cfg.llr_bins));
  if (cfg.llr_bins < 0 || cfg.llr_bins == 1) fail(root.sub("llr_bins"), "must be 0 (no binning) or >= 2");
  root.finish();
  return cfg;
}

}  // namespace chernoff
