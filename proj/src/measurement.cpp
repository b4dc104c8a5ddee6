#include "chernoff/measurement.hpp"

#include <Eigen/Eigenvalues>

#include "chernoff/errors.hpp"

namespace chernoff {
namespace {

Eigen::VectorXd finish(Eigen::VectorXd p) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] < 0.0) {
      if (p[i] < -1e-10) throw Error(ErrorCode::NotPSD, "negative outcome probability");
      p[i] = 0.0;
    }
  return p / p.sum();
}

}  // namespace

std::string measurement_name(const MeasurementSpec& spec) {
  switch (spec.index()) {
    case 0: return "direct";
    case 1: return "bspade";
    case 2: return is_aligned(spec) ? "trispade" : "trispade_misaligned";
    default: return "custom";
  }
}

bool is_modal(const MeasurementSpec& spec) { return !std::holds_alternative<DirectImaging>(spec); }

bool is_aligned(const MeasurementSpec& spec) {
  const auto* t = std::get_if<Trispade>(&spec);
  return t == nullptr || t->misalignment.isZero(0.0);
}

void validate_measurement(const MeasurementSpec& spec, int dim) {
  if (const auto* d = std::get_if<DirectImaging>(&spec)) {
    if (!(d->grid_step > 0.0) || !(d->domain_halfwidth > d->grid_step))
      throw Error(ErrorCode::InvalidArgument, "direct imaging needs a positive pixel step inside the domain");
    return;
  }
  if (std::holds_alternative<Trispade>(spec) && dim < 3)
    throw Error(ErrorCode::DimensionMismatch, "TriSPADE needs at least three modes");
  const auto* c = std::get_if<CustomProjective>(&spec);
  if (c == nullptr) return;
  if (c->projectors.empty()) throw Error(ErrorCode::InvalidArgument, "custom measurement has no projectors");
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for (size_t i = 0; i < c->projectors.size(); ++i) {
    const Eigen::MatrixXcd& p = c->projectors[i];
    if (p.rows() != dim || p.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "projector size mismatch");
    if ((p * p - p).cwiseAbs().maxCoeff() > 1e-8 || (p - p.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
      throw Error(ErrorCode::InvalidArgument, "projector is not an orthogonal projection");
    for (size_t j = 0; j < i; ++j)
      if ((p * c->projectors[j]).cwiseAbs().maxCoeff() > 1e-8)
        throw Error(ErrorCode::InvalidArgument, "projectors are not mutually orthogonal");
    total += p;
  }
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(total, Eigen::EigenvaluesOnly).eigenvalues();
  if (ev.maxCoeff() > 1.0 + 1e-8) throw Error(ErrorCode::InvalidArgument, "projectors sum beyond the identity");
}

Eigen::VectorXd outcome_probabilities(const DensityMatrix& rho, const MeasurementSpec& spec) {
  if (!is_modal(spec)) throw Error(ErrorCode::InvalidArgument, "direct imaging needs the object form");
  if (!is_aligned(spec)) throw Error(ErrorCode::InvalidArgument, "misaligned sorters need the object form");
  validate_measurement(spec, rho.dim());
  const Eigen::MatrixXcd r = repair_psd(rho).entries;
  const Eigen::VectorXd diag = r.diagonal().real();
  const int d = rho.dim();
  if (std::holds_alternative<Bspade>(spec)) {
    Eigen::VectorXd p(2);
    p << diag[0], diag.tail(d - 1).sum();
    return finish(p);
  }
  if (std::holds_alternative<Trispade>(spec)) {
    Eigen::VectorXd p(4);
    p << diag[0], diag[1], diag[2], diag.tail(d - 3).sum();
    return finish(p);
  }
  const auto& projectors = std::get<CustomProjective>(spec).projectors;
  Eigen::VectorXd p(static_cast<Eigen::Index>(projectors.size()) + 1);
  Eigen::MatrixXcd rest = Eigen::MatrixXcd::Identity(d, d);
  for (size_t i = 0; i < projectors.size(); ++i) {
    p[static_cast<Eigen::Index>(i)] = (projectors[i] * r).trace().real();
    rest -= projectors[i];
  }
  p[p.size() - 1] = (rest * r).trace().real();
  return finish(p);
}

DirectImage direct_image(const ObjectModel& obj, const PsfModel& psf, double gamma, const DirectImaging& pixels) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  validate_measurement(pixels, 1);
  DirectImage img;
  img.grid = Grid{pixels.domain_halfwidth, pixels.grid_step};
  const Grid& g = img.grid;
  const int n = g.size();
  const auto nodes = obj.quadrature(1);
  const Eigen::Index k = static_cast<Eigen::Index>(nodes.size());
  if (psf.is_separable()) {
    Eigen::MatrixXd ax(n, k), by(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Vector2d shift = gamma * nodes[static_cast<size_t>(j)].position;
      const double w = nodes[static_cast<size_t>(j)].weight;
      for (int i = 0; i < n; ++i) {
        ax(i, j) = std::norm(psf.factor(0, 0, g.coord(i) - shift.x())) * w;
        by(i, j) = std::norm(psf.factor(1, 0, g.coord(i) - shift.y()));
      }
    }
    img.probabilities = by * ax.transpose() * g.cell_area();
  } else {
    img.probabilities = Eigen::MatrixXd::Zero(n, n);
    for (const auto& node : nodes) {
      const Eigen::Vector2d shift = gamma * node.position;
      for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r)
          img.probabilities(r, c) += node.weight * std::norm(psf.amplitude(g.coord(c) - shift.x(), g.coord(r) - shift.y()));
    }
    img.probabilities *= g.cell_area();
  }
  img.mass = img.probabilities.sum();
  if (img.mass < 0.98)
    throw Error(ErrorCode::TruncationTooLossy, "direct image captures only " + std::to_string(img.mass));
  img.probabilities /= img.mass;
  return img;
}

Eigen::VectorXd outcome_probabilities(const ObjectModel& obj, const PsfModel& psf, const PadBasis& basis, double gamma,
                                      const MeasurementSpec& spec) {
  if (const auto* d = std::get_if<DirectImaging>(&spec)) {
    const DirectImage img = direct_image(obj, psf, gamma, *d);
    return Eigen::Map<const Eigen::VectorXd>(img.probabilities.data(), img.probabilities.size());
  }
  if (is_aligned(spec)) return outcome_probabilities(assemble_exact(obj, psf, basis, gamma), spec);
  validate_measurement(spec, basis.dim());
  const Eigen::Vector2d delta = std::get<Trispade>(spec).misalignment;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(4);
  for (const auto& node : obj.quadrature(1)) {
    const Eigen::VectorXcd o = shifted_psf_overlaps(basis, psf, gamma * (node.position - delta));
    const Eigen::VectorXd o2 = o.cwiseAbs2();
    p[0] += node.weight * o2[0];
    p[1] += node.weight * o2[1];
    p[2] += node.weight * o2[2];
    p[3] += node.weight * (o2.tail(o2.size() - 3).sum() + std::max(0.0, 1.0 - o2.sum()));
  }
  return finish(p);
}

ExponentResult ce_measurement_exact(const DensityMatrix& rho1, const DensityMatrix& rho2, const MeasurementSpec& spec,
                                    const PadBasis& basis) {
  if (rho1.dim() != rho2.dim() || rho1.dim() > basis.dim())
    throw Error(ErrorCode::DimensionMismatch, "state and basis dimensions disagree");
  ExponentResult r = classical_chernoff(outcome_probabilities(rho1, spec), outcome_probabilities(rho2, spec));
  r.diagnostics.trace_deficit_1 = rho1.trace_deficit;
  r.diagnostics.trace_deficit_2 = rho2.trace_deficit;
  return r;
}

ExponentResult ce_measurement_exact(const ObjectModel& o1, const ObjectModel& o2, const PsfModel& psf,
                                    const PadBasis& basis, double gamma, const MeasurementSpec& spec) {
  if (is_modal(spec) && is_aligned(spec))
    return ce_measurement_exact(assemble_exact(o1, psf, basis, gamma), assemble_exact(o2, psf, basis, gamma), spec,
                                basis);
  return classical_chernoff(outcome_probabilities(o1, psf, basis, gamma, spec),
                            outcome_probabilities(o2, psf, basis, gamma, spec));
}

}  // namespace chernoff
