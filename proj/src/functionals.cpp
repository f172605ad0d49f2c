#include "shapeflow/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace shapeflow {

double torsional_rigidity(const Field& u) { return integrate(u); }

namespace {

double weighted_x_dot_nu(const BoundaryTrace& tr) {
  double s = 0.0;
  for (const auto& p : tr.points) s += p.weight * p.grad_sq * dot(p.x, p.normal);
  return s;
}

}  // namespace

double pohozaev_T(const BoundaryTrace& tr) { return 0.25 * weighted_x_dot_nu(tr); }

double pohozaev_lambda1(const BoundaryTrace& tr) { return 0.5 * weighted_x_dot_nu(tr); }

double side_average_flux(const BoundaryTrace& tr, int side) {
  if (side < 0 || side >= static_cast<int>(tr.tags.size())) {
    throw Error(ErrorKind::UnknownTag, "side index out of range");
  }
  double s = 0.0;
  for (const auto& p : tr.points) {
    if (p.side == side) s += p.weight * p.grad_sq;
  }
  return s / tr.side_lengths[side];
}

double side_average_flux(const BoundaryTrace& tr, std::string_view tag) {
  return side_average_flux(tr, tr.side_index(tag));
}

Solution solve(const Polygon& p, double target_h, const ReportOptions& opts) {
  return solve_on(std::make_shared<const Mesh>(mesh_polygon(p, target_h, opts.mesh)), opts);
}

Solution solve_on(std::shared_ptr<const Mesh> mesh, const ReportOptions& opts) {
  const Polygon& p = mesh->domain();
  Solution s;
  s.mesh = std::move(mesh);
  FemProblem prob(s.mesh, opts.degree);
  s.torsion = prob.torsion();
  s.torsion_trace = boundary_flux_sq(s.torsion);

  FunctionalReport& r = s.report;
  r.area = area(p);
  r.T_domain = torsional_rigidity(s.torsion);
  r.T_pohozaev = pohozaev_T(s.torsion_trace);
  r.T_normalized = r.T_domain / (r.area * r.area);
  r.T_gap = std::abs(r.T_domain - r.T_pohozaev) / r.T_domain;
  for (std::size_t i = 0; i < p.size(); ++i) {
    r.side_average.emplace_back(p.tag(i), side_average_flux(s.torsion_trace, static_cast<int>(i)));
  }
  if (opts.with_eigen) {
    s.eigen = prob.principal_eigen();
    s.eigen_trace = boundary_flux_sq(s.eigen->field);
    r.lambda1 = s.eigen->lambda1;
    r.lambda1_pohozaev = pohozaev_lambda1(*s.eigen_trace);
    r.lambda1_normalized = r.lambda1 * r.area;
    r.lambda1_gap = std::abs(r.lambda1 - r.lambda1_pohozaev) / r.lambda1;
  } else {
    r.lambda1 = r.lambda1_pohozaev = r.lambda1_normalized = std::nan("");
  }
  r.tolerance = opts.consistency_tol;
  r.consistent = r.T_gap <= r.tolerance && (!opts.with_eigen || r.lambda1_gap <= r.tolerance);
  r.min_angle_deg = s.mesh->min_angle_deg();
  r.h = s.mesh->h();
  r.num_triangles = s.mesh->num_triangles();
  return s;
}

FunctionalReport report(const Polygon& p, double target_h, const ReportOptions& opts) {
  return solve(p, target_h, opts).report;
}

std::vector<ReflectionPair> reflection_pairs(const Field& u, int side, int count) {
  const Polygon& p = u.mesh->domain();
  if (side < 0 || side >= static_cast<int>(p.size())) throw Error(ErrorKind::UnknownTag, "side index out of range");
  if (count < 1) throw Error(ErrorKind::InvalidInput, "count must be positive");
  const Vec2 a = p.edge_start(side), b = p.edge_end(side);
  const Vec2 m = 0.5 * (a + b);
  std::vector<ReflectionPair> out;
  for (int k = 1; k <= count; ++k) {
    const double s = 0.1 + 0.7 * (k - 1) / std::max(1, count - 1);
    ReflectionPair r;
    r.near_end = m + s * (b - m);
    r.near_start = m + s * (a - m);
    r.grad_sq_end = boundary_gradient_sq(u, side, r.near_end);
    r.grad_sq_start = boundary_gradient_sq(u, side, r.near_start);
    out.push_back(r);
  }
  return out;
}

}  // namespace shapeflow
