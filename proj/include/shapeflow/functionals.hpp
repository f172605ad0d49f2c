#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shapeflow/fem.hpp"

namespace shapeflow {

/// T = int u.
double torsional_rigidity(const Field& u);

/// (1/4) int |grad u|^2 (x . nu) over the boundary.
double pohozaev_T(const BoundaryTrace& tr);

/// (1/2) int |grad v|^2 (x . nu) over the boundary, v normalized in L2.
double pohozaev_lambda1(const BoundaryTrace& tr);

/// Mean of |grad w|^2 over one side. Throws `UnknownTag`.
double side_average_flux(const BoundaryTrace& tr, std::string_view tag);
double side_average_flux(const BoundaryTrace& tr, int side);

struct FunctionalReport {
  double area = 0.0;
  double T_domain = 0.0;
  double T_pohozaev = 0.0;
  double lambda1 = 0.0;
  double lambda1_pohozaev = 0.0;
  double T_normalized = 0.0;        // T / area^2
  double lambda1_normalized = 0.0;  // lambda1 * area
  std::vector<std::pair<std::string, double>> side_average;  // torsion flux per tag

  double T_gap = 0.0;  // relative
  double lambda1_gap = 0.0;
  double tolerance = 1e-3;
  bool consistent = false;
  double min_angle_deg = 0.0;
  double h = 0.0;
  std::size_t num_triangles = 0;
};

struct ReportOptions {
  int degree = 2;
  double consistency_tol = 1e-3;
  bool with_eigen = true;
  MeshOptions mesh;
};

/// Meshes `p` at absolute size `target_h`, solves both problems and
/// evaluates every functional.
FunctionalReport report(const Polygon& p, double target_h, const ReportOptions& opts = {});

/// Functionals together with the fields and traces they came from.
struct Solution {
  std::shared_ptr<const Mesh> mesh;
  Field torsion;
  BoundaryTrace torsion_trace;
  std::optional<EigenResult> eigen;
  std::optional<BoundaryTrace> eigen_trace;
  FunctionalReport report;
};

Solution solve(const Polygon& p, double target_h, const ReportOptions& opts = {});
/// Same on a prepared mesh (opts.mesh is ignored).
Solution solve_on(std::shared_ptr<const Mesh> mesh, const ReportOptions& opts = {});

/// Boundary points placed symmetrically about the midpoint of one side.
struct ReflectionPair {
  Vec2 near_start, near_end;
  double grad_sq_start = 0.0, grad_sq_end = 0.0;
};

/// `count` mirrored pairs at 10%..80% of the half-side from the midpoint.
std::vector<ReflectionPair> reflection_pairs(const Field& u, int side, int count);

}  // namespace shapeflow
