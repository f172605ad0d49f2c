#pragma once

#include <array>
#include <vector>

#include "shapeflow/geometry.hpp"

namespace shapeflow {

/// Boundary segment of a mesh, lying on polygon side `side`.
struct BoundaryEdge {
  int v0 = 0;  // counterclockwise along the boundary
  int v1 = 0;
  int side = 0;
  int triangle = 0;  // the adjacent triangle
};

/// Conforming triangulation of a polygon. Triangles are counterclockwise and
/// every boundary edge carries the polygon side it lies on.
class Mesh {
 public:
  Mesh(Polygon domain, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles);

  const Polygon& domain() const { return domain_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  /// Longest triangle edge.
  double h() const { return h_; }
  /// Smallest interior angle, degrees.
  double min_angle_deg() const { return min_angle_deg_; }
  double triangle_area(std::size_t t) const;

 private:
  Polygon domain_;
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_;
  double h_ = 0.0;
  double min_angle_deg_ = 0.0;
};

/// Rows below this angle are reported as untrusted by the scans.
inline constexpr double kMinTrustedAngleDeg = 5.0;

/// Centroid fan followed by uniform 4-way refinement until the longest edge
/// is at most target_h. Throws `NonConvexInput`.
Mesh triangulate(const Polygon& p, double target_h);

/// Splits every triangle into four through its edge midpoints.
Mesh refine(const Mesh& m);

/// Number of uniform refinements `triangulate` applies to reach target_h.
int fan_levels(const Polygon& p, double target_h);
/// Centroid fan refined uniformly `levels` times.
Mesh triangulate_levels(const Polygon& p, int levels);

/// Local refinement near the polygon corners, repeated `passes` times.
/// Pass k refines every triangle with a vertex whose fan hat-function value
/// for some corner is at least 1 - radius / 2^k (the triangles touching a
/// corner always qualify). Conformity is restored by longest-edge bisection,
/// so angles are never split below half their size.
Mesh refine_corners(const Mesh& m, int passes, double radius = 0.0);

/// Constrained Delaunay mesh of boundary points spaced at most target_h
/// apart plus a hexagonal lattice of interior points. The lattice is
/// anchored at the area centroid and aligned with the principal axis of the
/// polygon, so congruent polygons receive congruent meshes. Throws
/// `NonConvexInput`.
Mesh triangulate_lattice(const Polygon& p, double target_h);

enum class MeshStrategy { Auto, Fan, Lattice };

/// Fan meshes for polygons with at most kFanMaxVertices vertices, lattice
/// meshes otherwise (Auto).
inline constexpr std::size_t kFanMaxVertices = 8;

struct MeshOptions {
  MeshStrategy strategy = MeshStrategy::Auto;
  /// Uniform fan refinements; negative means derive from target_h.
  int levels = -1;
  /// Corner grading of fan meshes (see refine_corners).
  int corner_passes = 3;
  double corner_radius = 0.1;
};

/// Fan meshes are graded toward the corners; lattice meshes are not.
Mesh mesh_polygon(const Polygon& p, double target_h, const MeshOptions& opts = {});

/// Image of `m` under an orientation-preserving affine map x -> A x + b; the
/// domain becomes `image`, whose vertices must be the mapped polygon vertices.
Mesh map_mesh(const Mesh& m, Mat2 a, Vec2 b, const Polygon& image);

/// True when mesh_polygon would use the fan mesher.
bool uses_fan(const Polygon& p, const MeshOptions& opts = {});

}  // namespace shapeflow
