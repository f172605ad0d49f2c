#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shapeflow/errors.hpp"

namespace shapeflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
/// Counterclockwise rotation by 90 degrees.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// Row-major 2x2 matrix; enough for the affine deformation families.
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  constexpr Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
};

/// Minimum admissible area of any polygon produced by a flow.
inline constexpr double kDegenerateArea = 1e-12;

/// Signed shoelace area; positive for counterclockwise vertex order.
double signed_area(std::span<const Vec2> pts);

/// Simple counterclockwise polygon with one opaque tag per edge.
/// Edge i joins vertex i to vertex (i+1) mod N.
class Polygon {
 public:
  /// Validates N >= 3, simplicity, counterclockwise orientation and positive
  /// area. Empty `tags` yields "e0", "e1", ...
  explicit Polygon(std::vector<Vec2> vertices, std::vector<std::string> tags = {});

  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::string>& tags() const { return tags_; }
  Vec2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  const std::string& tag(std::size_t edge) const { return tags_[edge]; }

  std::optional<std::size_t> find_tag(std::string_view tag) const;
  /// Throws `UnknownTag`.
  std::size_t edge_index(std::string_view tag) const;

  Vec2 edge_start(std::size_t i) const { return vertex(i); }
  Vec2 edge_end(std::size_t i) const { return vertex(i + 1); }
  double side_length(std::size_t i) const { return distance(vertex(i), vertex(i + 1)); }
  /// Unit outer normal of edge i.
  Vec2 outer_normal(std::size_t i) const;

  double perimeter() const;
  /// Area centroid.
  Vec2 centroid() const;
  /// Arithmetic mean of the vertices.
  Vec2 vertex_centroid() const;
  double diameter() const;
  /// Every turn is a left turn up to -tol * diam^2.
  bool is_convex(double rel_tol = 1e-12) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::string> tags_;
};

double area(const Polygon& p);

/// Uniform scaling about the origin to the requested area.
Polygon normalize_area(const Polygon& p, double target);

Polygon translate(const Polygon& p, Vec2 offset);
Polygon scale(const Polygon& p, double factor);
Polygon rotate(const Polygon& p, double angle);

/// Axis-aligned rectangle [0,w]x[0,h], tags AB, BC, CD, DA from the origin.
Polygon make_rectangle(double width, double height);
/// Rhombus A=(-a,0), B=(0,-a q), C=(a,0), D=(0,a q); q is the diagonal ratio.
Polygon make_rhombus(double half_diagonal, double ratio);
/// Regular N-gon inscribed in the circle of radius r about `center`.
Polygon make_regular_polygon(int n, double radius, Vec2 center = {});
/// Triangle with tags AB, BC, CA.
Polygon make_triangle(Vec2 a, Vec2 b, Vec2 c);

// ---------------------------------------------------------------------------
// Deformation families

enum class FlowKind {
  HeightStretch,
  HeightCompress,
  LegStretch,
  RhombusDiagonal,
  RectangleSide,
  Translate,
  Scale,
};

std::string_view to_string(FlowKind kind) noexcept;
/// Accepts the names produced by to_string, case-insensitively.
std::optional<FlowKind> flow_kind_from_string(std::string_view name);

/// One named affine family F_t(x) = M(t) x + c(t) with velocity field
/// eta(t, x) = L(t) x + b(t), satisfying dF_t/dt = eta(t, F_t) and F_0 = id.
///
///   HeightStretch   F_t = (x, (1+t) y)                    eta = (0, y/(1+t))
///   HeightCompress  F_t = (x, (1-t) y)                    eta = (0, -y/(1-t))
///   LegStretch(a)   F_t = ((1+t) x - t cot(a) y, y)       eta = ((x - y cot a)/(1+t), 0)
///   RhombusDiagonal same map as HeightStretch, applied to a rhombus
///   RectangleSide   F_t = ((1+t) x, y)                    eta = (x/(1+t), 0)
///   Translate(d)    F_t = x + t d                         eta = d
///   Scale           F_t = e^t x                           eta = x
class AffineFlow {
 public:
  static AffineFlow height_stretch() { return AffineFlow(FlowKind::HeightStretch); }
  static AffineFlow height_compress() { return AffineFlow(FlowKind::HeightCompress); }
  static AffineFlow leg_stretch(double alpha);
  static AffineFlow rhombus_diagonal() { return AffineFlow(FlowKind::RhombusDiagonal); }
  static AffineFlow rectangle_side() { return AffineFlow(FlowKind::RectangleSide); }
  static AffineFlow translate(Vec2 direction);
  static AffineFlow scale() { return AffineFlow(FlowKind::Scale); }

  FlowKind kind() const { return kind_; }
  /// Aperture of LegStretch, zero otherwise.
  double alpha() const { return alpha_; }
  Vec2 direction() const { return direction_; }

  bool admissible(double t) const;
  /// Throws `DegenerateFlowTime` outside the admissible range.
  void require_admissible(double t) const;

  Mat2 map_matrix(double t) const;
  Vec2 map_offset(double t) const;
  Vec2 map(double t, Vec2 x) const { return map_matrix(t) * x + map_offset(t); }

  Mat2 velocity_matrix(double t) const;
  Vec2 velocity_offset(double t) const;
  Vec2 velocity(double t, Vec2 x) const { return velocity_matrix(t) * x + velocity_offset(t); }

 private:
  explicit AffineFlow(FlowKind kind) : kind_(kind) {}

  FlowKind kind_;
  double alpha_ = 0.0;
  Vec2 direction_{};
};

/// Image F_t(p); tags and orientation are preserved. Throws
/// `DegenerateFlowTime` if t is inadmissible or the image area is below
/// kDegenerateArea.
Polygon apply_flow(const AffineFlow& flow, double t, const Polygon& p);

/// eta(t, x); same admissibility rules as apply_flow.
Vec2 flow_velocity(const AffineFlow& flow, double t, Vec2 x);

// ---------------------------------------------------------------------------
// Triangle configurations

enum class TriangleHypothesis {
  /// AB longest, |AB| > |BC| >= |AC|, C on the positive y-axis, foot at O.
  ShortestHeightStretch,
  /// Non-obtuse, AB shortest, |AB| < |BC| <= |AC|, C on the positive y-axis.
  TallestHeightCompress,
  /// |AB| = |AC|, A at the origin, B on the positive x-axis.
  LegStretch,
};

/// Triangle with named vertices placed in the coordinates a theorem assumes.
class TriangleConfig {
 public:
  /// Rotates, reflects and translates an arbitrary vertex triple into the
  /// placement required by `hyp`, assigning the roles A, B, C. Throws
  /// `HypothesisViolated` when the side-length ordering fails.
  static TriangleConfig canonicalize(Vec2 p, Vec2 q, Vec2 r, TriangleHypothesis hyp);
  /// Isosceles triangle A=(0,0), B=(leg,0), C=leg(cos a, sin a).
  static TriangleConfig isosceles(double alpha, double leg = 1.0);

  TriangleHypothesis hypothesis() const { return hyp_; }
  Vec2 a() const { return a_; }
  Vec2 b() const { return b_; }
  Vec2 c() const { return c_; }
  /// Interior angles at A, B, C.
  double angle_a() const;
  double angle_b() const;
  double angle_c() const;
  bool is_obtuse() const;

  /// Counterclockwise polygon with tags AB, BC, CA.
  Polygon polygon() const;

 private:
  TriangleConfig(Vec2 a, Vec2 b, Vec2 c, TriangleHypothesis hyp);

  Vec2 a_, b_, c_;
  TriangleHypothesis hyp_;
};

enum class CriticalKind { Stretch, Compress };

/// Unique t > 0 with |BA| = |BC_t| where C_t = (1+t)C (stretch) or (1-t)C
/// (compress). Throws `HypothesisViolated` if cfg was not built for the
/// corresponding theorem.
double critical_time(const TriangleConfig& cfg, CriticalKind kind);

/// cot(theta) = 2 cot(alpha) + cot(beta) for the angle between the median
/// from A and the side AB in the leg-stretched triangle.
double median_cot_theta(double alpha, double beta);

/// Interior angle at `at` between rays to `p` and `q`.
double interior_angle(Vec2 at, Vec2 p, Vec2 q);

}  // namespace shapeflow
