#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "doctest.h"
#include "shapeflow/mesh.hpp"

using namespace shapeflow;

namespace {

Polygon equilateral() { return make_triangle({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}); }

void check_mesh(const Mesh& m) {
  const Polygon& p = m.domain();
  double a = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    CHECK(m.triangle_area(t) > 0.0);
    a += m.triangle_area(t);
  }
  CHECK(a == doctest::Approx(area(p)).epsilon(1e-12));

  std::vector<double> per_side(p.size(), 0.0);
  for (const auto& be : m.boundary_edges()) {
    const Vec2 x0 = m.vertices()[be.v0], x1 = m.vertices()[be.v1];
    per_side[be.side] += distance(x0, x1);
    // both endpoints on the side's line
    const Vec2 n = p.outer_normal(be.side);
    const Vec2 s = p.edge_start(be.side);
    CHECK(std::abs(dot(x0 - s, n)) < 1e-12 * p.diameter());
    CHECK(std::abs(dot(x1 - s, n)) < 1e-12 * p.diameter());
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(per_side[i] == doctest::Approx(p.side_length(i)).epsilon(1e-12));
  }

  std::set<std::pair<int, int>> edges;
  for (const auto& tri : m.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const int a0 = tri[k], b0 = tri[(k + 1) % 3];
      edges.insert({std::min(a0, b0), std::max(a0, b0)});
    }
  }
  const long v = static_cast<long>(m.num_vertices());
  const long e = static_cast<long>(edges.size());
  const long f = static_cast<long>(m.num_triangles());
  CHECK(v - e + f == 1);
}

}  // namespace

TEST_CASE("fan mesh counts") {
  const Polygon sq = make_rectangle(1, 1);
  const Mesh m1 = triangulate(sq, 1.0);
  CHECK(m1.num_triangles() == 4);
  check_mesh(m1);
  const Mesh m2 = triangulate(sq, 0.5);
  CHECK(m2.num_triangles() == 16);
  check_mesh(m2);
  const Mesh m3 = triangulate(equilateral(), 0.26);
  CHECK(m3.num_triangles() == 48);
  check_mesh(m3);
}

TEST_CASE("refine") {
  const Mesh m = triangulate(make_rectangle(1, 1), 1.0);
  const Mesh r = refine(m);
  CHECK(r.num_triangles() == 16);
  CHECK(r.boundary_edges().size() == 2 * m.boundary_edges().size());
  CHECK(r.h() == doctest::Approx(m.h() / 2));
  const Mesh rr = refine(r);
  CHECK(rr.h() == doctest::Approx(m.h() / 4));
  check_mesh(rr);
}

TEST_CASE("non-convex input rejected") {
  const Polygon l({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  try {
    triangulate(l, 0.5);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonConvexInput);
  }
  CHECK_THROWS_AS(triangulate_lattice(l, 0.5), Error);
}

TEST_CASE("meshing is deterministic") {
  const Polygon p = make_triangle({-0.3, 0}, {1.1, 0}, {0.2, 0.8});
  const Mesh a = triangulate(p, 0.05), b = triangulate(p, 0.05);
  CHECK(a.vertices() == b.vertices());
  CHECK(a.triangles() == b.triangles());
  const Polygon d = make_regular_polygon(64, 1.0);
  const Mesh c = triangulate_lattice(d, 0.1), e = triangulate_lattice(d, 0.1);
  CHECK(c.vertices() == e.vertices());
  CHECK(c.triangles() == e.triangles());
}

TEST_CASE("lattice mesh of a many-sided polygon") {
  const Polygon d = make_regular_polygon(256, 1.0);
  const Mesh m = triangulate_lattice(d, 0.04);
  check_mesh(m);
  CHECK(m.h() <= 0.04 * 1.6);
  CHECK(m.min_angle_deg() > 20.0);
  CHECK(m.num_triangles() < 20000);
}

TEST_CASE("lattice mesh of an elongated polygon") {
  std::vector<Vec2> pts;
  for (int k = 0; k < 128; ++k) {
    const double th = 2 * std::numbers::pi * k / 128;
    pts.push_back({2 * std::cos(th), 0.5 * std::sin(th)});
  }
  const Mesh m = triangulate_lattice(Polygon(pts), 0.05);
  check_mesh(m);
  CHECK(m.min_angle_deg() > 15.0);
}

TEST_CASE("mesh_polygon strategy") {
  MeshOptions plain;
  plain.corner_passes = 0;
  CHECK(mesh_polygon(make_rectangle(1, 1), 0.5, plain).num_triangles() == 16);
  const Mesh g = mesh_polygon(make_rectangle(1, 1), 0.5);
  check_mesh(g);
  CHECK(g.num_triangles() > 16);
  CHECK(uses_fan(make_rectangle(1, 1)));
  CHECK(!uses_fan(make_regular_polygon(32, 1.0)));
  const Mesh b = mesh_polygon(make_regular_polygon(32, 1.0), 0.2);
  check_mesh(b);
  CHECK(b.num_vertices() > 32);
}

TEST_CASE("corner grading") {
  const Polygon p = make_triangle({-0.4, 0}, {1.2, 0}, {0, 0.5});
  const Mesh base = triangulate(p, 0.1);
  const Mesh g = refine_corners(base, 3, 0.2);
  check_mesh(g);
  CHECK(g.num_triangles() > base.num_triangles());
  CHECK(g.min_angle_deg() > 0.4 * base.min_angle_deg());
  // the shortest boundary edge sits at a corner and is 8 times smaller
  double shortest = 1e9, base_shortest = 1e9;
  for (const auto& e : g.boundary_edges()) shortest = std::min(shortest, distance(g.vertices()[e.v0], g.vertices()[e.v1]));
  for (const auto& e : base.boundary_edges())
    base_shortest = std::min(base_shortest, distance(base.vertices()[e.v0], base.vertices()[e.v1]));
  CHECK(shortest == doctest::Approx(base_shortest / 8));
}

TEST_CASE("corner grading keeps symmetric meshes symmetric") {
  const Polygon sq = translate(make_rectangle(1, 1), {-0.5, -0.5});
  const Mesh g = mesh_polygon(sq, 0.1);
  // every vertex has a mirror image and a rotated image
  auto has = [&](Vec2 x) {
    for (const Vec2& y : g.vertices())
      if (distance(x, y) < 1e-12) return true;
    return false;
  };
  int missing = 0;
  for (const Vec2& x : g.vertices()) missing += !has({-x.x, x.y}) + !has({x.y, x.x}) + !has({-x.y, x.x});
  CHECK(missing == 0);
}

TEST_CASE("map_mesh transports a mesh with its domain") {
  const Polygon p = make_triangle({-0.4, 0}, {1.2, 0}, {0, 0.5});
  const AffineFlow f = AffineFlow::height_stretch();
  const Mesh a = mesh_polygon(p, 0.2);
  const Polygon q = apply_flow(f, 0.7, p);
  const Mesh b = map_mesh(a, f.map_matrix(0.7), f.map_offset(0.7), q);
  check_mesh(b);
  CHECK(b.triangles() == a.triangles());
  CHECK(b.boundary_edges().size() == a.boundary_edges().size());
  CHECK_THROWS_AS(map_mesh(a, Mat2{-1, 0, 0, 1}, {}, q), Error);
}

TEST_CASE("fan_levels") {
  CHECK(fan_levels(make_rectangle(1, 1), 1.0) == 0);
  CHECK(fan_levels(make_rectangle(1, 1), 0.5) == 1);
  CHECK(triangulate_levels(make_rectangle(1, 1), 2).num_triangles() == 64);
}

TEST_CASE("needle triangles report a small minimum angle") {
  const Mesh m = triangulate(make_triangle({-1, 0}, {1, 0}, {0, 0.02}), 0.5);
  CHECK(m.min_angle_deg() < kMinTrustedAngleDeg);
}
