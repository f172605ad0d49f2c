#include "shapeflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>
#include <utility>

namespace shapeflow {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (std::uint64_t{lo} << 32) | hi;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double s = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
  return distance(p, a + s * d);
}

void require_convex(const Polygon& p) {
  if (!p.is_convex()) throw Error(ErrorKind::NonConvexInput, "mesher accepts convex polygons only");
}

}  // namespace

Mesh::Mesh(Polygon domain, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles)
    : domain_(std::move(domain)), vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  // Edge adjacency: boundary edges are those used by a single triangle.
  std::unordered_map<std::uint64_t, int> uses;
  uses.reserve(3 * triangles_.size());
  double min_angle = std::numbers::pi;
  for (const auto& t : triangles_) {
    const Vec2 a = vertices_[t[0]], b = vertices_[t[1]], c = vertices_[t[2]];
    if (!(cross(b - a, c - a) > 0.0)) throw Error(ErrorKind::InvalidInput, "mesh triangle is not counterclockwise");
    for (int k = 0; k < 3; ++k) {
      ++uses[edge_key(t[k], t[(k + 1) % 3])];
      const Vec2 p = vertices_[t[k]], q = vertices_[t[(k + 1) % 3]], r = vertices_[t[(k + 2) % 3]];
      h_ = std::max(h_, distance(p, q));
      min_angle = std::min(min_angle, interior_angle(p, q, r));
    }
  }
  min_angle_deg_ = min_angle * 180.0 / std::numbers::pi;

  const double tol = 1e-9 * domain_.diameter();
  for (std::size_t ti = 0; ti < triangles_.size(); ++ti) {
    const auto& t = triangles_[ti];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      const int n = uses[edge_key(a, b)];
      if (n > 2) throw Error(ErrorKind::InvalidInput, "non-manifold mesh edge");
      if (n != 1) continue;
      const Vec2 mid = 0.5 * (vertices_[a] + vertices_[b]);
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < domain_.size(); ++s) {
        const double d = point_segment_distance(mid, domain_.edge_start(s), domain_.edge_end(s));
        if (d < best_d) best_d = d, best = static_cast<int>(s);
      }
      if (best_d > tol) throw Error(ErrorKind::InvalidInput, "boundary edge does not lie on the polygon");
      boundary_.push_back({a, b, best, static_cast<int>(ti)});
    }
  }
  // Order boundary edges by side, then along the side.
  std::sort(boundary_.begin(), boundary_.end(), [this](const BoundaryEdge& x, const BoundaryEdge& y) {
    if (x.side != y.side) return x.side < y.side;
    const Vec2 o = domain_.edge_start(x.side);
    return distance(vertices_[x.v0], o) < distance(vertices_[y.v0], o);
  });
}

double Mesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  return 0.5 * cross(vertices_[tri[1]] - vertices_[tri[0]], vertices_[tri[2]] - vertices_[tri[0]]);
}

Mesh refine(const Mesh& m) {
  std::vector<Vec2> verts = m.vertices();
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(3 * m.num_triangles());
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[a] + verts[b]));
    midpoint.emplace(key, idx);
    return idx;
  };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * m.num_triangles());
  for (const auto& t : m.triangles()) {
    const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    tris.push_back({t[0], ab, ca});
    tris.push_back({ab, t[1], bc});
    tris.push_back({ca, bc, t[2]});
    tris.push_back({ab, bc, ca});
  }
  return Mesh(m.domain(), std::move(verts), std::move(tris));
}

namespace {

// Largest fan hat-function value over the polygon corners: 1 at a corner, 0
// at the fan centre and at every other corner, linear on each fan sector.
// Affine maps commute with it.
double corner_closeness(const Polygon& poly, Vec2 c, Vec2 x) {
  double best = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly.vertex(i), b = poly.vertex(i + 1);
    const double det = cross(a - c, b - c);
    const double la = cross(x - c, b - c) / det;
    const double lb = cross(a - c, x - c) / det;
    if (la < -1e-12 || lb < -1e-12 || la + lb > 1 + 1e-12) continue;
    best = std::max({best, la, lb});
  }
  return best;
}

}  // namespace

namespace {

// Index k of the longest edge (v[k], v[k+1]); near-ties go to the edge whose
// midpoint is farthest from `center`, which keeps symmetric meshes symmetric.
int reference_edge(const std::vector<Vec2>& x, const std::array<int, 3>& v, Vec2 center) {
  int best = 0;
  double best_len = -1.0, best_far = -1.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2 a = x[v[k]], b = x[v[(k + 1) % 3]];
    const double len = distance(a, b);
    const double far = distance(0.5 * (a + b), center);
    const double tol = 1e-9 * std::max(len, best_len);
    if (len > best_len + tol || (std::abs(len - best_len) <= tol && far > best_far + tol)) {
      best = k;
      best_len = len;
      best_far = far;
    }
  }
  return best;
}

}  // namespace

Mesh refine_corners(const Mesh& m, int passes, double radius) {
  Mesh cur = m;
  const Polygon& poly = m.domain();
  const Vec2 center = poly.vertex_centroid();
  for (int pass = 0; pass < passes; ++pass) {
    const auto& verts = cur.vertices();
    const auto& tris = cur.triangles();
    const double cut = std::min(1.0 - radius * std::ldexp(1.0, -pass), 1.0 - 1e-12);
    std::vector<double> close(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i) close[i] = corner_closeness(poly, center, verts[i]);

    std::unordered_map<std::uint64_t, int> split;
    auto edge = [&](std::size_t t, int k) { return edge_key(tris[t][k], tris[t][(k + 1) % 3]); };
    for (std::size_t t = 0; t < tris.size(); ++t) {
      bool near = false;
      for (int k = 0; k < 3; ++k) near = near || close[tris[t][k]] >= cut;
      if (near) {
        for (int k = 0; k < 3; ++k) split.try_emplace(edge(t, k), -1);
      }
    }
    // Conformity closure: a triangle with any split edge also splits its
    // reference edge.
    std::vector<int> ref(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t) ref[t] = reference_edge(verts, tris[t], center);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t t = 0; t < tris.size(); ++t) {
        if (split.count(edge(t, ref[t]))) continue;
        for (int k = 0; k < 3; ++k) {
          if (split.count(edge(t, k))) {
            split.emplace(edge(t, ref[t]), -1);
            changed = true;
            break;
          }
        }
      }
    }

    std::vector<Vec2> nv = verts;
    auto mid = [&](int a, int b) {
      int& idx = split.at(edge_key(a, b));
      if (idx < 0) {
        idx = static_cast<int>(nv.size());
        nv.push_back(0.5 * (nv[a] + nv[b]));
      }
      return idx;
    };
    auto is_split = [&](int a, int b) { return split.count(edge_key(a, b)) > 0; };
    std::vector<std::array<int, 3>> nt;
    nt.reserve(tris.size() + 4 * split.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const int k = ref[t];
      const int a = tris[t][k], b = tris[t][(k + 1) % 3], c = tris[t][(k + 2) % 3];
      if (!is_split(a, b)) {
        nt.push_back(tris[t]);
        continue;
      }
      // Bisect the reference edge, then each child across its split edge.
      const int mm = mid(a, b);
      if (is_split(c, a)) {
        const int p = mid(c, a);
        nt.push_back({a, mm, p});
        nt.push_back({p, mm, c});
      } else {
        nt.push_back({a, mm, c});
      }
      if (is_split(b, c)) {
        const int q = mid(b, c);
        nt.push_back({mm, b, q});
        nt.push_back({mm, q, c});
      } else {
        nt.push_back({mm, b, c});
      }
    }
    cur = Mesh(poly, std::move(nv), std::move(nt));
  }
  return cur;
}

Mesh triangulate_levels(const Polygon& p, int levels) {
  require_convex(p);
  std::vector<Vec2> verts = p.vertices();
  const int c = static_cast<int>(verts.size());
  verts.push_back(p.vertex_centroid());
  std::vector<std::array<int, 3>> tris;
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) tris.push_back({c, i, (i + 1) % n});
  Mesh m(p, std::move(verts), std::move(tris));
  for (int l = 0; l < levels; ++l) m = refine(m);
  return m;
}

int fan_levels(const Polygon& p, double target_h) {
  if (!(target_h > 0.0)) throw Error(ErrorKind::InvalidInput, "target_h must be positive");
  require_convex(p);
  // Uniform refinement halves every edge, so the fan's longest edge decides.
  const Vec2 c = p.vertex_centroid();
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) h = std::max({h, p.side_length(i), distance(c, p.vertex(i))});
  int levels = 0;
  while (h > target_h * (1 + 1e-12)) {
    h *= 0.5;
    ++levels;
  }
  return levels;
}

Mesh triangulate(const Polygon& p, double target_h) { return triangulate_levels(p, fan_levels(p, target_h)); }

// ---------------------------------------------------------------------------
// Lattice + constrained Delaunay mesher

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

// > 0 when d lies inside the circumcircle of the counterclockwise triangle abc.
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

// Triangulation with neighbour links; n[i] is the triangle across the edge
// opposite v[i], -1 on the boundary. Boundary edges are never flipped.
class Cdt {
 public:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;
  };

  Cdt(std::vector<Vec2> pts, double scale) : pts_(std::move(pts)), scale_(scale) {}

  void fan(int center, int m) {
    for (int j = 0; j < m; ++j)
      tris_.push_back({{center, j, (j + 1) % m}, {-1, (j + 1) % m, (j + m - 1) % m}});
  }

  void make_delaunay() {
    std::vector<std::pair<int, int>> stack;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      for (int i = 0; i < 3; ++i) stack.emplace_back(t, i);
    legalize(stack);
  }

  int add_point(Vec2 p) {
    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    const int t = locate(p);
    const Tri& tri = tris_[t];
    const double eps = 1e-12 * scale_ * scale_;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(orient(pts_[tri.v[(i + 1) % 3]], pts_[tri.v[(i + 2) % 3]], p)) <= eps) {
        split_edge(t, i, id);
        return id;
      }
    }
    split_triangle(t, id);
    return id;
  }

  const std::vector<Vec2>& points() const { return pts_; }

  std::vector<std::array<int, 3>> triangles() const {
    std::vector<std::array<int, 3>> out;
    out.reserve(tris_.size());
    for (const Tri& t : tris_) out.push_back(t.v);
    return out;
  }

 private:
  int slot_of(int t, int nb) const {
    for (int i = 0; i < 3; ++i)
      if (tris_[t].n[i] == nb) return i;
    return -1;
  }

  void relink(int t, int from, int to) {
    if (t < 0) return;
    tris_[t].n[slot_of(t, from)] = to;
  }

  int locate(Vec2 p) {
    const double eps = 1e-12 * scale_ * scale_;
    int t = last_;
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        if (orient(pts_[tri.v[(i + 1) % 3]], pts_[tri.v[(i + 2) % 3]], p) < -eps) {
          next = tri.n[i];
          break;
        }
      }
      if (next == -1) {
        last_ = t;
        return t;
      }
      t = next;
    }
    for (int s = 0; s < static_cast<int>(tris_.size()); ++s) {
      const Tri& tri = tris_[s];
      if (orient(pts_[tri.v[0]], pts_[tri.v[1]], p) >= -eps && orient(pts_[tri.v[1]], pts_[tri.v[2]], p) >= -eps &&
          orient(pts_[tri.v[2]], pts_[tri.v[0]], p) >= -eps)
        return last_ = s;
    }
    throw Error(ErrorKind::InvalidInput, "lattice point outside the triangulated domain");
  }

  void split_triangle(int t, int p) {
    const Tri old = tris_[t];
    const int a = old.v[0], b = old.v[1], c = old.v[2];
    const int t1 = static_cast<int>(tris_.size()), t2 = t1 + 1;
    tris_[t] = {{p, b, c}, {old.n[0], t1, t2}};
    tris_.push_back({{p, c, a}, {old.n[1], t2, t}});
    tris_.push_back({{p, a, b}, {old.n[2], t, t1}});
    relink(old.n[1], t, t1);
    relink(old.n[2], t, t2);
    last_ = t;
    std::vector<std::pair<int, int>> stack{{t, 0}, {t1, 0}, {t2, 0}};
    legalize(stack);
  }

  void split_edge(int t, int i, int p) {
    const Tri tt = tris_[t];
    const int u = tt.n[i];
    if (u < 0) throw Error(ErrorKind::InvalidInput, "lattice point on the polygon boundary");
    const int a = tt.v[i], q = tt.v[(i + 1) % 3], r = tt.v[(i + 2) % 3];
    const int A = tt.n[(i + 1) % 3], B = tt.n[(i + 2) % 3];
    const Tri uu = tris_[u];
    const int j = slot_of(u, t);
    const int s = uu.v[j];
    const int C = uu.n[(j + 1) % 3], D = uu.n[(j + 2) % 3];
    const int tb = static_cast<int>(tris_.size()), ub = tb + 1;
    tris_[t] = {{a, q, p}, {ub, tb, B}};
    tris_.push_back({{a, p, r}, {u, A, t}});
    tris_[u] = {{s, r, p}, {tb, ub, D}};
    tris_.push_back({{s, p, q}, {t, C, u}});
    relink(A, t, tb);
    relink(C, u, ub);
    last_ = t;
    std::vector<std::pair<int, int>> stack{{t, 2}, {tb, 1}, {u, 2}, {ub, 1}};
    legalize(stack);
  }

  void legalize(std::vector<std::pair<int, int>>& stack) {
    const double eps = 1e-12 * scale_ * scale_ * scale_ * scale_;
    while (!stack.empty()) {
      auto [t, i] = stack.back();
      stack.pop_back();
      const int u = tris_[t].n[i];
      if (u < 0) continue;
      const int p = tris_[t].v[i], q = tris_[t].v[(i + 1) % 3], r = tris_[t].v[(i + 2) % 3];
      const int j = slot_of(u, t);
      const int s = tris_[u].v[j];
      if (!(incircle(pts_[p], pts_[q], pts_[r], pts_[s]) > eps)) continue;
      if (!(orient(pts_[p], pts_[q], pts_[s]) > 0 && orient(pts_[p], pts_[s], pts_[r]) > 0)) continue;
      const int A = tris_[t].n[(i + 1) % 3], B = tris_[t].n[(i + 2) % 3];
      const int C = tris_[u].n[(j + 1) % 3], D = tris_[u].n[(j + 2) % 3];
      tris_[t] = {{p, q, s}, {C, u, B}};
      tris_[u] = {{p, s, r}, {D, A, t}};
      relink(C, u, t);
      relink(A, t, u);
      stack.emplace_back(t, 0);
      stack.emplace_back(t, 2);
      stack.emplace_back(u, 0);
      stack.emplace_back(u, 1);
    }
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  double scale_;
  int last_ = 0;
};

// Orientation of the principal axis of the area second moment, zero when the
// moment tensor is isotropic.
double principal_axis_angle(const Polygon& p, Vec2 c) {
  double ixx = 0, iyy = 0, ixy = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 a = p.vertex(i) - c, b = p.vertex(i + 1) - c;
    const double w = cross(a, b);
    ixx += w * (a.y * a.y + a.y * b.y + b.y * b.y);
    iyy += w * (a.x * a.x + a.x * b.x + b.x * b.x);
    ixy += w * (a.x * b.y + 2 * a.x * a.y + 2 * b.x * b.y + b.x * a.y);
  }
  // ixx here integrates y^2, iyy integrates x^2 (common factors dropped).
  const double sxx = iyy, syy = ixx, sxy = 0.5 * ixy;
  const double tr = std::abs(sxx) + std::abs(syy);
  if (std::abs(sxx - syy) <= 1e-9 * tr && std::abs(sxy) <= 1e-9 * tr) return 0.0;
  return 0.5 * std::atan2(2 * sxy, sxx - syy);
}

}  // namespace

Mesh triangulate_lattice(const Polygon& p, double target_h) {
  if (!(target_h > 0.0)) throw Error(ErrorKind::InvalidInput, "target_h must be positive");
  require_convex(p);
  const double h = target_h;

  std::vector<Vec2> pts;
  for (std::size_t s = 0; s < p.size(); ++s) {
    const Vec2 a = p.edge_start(s), b = p.edge_end(s);
    const int k = std::max(1, static_cast<int>(std::ceil(distance(a, b) / h * (1 - 1e-12))));
    for (int j = 0; j < k; ++j) pts.push_back(a + (static_cast<double>(j) / k) * (b - a));
  }
  const int m = static_cast<int>(pts.size());
  const Vec2 c = p.centroid();
  pts.push_back(c);

  const double diam = p.diameter();
  Cdt cdt(std::move(pts), diam);
  cdt.fan(m, m);
  cdt.make_delaunay();

  const double phi = principal_axis_angle(p, c);
  const Vec2 e1{std::cos(phi), std::sin(phi)};
  const Vec2 e2 = perp(e1);
  const Vec2 u = h * e1;
  const Vec2 v = h * (0.5 * e1 + 0.5 * std::sqrt(3.0) * e2);
  const int range = static_cast<int>(std::ceil(2.0 * diam / h)) + 2;
  auto inset = [&](Vec2 x) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < p.size(); ++s) d = std::min(d, dot(p.edge_start(s) - x, p.outer_normal(s)));
    return d;
  };

  // A row of points one equilateral height inside the boundary, so that the
  // elements carrying the boundary traces are well shaped.
  const double depth = 0.5 * std::sqrt(3.0) * h;
  std::vector<Vec2> layer;
  {
    const double perim = p.perimeter();
    const int n = std::max(3, static_cast<int>(std::lround(perim / h)));
    std::size_t side = 0;
    double side_start = 0.0;
    for (int j = 0; j < n; ++j) {
      const double s = perim * (j + 0.5) / n;
      while (side + 1 < p.size() && s > side_start + p.side_length(side)) side_start += p.side_length(side++);
      const double f = (s - side_start) / p.side_length(side);
      const Vec2 x = p.edge_start(side) + f * (p.edge_end(side) - p.edge_start(side)) - depth * p.outer_normal(side);
      if (inset(x) < 0.8 * depth) continue;
      if (!layer.empty() && distance(layer.back(), x) < 0.6 * h) continue;
      if (layer.size() > 1 && distance(layer.front(), x) < 0.6 * h) continue;
      layer.push_back(x);
    }
  }
  for (const Vec2& x : layer) cdt.add_point(x);
  const double clearance = layer.empty() ? 0.55 * h : depth + 0.45 * h;
  // each lattice row meets the polygon shrunk by `clearance` in an interval
  for (int j = -range; j <= range; ++j) {
    const Vec2 row = c + static_cast<double>(j) * v;
    double lo = -range, hi = range;
    for (std::size_t s = 0; s < p.size(); ++s) {
      const Vec2 n = p.outer_normal(s);
      const double rhs = dot(p.edge_start(s) - row, n) - clearance;
      const double du = dot(u, n);
      if (std::abs(du) < 1e-14 * h) {
        if (rhs < 0.0) hi = lo - 1;
      } else if (du > 0.0) {
        hi = std::min(hi, rhs / du);
      } else {
        lo = std::max(lo, rhs / du);
      }
    }
    for (int i = static_cast<int>(std::ceil(lo)); i <= static_cast<int>(std::floor(hi)); ++i) {
      if (i == 0 && j == 0) continue;
      cdt.add_point(row + static_cast<double>(i) * u);
    }
  }
  return Mesh(p, cdt.points(), cdt.triangles());
}

Mesh map_mesh(const Mesh& m, Mat2 a, Vec2 b, const Polygon& image) {
  if (!(a.det() > 0.0)) throw Error(ErrorKind::InvalidInput, "map must preserve orientation");
  std::vector<Vec2> verts;
  verts.reserve(m.num_vertices());
  for (const Vec2& x : m.vertices()) verts.push_back(a * x + b);
  return Mesh(image, std::move(verts), m.triangles());
}

bool uses_fan(const Polygon& p, const MeshOptions& opts) {
  switch (opts.strategy) {
    case MeshStrategy::Fan: return true;
    case MeshStrategy::Lattice: return false;
    case MeshStrategy::Auto: break;
  }
  return p.size() <= kFanMaxVertices;
}

Mesh mesh_polygon(const Polygon& p, double target_h, const MeshOptions& opts) {
  if (!uses_fan(p, opts)) return triangulate_lattice(p, target_h);
  const int levels = opts.levels >= 0 ? opts.levels : fan_levels(p, target_h);
  return refine_corners(triangulate_levels(p, levels), opts.corner_passes, opts.corner_radius);
}

}  // namespace shapeflow
