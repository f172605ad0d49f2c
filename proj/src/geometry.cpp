#include "shapeflow/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>
#include <set>

namespace shapeflow {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DegenerateFlowTime: return "DegenerateFlowTime";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NonConvexInput: return "NonConvexInput";
    case ErrorKind::SolveFailure: return "SolveFailure";
    case ErrorKind::UnknownTag: return "UnknownTag";
    case ErrorKind::UnsupportedKind: return "UnsupportedKind";
    case ErrorKind::ConvexityLost: return "ConvexityLost";
    case ErrorKind::OriginEscaped: return "OriginEscaped";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

double signed_area(std::span<const Vec2> pts) {
  const std::size_t n = pts.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * s;
}

namespace {

// Proper or touching intersection of closed segments pq and rs.
bool segments_intersect(Vec2 p, Vec2 q, Vec2 r, Vec2 s) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
  auto on_segment = [](Vec2 a, Vec2 b, Vec2 c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
  };
  const double d1 = orient(r, s, p), d2 = orient(r, s, q);
  const double d3 = orient(p, q, r), d4 = orient(p, q, s);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(r, s, p)) return true;
  if (d2 == 0 && on_segment(r, s, q)) return true;
  if (d3 == 0 && on_segment(p, q, r)) return true;
  if (d4 == 0 && on_segment(p, q, s)) return true;
  return false;
}

}  // namespace

Polygon::Polygon(std::vector<Vec2> vertices, std::vector<std::string> tags)
    : vertices_(std::move(vertices)), tags_(std::move(tags)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw Error(ErrorKind::InvalidInput, "polygon needs at least 3 vertices");
  for (const Vec2& v : vertices_)
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw Error(ErrorKind::InvalidInput, "non-finite polygon vertex");
  if (tags_.empty()) {
    tags_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) tags_.push_back("e" + std::to_string(i));
  }
  if (tags_.size() != n) throw Error(ErrorKind::InvalidInput, "one tag per edge required");
  if (std::set<std::string>(tags_.begin(), tags_.end()).size() != n)
    throw Error(ErrorKind::InvalidInput, "edge tags must be unique");

  const double a = signed_area(vertices_);
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidInput, "polygon must be counterclockwise with positive area");
  if (a < kDegenerateArea) throw Error(ErrorKind::InvalidInput, "polygon area below degeneracy threshold");

  for (std::size_t i = 0; i < n; ++i) {
    if (vertices_[i] == vertices_[(i + 1) % n])
      throw Error(ErrorKind::InvalidInput, "repeated consecutive vertex");
  }
  // Non-adjacent edges must not meet.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(vertex(i), vertex(i + 1), vertex(j), vertex(j + 1)))
        throw Error(ErrorKind::InvalidInput, "polygon is not simple");
    }
  }
}

std::optional<std::size_t> Polygon::find_tag(std::string_view tag) const {
  for (std::size_t i = 0; i < tags_.size(); ++i)
    if (tags_[i] == tag) return i;
  return std::nullopt;
}

std::size_t Polygon::edge_index(std::string_view tag) const {
  if (auto i = find_tag(tag)) return *i;
  throw Error(ErrorKind::UnknownTag, "no edge tagged '" + std::string(tag) + "'");
}

Vec2 Polygon::outer_normal(std::size_t i) const {
  const Vec2 e = edge_end(i) - edge_start(i);
  const double len = norm(e);
  return {e.y / len, -e.x / len};
}

double Polygon::perimeter() const {
  double p = 0.0;
  for (std::size_t i = 0; i < size(); ++i) p += side_length(i);
  return p;
}

Vec2 Polygon::centroid() const {
  double a = 0.0;
  Vec2 c{};
  for (std::size_t i = 0; i < size(); ++i) {
    const Vec2 p = vertex(i), q = vertex(i + 1);
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

Vec2 Polygon::vertex_centroid() const {
  Vec2 c{};
  for (const Vec2& v : vertices_) c += v;
  return c / static_cast<double>(size());
}

double Polygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, distance(vertices_[i], vertices_[j]));
  return d;
}

bool Polygon::is_convex(double rel_tol) const {
  const double d = diameter();
  for (std::size_t i = 0; i < size(); ++i) {
    const Vec2 e0 = vertex(i + 1) - vertex(i);
    const Vec2 e1 = vertex(i + 2) - vertex(i + 1);
    if (cross(e0, e1) < -rel_tol * d * d) return false;
  }
  return true;
}

double area(const Polygon& p) { return signed_area(p.vertices()); }

namespace {

template <class Fn>
Polygon map_vertices(const Polygon& p, Fn&& fn) {
  std::vector<Vec2> v;
  v.reserve(p.size());
  for (const Vec2& x : p.vertices()) v.push_back(fn(x));
  return Polygon(std::move(v), p.tags());
}

}  // namespace

Polygon normalize_area(const Polygon& p, double target) {
  if (!(target > 0.0)) throw Error(ErrorKind::InvalidInput, "target area must be positive");
  const double s = std::sqrt(target / area(p));
  return map_vertices(p, [s](Vec2 x) { return s * x; });
}

Polygon translate(const Polygon& p, Vec2 offset) {
  return map_vertices(p, [offset](Vec2 x) { return x + offset; });
}

Polygon scale(const Polygon& p, double factor) {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidInput, "scale factor must be positive");
  return map_vertices(p, [factor](Vec2 x) { return factor * x; });
}

Polygon rotate(const Polygon& p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return map_vertices(p, [c, s](Vec2 x) { return Vec2{c * x.x - s * x.y, s * x.x + c * x.y}; });
}

Polygon make_rectangle(double width, double height) {
  return Polygon({{0, 0}, {width, 0}, {width, height}, {0, height}}, {"AB", "BC", "CD", "DA"});
}

Polygon make_rhombus(double half_diagonal, double ratio) {
  const double a = half_diagonal;
  return Polygon({{-a, 0}, {0, -a * ratio}, {a, 0}, {0, a * ratio}}, {"AB", "BC", "CD", "DA"});
}

Polygon make_regular_polygon(int n, double radius, Vec2 center) {
  std::vector<Vec2> v;
  v.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n;
    v.push_back(center + radius * Vec2{std::cos(th), std::sin(th)});
  }
  return Polygon(std::move(v));
}

Polygon make_triangle(Vec2 a, Vec2 b, Vec2 c) { return Polygon({a, b, c}, {"AB", "BC", "CA"}); }

// ---------------------------------------------------------------------------

std::string_view to_string(FlowKind kind) noexcept {
  switch (kind) {
    case FlowKind::HeightStretch: return "HeightStretch";
    case FlowKind::HeightCompress: return "HeightCompress";
    case FlowKind::LegStretch: return "LegStretch";
    case FlowKind::RhombusDiagonal: return "RhombusDiagonal";
    case FlowKind::RectangleSide: return "RectangleSide";
    case FlowKind::Translate: return "Translate";
    case FlowKind::Scale: return "Scale";
  }
  return "Unknown";
}

std::optional<FlowKind> flow_kind_from_string(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  const std::string key = lower(name);
  for (FlowKind k : {FlowKind::HeightStretch, FlowKind::HeightCompress, FlowKind::LegStretch,
                     FlowKind::RhombusDiagonal, FlowKind::RectangleSide, FlowKind::Translate,
                     FlowKind::Scale}) {
    if (lower(to_string(k)) == key) return k;
  }
  return std::nullopt;
}

AffineFlow AffineFlow::leg_stretch(double alpha) {
  if (!(alpha > 0.0 && alpha < std::numbers::pi))
    throw Error(ErrorKind::InvalidInput, "leg-stretch aperture must lie in (0, pi)");
  AffineFlow f(FlowKind::LegStretch);
  f.alpha_ = alpha;
  return f;
}

AffineFlow AffineFlow::translate(Vec2 direction) {
  AffineFlow f(FlowKind::Translate);
  f.direction_ = direction;
  return f;
}

bool AffineFlow::admissible(double t) const {
  if (!std::isfinite(t)) return false;
  switch (kind_) {
    case FlowKind::HeightCompress: return t < 1.0;
    case FlowKind::Translate:
    case FlowKind::Scale: return true;
    default: return t > -1.0;
  }
}

void AffineFlow::require_admissible(double t) const {
  if (!admissible(t))
    throw Error(ErrorKind::DegenerateFlowTime,
                std::string(to_string(kind_)) + " is not defined at t = " + std::to_string(t));
}

Mat2 AffineFlow::map_matrix(double t) const {
  switch (kind_) {
    case FlowKind::HeightStretch:
    case FlowKind::RhombusDiagonal: return {1, 0, 0, 1 + t};
    case FlowKind::HeightCompress: return {1, 0, 0, 1 - t};
    case FlowKind::LegStretch: return {1 + t, -t / std::tan(alpha_), 0, 1};
    case FlowKind::RectangleSide: return {1 + t, 0, 0, 1};
    case FlowKind::Translate: return {};
    case FlowKind::Scale: {
      const double s = std::exp(t);
      return {s, 0, 0, s};
    }
  }
  return {};
}

Vec2 AffineFlow::map_offset(double t) const {
  return kind_ == FlowKind::Translate ? t * direction_ : Vec2{};
}

Mat2 AffineFlow::velocity_matrix(double t) const {
  switch (kind_) {
    case FlowKind::HeightStretch:
    case FlowKind::RhombusDiagonal: return {0, 0, 0, 1 / (1 + t)};
    case FlowKind::HeightCompress: return {0, 0, 0, -1 / (1 - t)};
    case FlowKind::LegStretch: return {1 / (1 + t), -1 / (std::tan(alpha_) * (1 + t)), 0, 0};
    case FlowKind::RectangleSide: return {1 / (1 + t), 0, 0, 0};
    case FlowKind::Translate: return {0, 0, 0, 0};
    case FlowKind::Scale: return {1, 0, 0, 1};
  }
  return {};
}

Vec2 AffineFlow::velocity_offset(double /*t*/) const {
  return kind_ == FlowKind::Translate ? direction_ : Vec2{};
}

Polygon apply_flow(const AffineFlow& flow, double t, const Polygon& p) {
  flow.require_admissible(t);
  const Mat2 m = flow.map_matrix(t);
  if (!(m.det() > 0.0))
    throw Error(ErrorKind::DegenerateFlowTime, "flow map is not orientation preserving");
  std::vector<Vec2> v;
  v.reserve(p.size());
  const Vec2 c = flow.map_offset(t);
  for (const Vec2& x : p.vertices()) v.push_back(m * x + c);
  if (signed_area(v) < kDegenerateArea)
    throw Error(ErrorKind::DegenerateFlowTime, "flow image is degenerate");
  return Polygon(std::move(v), p.tags());
}

Vec2 flow_velocity(const AffineFlow& flow, double t, Vec2 x) {
  flow.require_admissible(t);
  return flow.velocity(t, x);
}

// ---------------------------------------------------------------------------

double interior_angle(Vec2 at, Vec2 p, Vec2 q) {
  const Vec2 u = p - at, v = q - at;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

TriangleConfig::TriangleConfig(Vec2 a, Vec2 b, Vec2 c, TriangleHypothesis hyp)
    : a_(a), b_(b), c_(c), hyp_(hyp) {}

double TriangleConfig::angle_a() const { return interior_angle(a_, b_, c_); }
double TriangleConfig::angle_b() const { return interior_angle(b_, c_, a_); }
double TriangleConfig::angle_c() const { return interior_angle(c_, a_, b_); }

bool TriangleConfig::is_obtuse() const {
  const double right = 0.5 * std::numbers::pi * (1 + 1e-12);
  return angle_a() > right || angle_b() > right || angle_c() > right;
}

Polygon TriangleConfig::polygon() const { return make_triangle(a_, b_, c_); }

namespace {

// Places side pq on the x-axis with the foot of the altitude from r at the
// origin, r on the positive y-axis; returns (p', q', r').
std::array<Vec2, 3> place_on_axis(Vec2 p, Vec2 q, Vec2 r) {
  const double len = distance(p, q);
  const Vec2 e = (q - p) / len;
  const double s = dot(r - p, e);  // foot parameter from p
  const double height = std::abs(cross(e, r - p));
  return {Vec2{-s, 0.0}, Vec2{len - s, 0.0}, Vec2{0.0, height}};
}

}  // namespace

TriangleConfig TriangleConfig::canonicalize(Vec2 p, Vec2 q, Vec2 r, TriangleHypothesis hyp) {
  const std::array<Vec2, 3> v{p, q, r};
  if (std::abs(cross(q - p, r - p)) < 2 * kDegenerateArea)
    throw Error(ErrorKind::HypothesisViolated, "collinear vertices");
  // side k is opposite vertex k
  std::array<double, 3> side{distance(q, r), distance(r, p), distance(p, q)};
  constexpr double rel = 1e-12;

  switch (hyp) {
    case TriangleHypothesis::ShortestHeightStretch: {
      const int k = static_cast<int>(std::max_element(side.begin(), side.end()) - side.begin());
      const int i = (k + 1) % 3, j = (k + 2) % 3;  // endpoints of the longest side
      if (!(side[k] > std::max(side[i], side[j]) * (1 + rel)))
        throw Error(ErrorKind::HypothesisViolated, "longest side is not unique");
      // B is the endpoint farther from C: |BC| >= |AC|.
      const int ib = side[i] >= side[j] ? j : i;  // |v[j]-C| = side[i]
      const int ia = ib == i ? j : i;
      auto [a, b, c] = place_on_axis(v[ia], v[ib], v[k]);
      return TriangleConfig(a, b, c, hyp);
    }
    case TriangleHypothesis::TallestHeightCompress: {
      const int k = static_cast<int>(std::min_element(side.begin(), side.end()) - side.begin());
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      if (!(side[k] * (1 + rel) < std::min(side[i], side[j])))
        throw Error(ErrorKind::HypothesisViolated, "shortest side is not unique");
      // B is the endpoint closer to C: |BC| <= |AC|.
      const int ib = side[i] <= side[j] ? j : i;
      const int ia = ib == i ? j : i;
      auto [a, b, c] = place_on_axis(v[ia], v[ib], v[k]);
      TriangleConfig cfg(a, b, c, hyp);
      if (cfg.is_obtuse()) throw Error(ErrorKind::HypothesisViolated, "triangle is obtuse");
      return cfg;
    }
    case TriangleHypothesis::LegStretch: {
      // apex: vertex whose two adjacent sides are equal
      for (int k = 0; k < 3; ++k) {
        const double l1 = side[(k + 1) % 3], l2 = side[(k + 2) % 3];
        if (std::abs(l1 - l2) <= 1e-9 * std::max(l1, l2)) {
          const double alpha = interior_angle(v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
          return isosceles(alpha, 0.5 * (l1 + l2));
        }
      }
      throw Error(ErrorKind::HypothesisViolated, "triangle has no two equal legs");
    }
  }
  throw Error(ErrorKind::InvalidInput, "unknown hypothesis");
}

TriangleConfig TriangleConfig::isosceles(double alpha, double leg) {
  if (!(alpha > 0.0 && alpha < std::numbers::pi) || !(leg > 0.0))
    throw Error(ErrorKind::HypothesisViolated, "isosceles aperture must lie in (0, pi)");
  return TriangleConfig({0, 0}, {leg, 0}, {leg * std::cos(alpha), leg * std::sin(alpha)},
                        TriangleHypothesis::LegStretch);
}

double critical_time(const TriangleConfig& cfg, CriticalKind kind) {
  const double a = -cfg.a().x, b = cfg.b().x, c = cfg.c().y;
  const double ab2 = (a + b) * (a + b);
  if (kind == CriticalKind::Stretch) {
    if (cfg.hypothesis() != TriangleHypothesis::ShortestHeightStretch)
      throw Error(ErrorKind::HypothesisViolated, "stretch critical time needs the longest-side placement");
    // (1+t)^2 c^2 + b^2 = (a+b)^2
    const double t = std::sqrt(ab2 - b * b) / c - 1.0;
    if (!(t > 0.0)) throw Error(ErrorKind::HypothesisViolated, "|AB| must exceed |BC|");
    return t;
  }
  if (cfg.hypothesis() != TriangleHypothesis::TallestHeightCompress)
    throw Error(ErrorKind::HypothesisViolated, "compress critical time needs the shortest-side placement");
  // b^2 + (1-t)^2 c^2 = (a+b)^2
  const double t = 1.0 - std::sqrt(ab2 - b * b) / c;
  if (!(t > 0.0)) throw Error(ErrorKind::HypothesisViolated, "|AB| must be below |BC|");
  return t;
}

double median_cot_theta(double alpha, double beta) {
  return 2.0 / std::tan(alpha) + 1.0 / std::tan(beta);
}

}  // namespace shapeflow
