#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "shapeflow/geometry.hpp"

using namespace shapeflow;
using std::numbers::pi;

namespace {

Polygon unit_square() { return make_rectangle(1.0, 1.0); }

bool same_vertices(const Polygon& a, const Polygon& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (distance(a.vertex(i), b.vertex(i)) > tol) return false;
  }
  return true;
}

std::vector<AffineFlow> all_flows() {
  return {AffineFlow::height_stretch(), AffineFlow::height_compress(), AffineFlow::leg_stretch(0.9),
          AffineFlow::rhombus_diagonal(), AffineFlow::rectangle_side(),
          AffineFlow::translate({0.3, -1.2}), AffineFlow::scale()};
}

}  // namespace

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}}), Error);
  // clockwise
  CHECK_THROWS_AS(Polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), Error);
  // bow tie
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), Error);
  // duplicate tags
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}, {0, 1}}, {"a", "a", "b"}), Error);
  try {
    Polygon({{0, 0}, {1, 0}, {2, 0}});
    FAIL("collinear polygon accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
  Polygon p({{0, 0}, {1, 0}, {0, 1}});
  CHECK(p.tag(0) == "e0");
  CHECK(p.edge_index("e2") == 2);
  CHECK_THROWS_AS(p.edge_index("zz"), Error);
}

TEST_CASE("area examples") {
  CHECK(area(unit_square()) == doctest::Approx(1.0));
  CHECK(area(Polygon({{0, 0}, {1, 0}, {0, 1}})) == doctest::Approx(0.5));
  const double a = 0.7, t = 0.4;
  CHECK(area(make_rhombus(a, 1.0 + t)) == doctest::Approx(2 * a * a * (1 + t)).epsilon(1e-14));
}

TEST_CASE("outer normals point away from the interior") {
  const Polygon p = make_triangle({0, 0}, {2, 0}, {0.5, 1.5});
  const Vec2 c = p.centroid();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 n = p.outer_normal(i);
    CHECK(norm(n) == doctest::Approx(1.0));
    CHECK(dot(n, p.edge_start(i) - c) > 0.0);
    CHECK(std::abs(dot(n, p.edge_end(i) - p.edge_start(i))) < 1e-14);
  }
}

TEST_CASE("apply_flow examples") {
  const Polygon sq = unit_square();
  for (const auto& f : all_flows()) {
    CHECK(same_vertices(apply_flow(f, 0.0, sq), sq, 1e-15));
  }
  const Polygon r = apply_flow(AffineFlow::height_stretch(), 1.0, sq);
  CHECK(same_vertices(r, make_rectangle(1.0, 2.0), 1e-15));
  CHECK(r.tags() == sq.tags());

  const double alpha = 1.1, t = 0.6;
  const auto cfg = TriangleConfig::isosceles(alpha);
  const Polygon tri = apply_flow(AffineFlow::leg_stretch(alpha), t, cfg.polygon());
  CHECK(distance(tri.vertex(1), {1 + t, 0}) < 1e-14);
  CHECK(distance(tri.vertex(2), cfg.c()) < 1e-14);
  CHECK(distance(tri.vertex(0), {0, 0}) < 1e-15);
}

TEST_CASE("apply_flow degenerate times") {
  const Polygon sq = unit_square();
  CHECK_THROWS_AS(apply_flow(AffineFlow::height_compress(), 1.0, sq), Error);
  CHECK_THROWS_AS(apply_flow(AffineFlow::height_stretch(), -1.0, sq), Error);
  try {
    apply_flow(AffineFlow::height_compress(), 1.0 - 1e-14, sq);
    FAIL("degenerate image accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateFlowTime);
  }
}

TEST_CASE("flow_velocity examples") {
  Vec2 v = flow_velocity(AffineFlow::height_stretch(), 0.0, {3, 2});
  CHECK(v.x == 0.0);
  CHECK(v.y == doctest::Approx(2.0));
  v = flow_velocity(AffineFlow::rectangle_side(), 1.0, {4, 7});
  CHECK(v.x == doctest::Approx(2.0));
  CHECK(v.y == 0.0);
  v = flow_velocity(AffineFlow::leg_stretch(pi / 2), 0.0, {0.3, 0.8});
  CHECK(v.x == doctest::Approx(0.3));
  CHECK(std::abs(v.y) < 1e-16);
}

TEST_CASE("flow maps integrate their velocity fields") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(-0.5, 0.5), ux(-2.0, 2.0);
  const double h = 1e-4;
  for (const auto& f : all_flows()) {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double t = ut(rng);
      const Vec2 x{ux(rng), ux(rng)};
      const Vec2 fd = (f.map(t + h, x) - f.map(t - h, x)) / (2 * h);
      worst = std::max(worst, distance(fd, f.velocity(t, f.map(t, x))));
    }
    CAPTURE(to_string(f.kind()));
    CHECK(worst <= 50.0 * h * h);
  }
}

TEST_CASE("height stretch scales area by 1+t") {
  const Polygon p = make_triangle({-0.3, 0}, {1.1, 0}, {0.2, 0.7});
  for (double t : {-0.5, 0.0, 0.3, 2.5}) {
    CHECK(area(apply_flow(AffineFlow::height_stretch(), t, p)) ==
          doctest::Approx((1 + t) * area(p)).epsilon(1e-14));
  }
}

TEST_CASE("normalize_area") {
  const Polygon s2 = normalize_area(unit_square(), 4.0);
  CHECK(same_vertices(s2, make_rectangle(2, 2), 1e-14));
  const Polygon r = normalize_area(make_rectangle(1, 2), 1.0);
  CHECK(same_vertices(r, make_rectangle(1 / std::sqrt(2.0), std::sqrt(2.0)), 1e-14));
  const Polygon p = make_triangle({0.1, 0.2}, {1.3, 0.1}, {0.4, 0.9});
  CHECK(same_vertices(normalize_area(p, area(p)), p, 1e-15));
  const Polygon q = normalize_area(p, 3.0);
  CHECK(area(q) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(same_vertices(normalize_area(q, 3.0), q, 1e-14));
}

TEST_CASE("flow_kind names round trip") {
  for (const auto& f : all_flows()) {
    const auto k = flow_kind_from_string(to_string(f.kind()));
    REQUIRE(k.has_value());
    CHECK(*k == f.kind());
  }
  CHECK(!flow_kind_from_string("nope").has_value());
}

TEST_CASE("critical_time examples") {
  const auto s = TriangleConfig::canonicalize({-0.4, 0}, {1.2, 0}, {0, 0.5},
                                              TriangleHypothesis::ShortestHeightStretch);
  CHECK(critical_time(s, CriticalKind::Stretch) == doctest::Approx(std::sqrt(4.48) - 1).epsilon(1e-13));

  const auto c = TriangleConfig::canonicalize({-0.8, 0}, {0.4, 0}, {0, 1.5},
                                              TriangleHypothesis::TallestHeightCompress);
  CHECK(critical_time(c, CriticalKind::Compress) ==
        doctest::Approx(1 - std::sqrt(1.28) / 1.5).epsilon(1e-13));

  try {
    TriangleConfig::canonicalize({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2},
                                 TriangleHypothesis::ShortestHeightStretch);
    FAIL("equilateral accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HypothesisViolated);
  }
  CHECK_THROWS_AS(critical_time(s, CriticalKind::Compress), Error);
}

TEST_CASE("critical times solve |BA| = |BC_t|") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  int checked = 0;
  for (int k = 0; k < 200 && checked < 50; ++k) {
    const Vec2 p{u(rng), u(rng)}, q{u(rng) + 1.0, u(rng)}, r{u(rng), u(rng) + 1.0};
    for (auto [hyp, kind] : {std::pair{TriangleHypothesis::ShortestHeightStretch, CriticalKind::Stretch},
                             std::pair{TriangleHypothesis::TallestHeightCompress, CriticalKind::Compress}}) {
      try {
        const auto cfg = TriangleConfig::canonicalize(p, q, r, hyp);
        const double t = critical_time(cfg, kind);
        const double sc = kind == CriticalKind::Stretch ? 1 + t : 1 - t;
        const double ba = distance(cfg.b(), cfg.a());
        const double bc = distance(cfg.b(), sc * cfg.c());
        CHECK(bc == doctest::Approx(ba).epsilon(1e-12));
        ++checked;
      } catch (const Error&) {
      }
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("canonical placements") {
  const auto s = TriangleConfig::canonicalize({3, 1}, {0.2, 4}, {-1, -2}, TriangleHypothesis::ShortestHeightStretch);
  CHECK(s.a().y == doctest::Approx(0.0));
  CHECK(s.b().y == doctest::Approx(0.0));
  CHECK(s.c().x == doctest::Approx(0.0));
  CHECK(s.c().y > 0);
  CHECK(s.a().x < 0);
  CHECK(s.b().x > 0);
  const double ab = distance(s.a(), s.b()), bc = distance(s.b(), s.c()), ac = distance(s.a(), s.c());
  CHECK(ab > bc);
  CHECK(bc >= ac);

  const auto c = TriangleConfig::canonicalize({0, 0}, {1, 0}, {0.45, 1.4}, TriangleHypothesis::TallestHeightCompress);
  const double ab2 = distance(c.a(), c.b()), bc2 = distance(c.b(), c.c()), ac2 = distance(c.a(), c.c());
  CHECK(ab2 < bc2);
  CHECK(bc2 <= ac2 * (1 + 1e-12));
  CHECK(!c.is_obtuse());
  CHECK_THROWS_AS(TriangleConfig::canonicalize({0, 0}, {1, 0}, {2.5, 0.5}, TriangleHypothesis::TallestHeightCompress),
                  Error);

  const auto l = TriangleConfig::canonicalize({5, 5}, {6, 5}, {5.5, 7}, TriangleHypothesis::LegStretch);
  CHECK(distance(l.a(), {0, 0}) < 1e-12);
  CHECK(l.b().y == doctest::Approx(0.0));
  CHECK(distance(l.a(), l.b()) == doctest::Approx(distance(l.a(), l.c())));
  CHECK_THROWS_AS(TriangleConfig::canonicalize({0, 0}, {1, 0}, {2, 0}, TriangleHypothesis::LegStretch), Error);
}

TEST_CASE("median_cot_theta examples") {
  CHECK(median_cot_theta(pi / 3, pi / 3) == doctest::Approx(std::sqrt(3.0)));
  CHECK(median_cot_theta(pi / 2, pi / 4) == doctest::Approx(1.0));
  CHECK(median_cot_theta(pi / 3, pi / 2) == doctest::Approx(2 / std::sqrt(3.0)));
}

TEST_CASE("median angle matches the geometry of the stretched triangle") {
  // theta is the angle at A between AB_t and the median to B_tC.
  for (double alpha : {0.4, 1.0, 1.9}) {
    for (double t : {0.0, 0.5, 1.7}) {
      const auto cfg = TriangleConfig::isosceles(alpha);
      const Polygon p = apply_flow(AffineFlow::leg_stretch(alpha), t, cfg.polygon());
      const Vec2 a = p.vertex(0), b = p.vertex(1), c = p.vertex(2);
      const double beta = interior_angle(b, a, c);
      const Vec2 mid = 0.5 * (b + c);
      const double theta = std::atan2(mid.y, mid.x);
      CHECK(1.0 / std::tan(theta) == doctest::Approx(median_cot_theta(alpha, beta)).epsilon(1e-12));
    }
  }
}
