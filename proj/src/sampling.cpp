#include "shapeflow/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shapeflow {

double uniform(Rng& rng, double lo, double hi) {
  // not std::uniform_real_distribution: its output is not specified across
  // standard libraries
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

TriangleConfig random_triangle(Rng& rng, TriangleHypothesis hyp, double min_angle) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Vec2 p{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const Vec2 q{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const Vec2 r{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    if (std::abs(cross(q - p, r - p)) < 0.1) continue;
    try {
      const TriangleConfig c = TriangleConfig::canonicalize(p, q, r, hyp);
      if (std::min({c.angle_a(), c.angle_b(), c.angle_c()}) < min_angle) continue;
      return c;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::HypothesisViolated) throw;
    }
  }
  throw Error(ErrorKind::HypothesisViolated, "no triangle found for the hypothesis");
}

Polygon random_convex_polygon(Rng& rng, int n) {
  if (n < 3) throw Error(ErrorKind::InvalidInput, "need at least 3 vertices");
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> gaps(n);
  double sum = 0.0;
  for (double& g : gaps) sum += (g = uniform(rng, 0.2, 1.8));
  std::vector<Vec2> pts(n);
  const double start = uniform(rng, 0.0, two_pi);
  const double sx = uniform(rng, 1.0, 2.0), rot = uniform(rng, 0.0, two_pi);
  const double c = std::cos(rot), s = std::sin(rot);
  double th = start;
  for (int k = 0; k < n; ++k) {
    const Vec2 u{sx * std::cos(th), std::sin(th)};
    pts[k] = {c * u.x - s * u.y, s * u.x + c * u.y};
    th += two_pi * gaps[k] / sum;
  }
  return Polygon(std::move(pts));
}

}  // namespace shapeflow
