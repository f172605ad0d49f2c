#pragma once

#include <random>

#include "shapeflow/geometry.hpp"

namespace shapeflow {

using Rng = std::mt19937_64;

/// Triangle satisfying `hyp`, drawn by rejection with every angle at least
/// `min_angle` (radians), in the placement canonicalize produces.
TriangleConfig random_triangle(Rng& rng, TriangleHypothesis hyp, double min_angle = 0.25);

/// Convex n-gon: sorted angles on the unit circle (gaps of at least a fifth
/// of the uniform gap), then a random stretch and rotation.
Polygon random_convex_polygon(Rng& rng, int n);

/// Uniform draw from [lo, hi).
double uniform(Rng& rng, double lo, double hi);

}  // namespace shapeflow
