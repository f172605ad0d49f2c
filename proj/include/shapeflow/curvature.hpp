#pragma once

#include <string>
#include <vector>

#include "shapeflow/fem.hpp"

namespace shapeflow {

inline constexpr int kDefaultBodyNodes = 256;

/// d^order/dtheta^order of periodic samples on a uniform grid, by FFT.
std::vector<double> spectral_derivative(const std::vector<double>& f, int order);

/// Strictly convex body given by its support function h(theta_k) about the
/// origin, theta_k = 2 pi k / N with N a power of two. The boundary point
/// with outer normal g(theta) = (cos, sin) is x = h g + h' g^perp.
class SupportBody {
 public:
  /// Throws `InvalidInput` for a bad grid, `OriginEscaped` if some h <= 0 and
  /// `ConvexityLost` if rho <= 1e-6 mean(h) somewhere.
  explicit SupportBody(std::vector<double> h);

  static SupportBody circle(double radius, Vec2 center = {}, int n = kDefaultBodyNodes);
  /// Semi-axes a, b rotated by `rotation` and centred at `center`.
  static SupportBody ellipse(double a, double b, double rotation = 0.0, Vec2 center = {},
                             int n = kDefaultBodyNodes);
  /// h_k = x_k . g(theta_k) for boundary points sampled at the grid normals.
  static SupportBody from_points(const std::vector<Vec2>& x);

  int size() const { return static_cast<int>(h_.size()); }
  const std::vector<double>& h() const { return h_; }
  double theta(int k) const;
  double rho_floor() const;

  std::vector<double> rho() const;
  double rho_min() const;
  std::vector<Vec2> points() const;
  double area() const;
  double perimeter() const;
  Vec2 centroid() const;
  /// The same body with the origin moved to `c`.
  SupportBody recentered(Vec2 c) const;

 private:
  std::vector<double> h_;
};

std::vector<double> rho(const SupportBody& b);
double body_area(const SupportBody& b);
double body_perimeter(const SupportBody& b);

/// Polygon through the boundary points at m equally spaced normals
/// (m = 0 uses the body grid; other m by trigonometric interpolation).
Polygon to_polygon(const SupportBody& b, int m = 0);

/// One explicit midpoint step of h_t = -1/rho (curve shortening).
SupportBody csf_step(const SupportBody& b, double dt);
/// One explicit midpoint step of h_t = rho (inverse mean curvature).
SupportBody imcf_step(const SupportBody& b, double dt);

struct TorsionFem {
  double rel_h = 0.02;
  int degree = 2;
  /// Vertices of the polygon handed to the FEM solver, a multiple of the
  /// body grid; 0 means four times the grid.
  int polygon_nodes = 0;
};

/// to_polygon(b, m) with m from `fem`.
Polygon fem_polygon(const SupportBody& b, const TorsionFem& fem);

/// |grad u|^2 at the grid nodes of `b` from a trace on to_polygon(b, m), m a
/// multiple of the grid: the mean of the side averages of the two polygon
/// sides meeting at the node.
std::vector<double> node_grad_sq(const BoundaryTrace& tr, const SupportBody& b);

/// Torsion trace on fem_polygon(b, fem).
BoundaryTrace torsion_trace(const SupportBody& b, const TorsionFem& fem, double* T = nullptr);

/// One explicit midpoint step of h_t = -h / |grad u|^2, `tr` being the
/// torsion trace on fem_polygon(b, fem); the midpoint trace is solved here.
SupportBody torsion_step(const SupportBody& b, const BoundaryTrace& tr, double dt, const TorsionFem& fem = {});

/// g = T - A^2 / (8 pi).
double deficit(double T, double A);

/// int |grad u|^2 kappa ds = int |grad u|^2 dtheta.
double lemma51_value(const BoundaryTrace& tr, const SupportBody& b);

enum class CurvatureFlow { Csf, Imcf, Torsion };

std::string_view to_string(CurvatureFlow kind) noexcept;

struct FlowConfig {
  double t_end = 1.0;
  /// Stop once the area drops to this value.
  double area_stop = 0.0;
  long max_steps = 2'000'000;
  /// Fraction of the linear stability bound used as the step.
  double dt_safety = 0.5;
  /// Steps also obey max |dh| <= dh_max_rel * min h.
  double dh_max_rel = 1e-3;
  int max_halvings = 20;
  /// A row with FEM quantities every this many accepted steps.
  int sample_every = 10;
  bool sample_fem = true;
  TorsionFem fem;
};

struct FlowSample {
  double t = 0.0;
  double area = 0.0;
  double perimeter = 0.0;
  double T = 0.0;  // NaN when not sampled
  double deficit = 0.0;
  double lemma51 = 0.0;
  double isoper = 0.0;  // P^2 / A
  double rho_min = 0.0;
};

struct FlowSeries {
  CurvatureFlow kind = CurvatureFlow::Csf;
  std::vector<FlowSample> samples;
  long steps = 0;
  int halvings = 0;
  /// Empty on a clean stop, otherwise the error that ended the run.
  std::string failure;
  std::vector<double> final_h;
};

FlowSeries run_flow(CurvatureFlow kind, const SupportBody& b0, const FlowConfig& cfg = {});

}  // namespace shapeflow
