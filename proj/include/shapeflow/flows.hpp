#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shapeflow/functionals.hpp"

namespace shapeflow {

/// int |grad u|^2 eta(t,x).nu over the boundary of F_t(Omega).
double shape_derivative_T(const BoundaryTrace& tr, const AffineFlow& f, double t);

/// -int |grad v|^2 eta(t,x).nu for the L2-normalized eigenfunction.
double shape_derivative_lambda1(const BoundaryTrace& tr, const AffineFlow& f, double t);

/// int eta(t,x).nu over the boundary of p (p is the domain at time t).
/// Exact: eta is affine, so the midpoint rule is exact per edge.
double area_derivative(const Polygon& p, const AffineFlow& f, double t);

struct NormalizedDerivatives {
  double dT_norm = 0.0;  // d/dt (T / A^2)
  double dL_norm = 0.0;  // d/dt (lambda1 A)
};

/// Quotient rule with the boundary (Pohozaev) values of T and lambda1, so that
/// every term is a boundary integral over the same trace.
NormalizedDerivatives normalized_derivatives(const FunctionalReport& r, double dT, double dL, double dA);

/// Closed-form derivative expressions used in the monotonicity proofs,
/// evaluated on traces over `domain` = F_t(Omega) in the canonical placement.
///
///   HeightStretch    1/(2(1+t)A^2) int |grad u|^2 (-x, y).nu
///   HeightCompress   1/(2(1-t)A^2) int |grad u|^2 (x, -y).nu
///   RhombusDiagonal  2 cos(th)/((1+t)A^2) int_CD |grad u|^2 (y - x tan th),  nu_CD = (sin th, cos th)
///   LegStretch       sin(b) cot(th)/(2(1+t)A^2) int_BC |grad u|^2 (x tan th - y),
///                    cot th = 2 cot(alpha) + cot(b), b the angle at B
///   RectangleSide    1/(2(1+t)A) (mean_BC |grad u|^2 - mean_CD |grad u|^2)
///
/// The eigenvalue forms use the same kernels scaled by -A^3 (times the
/// eigenfunction trace). Throws `UnsupportedKind` for Translate and Scale.
struct ProofForm {
  double dT_norm = 0.0;
  std::optional<double> dL_norm;
};

ProofForm proof_form_derivative(const AffineFlow& f, const BoundaryTrace& torsion, const BoundaryTrace* eigen,
                                double t, const Polygon& domain);

enum class Quantity { Area, T, Lambda1, TNorm, Lambda1Norm };

struct FdOptions {
  double rel_h = 0.02;  // mesh size relative to the diameter of F_t(p)
  int degree = 2;
  MeshOptions mesh;
};

/// Central difference (Q(t+h) - Q(t-h)) / 2h. The mesh of F_t(p) is carried
/// to F_{t+-h}(p) by the affine map between them and re-solved there, so the
/// difference sees the same discretization at both ends.
double fd_derivative(Quantity q, const Polygon& p, const AffineFlow& f, double t, double h_fd,
                     const FdOptions& opts = {});

/// The default step 1e-3 (1 + |t|).
inline double default_fd_step(double t) { return 1e-3 * (1.0 + (t < 0 ? -t : t)); }

struct ScanRow {
  double t = 0.0;
  double area = 0.0;
  double T = 0.0;
  double lambda1 = 0.0;
  double T_norm = 0.0;
  double lambda1_norm = 0.0;
  double dTnorm_dt = 0.0;
  double dTnorm_dt_fd = 0.0;
  double dLnorm_dt = 0.0;
  std::optional<double> proof_form;
  std::optional<double> proof_form_lambda;
  double min_angle_deg = 0.0;
  double T_gap = 0.0;
  /// "ok", "needle", "inconsistent" or "error:<kind>".
  std::string flag = "ok";

  bool trusted() const { return flag == "ok"; }
};

struct ScanOptions {
  double rel_h = 0.02;
  int degree = 2;
  double consistency_tol = 1e-3;
  bool with_fd = true;
  bool with_eigen = true;
  /// 0 picks the hardware concurrency.
  int workers = 0;
  MeshOptions mesh;
};

/// One row per t of the family F_t(p). Rows are independent and computed
/// on a worker pool; the result is in grid order and does not depend on the
/// number of workers. Failures are recorded in the row flag.
std::vector<ScanRow> monotonicity_scan(const Polygon& p, const AffineFlow& f, const std::vector<double>& t_grid,
                                       const ScanOptions& opts = {});

/// n points t_min + (t_max - t_min) k/(n-1), or the interior points of
/// (t_min, t_max) when `open` is set.
std::vector<double> linear_grid(double t_min, double t_max, int n, bool open = false);

// ---------------------------------------------------------------------------
// Continuous Steiner symmetrization of the rectangle R(s) = [0,s]x[0,1/s].

/// lambda(s) = (1 - s^4)/(2 (1 + s^4)) sqrt(s^-2 + s^2).
double css_lambda(double s);

/// xi(s;t)^2 = t^2 lambda^2 + s^2 + 2 t lambda s^2 (s^2 + s^-2)^(-1/2).
double css_xi(double s, double t);

struct CssState {
  double s = 1.0;
  double lambda = 0.0;
  double xi = 1.0;
};

CssState css_state(double s, double t);

/// R(x) = [0,x]x[0,1/x].
Polygon css_rectangle(double x);

/// Torsional rigidity of R(x) at mesh size rel_h times its diameter.
double css_rectangle_torsion(double x, const FdOptions& opts = {});

struct CssRow {
  double t = 0.0;
  double xi = 0.0;
  double s_prime = 0.0;  // min(xi, 1/xi)
  double T_s = 0.0;
  double T_s_prime = 0.0;
  bool increased = false;  // T(R(s')) > T(R(s))
};

struct CssReport {
  double s = 0.0;
  std::vector<CssRow> rows;
  bool passed = false;
};

/// For every t in the grid compare T(R(s')) with T(R(s)); every row with
/// s' != s must increase. At s = 1 every row is the square itself.
CssReport css_verify(double s, const std::vector<double>& t_grid, const FdOptions& opts = {});

/// T(R(s)) over an s-grid.
std::vector<std::pair<double, double>> css_torsion_curve(const std::vector<double>& s_grid,
                                                         const FdOptions& opts = {});

}  // namespace shapeflow
