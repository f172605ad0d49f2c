#include "shapeflow/flows.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace shapeflow {

namespace {

double flux_dot(const BoundaryTrace& tr, const AffineFlow& f, double t) {
  double s = 0.0;
  for (const auto& p : tr.points) s += p.weight * p.grad_sq * dot(f.velocity(t, p.x), p.normal);
  return s;
}

Mat2 mul(Mat2 m, Mat2 n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

Mat2 inverse(Mat2 m) {
  const double d = m.det();
  return {m.d / d, -m.b / d, -m.c / d, m.a / d};
}

double side_integral(const BoundaryTrace& tr, int side, auto&& weight) {
  double s = 0.0;
  for (const auto& p : tr.points) {
    if (p.side == side) s += p.weight * p.grad_sq * weight(p.x);
  }
  return s;
}

// The torsion-side proof expression, i.e. d(T/A^2)/dt when fed the torsion
// trace. With the eigenfunction trace the same number times -A^3 is d(lambda A)/dt.
double proof_kernel(const AffineFlow& f, const BoundaryTrace& tr, double t, const Polygon& dom) {
  const double a = area(dom);
  switch (f.kind()) {
    case FlowKind::HeightStretch: {
      double s = 0.0;
      for (const auto& p : tr.points) s += p.weight * p.grad_sq * dot({-p.x.x, p.x.y}, p.normal);
      return s / (2.0 * (1.0 + t) * a * a);
    }
    case FlowKind::HeightCompress: {
      double s = 0.0;
      for (const auto& p : tr.points) s += p.weight * p.grad_sq * dot({p.x.x, -p.x.y}, p.normal);
      return s / (2.0 * (1.0 - t) * a * a);
    }
    case FlowKind::RhombusDiagonal: {
      const int cd = static_cast<int>(dom.edge_index("CD"));
      const Vec2 nu = dom.outer_normal(cd);
      const double cos_th = nu.y, tan_th = nu.x / nu.y;
      const double s = side_integral(tr, cd, [&](Vec2 x) { return x.y - x.x * tan_th; });
      return 2.0 * cos_th * s / ((1.0 + t) * a * a);
    }
    case FlowKind::LegStretch: {
      const int bc = static_cast<int>(dom.edge_index("BC"));
      const Vec2 b = dom.edge_start(bc), c = dom.edge_end(bc);
      const Vec2 apex = dom.edge_start(static_cast<std::size_t>(dom.edge_index("AB")));
      const double beta = interior_angle(b, apex, c);
      const double cot_th = median_cot_theta(f.alpha(), beta);
      const double tan_th = 1.0 / cot_th;
      const double s = side_integral(tr, bc, [&](Vec2 x) { return x.x * tan_th - x.y; });
      return std::sin(beta) * cot_th * s / (2.0 * (1.0 + t) * a * a);
    }
    case FlowKind::RectangleSide: {
      const int bc = static_cast<int>(dom.edge_index("BC"));
      const int cd = static_cast<int>(dom.edge_index("CD"));
      const double mean_bc = side_integral(tr, bc, [](Vec2) { return 1.0; }) / dom.side_length(bc);
      const double mean_cd = side_integral(tr, cd, [](Vec2) { return 1.0; }) / dom.side_length(cd);
      return (mean_bc - mean_cd) / (2.0 * (1.0 + t) * a);
    }
    default:
      throw Error(ErrorKind::UnsupportedKind, std::string("no proof form for ") + std::string(to_string(f.kind())));
  }
}

double quantity_of(Quantity q, const Solution& s) {
  const FunctionalReport& r = s.report;
  switch (q) {
    case Quantity::Area: return r.area;
    case Quantity::T: return r.T_domain;
    case Quantity::Lambda1: return r.lambda1;
    case Quantity::TNorm: return r.T_normalized;
    case Quantity::Lambda1Norm: return r.lambda1_normalized;
  }
  return 0.0;
}

bool needs_eigen(Quantity q) { return q == Quantity::Lambda1 || q == Quantity::Lambda1Norm; }

// Central difference with the mesh at t transported to t +- h.
double fd_on_mesh(Quantity q, const Mesh& mesh, const Polygon& p, const AffineFlow& f, double t, double h,
                  int degree) {
  f.require_admissible(t + h);
  f.require_admissible(t - h);
  const Mat2 mt_inv = inverse(f.map_matrix(t));
  const Vec2 ct = f.map_offset(t);
  ReportOptions ro;
  ro.degree = degree;
  ro.with_eigen = needs_eigen(q);
  double val[2];
  for (int k = 0; k < 2; ++k) {
    const double s = t + (k == 0 ? h : -h);
    const Mat2 g = mul(f.map_matrix(s), mt_inv);
    const Vec2 b = f.map_offset(s) - g * ct;
    const Polygon ps = apply_flow(f, s, p);
    if (q == Quantity::Area) {
      val[k] = area(ps);
      continue;
    }
    val[k] = quantity_of(q, solve_on(std::make_shared<const Mesh>(map_mesh(mesh, g, b, ps)), ro));
  }
  return (val[0] - val[1]) / (2.0 * h);
}

ScanRow scan_row(const Polygon& p, const AffineFlow& f, double t, const ScanOptions& opts) {
  ScanRow row;
  row.t = t;
  const double nan = std::nan("");
  try {
    const Polygon pt = apply_flow(f, t, p);
    auto mesh = std::make_shared<const Mesh>(mesh_polygon(pt, opts.rel_h * pt.diameter(), opts.mesh));
    ReportOptions ro;
    ro.degree = opts.degree;
    ro.consistency_tol = opts.consistency_tol;
    ro.with_eigen = opts.with_eigen;
    const Solution sol = solve_on(mesh, ro);
    const FunctionalReport& r = sol.report;
    row.area = r.area;
    row.T = r.T_domain;
    row.lambda1 = r.lambda1;
    row.T_norm = r.T_normalized;
    row.lambda1_norm = r.lambda1_normalized;
    row.min_angle_deg = r.min_angle_deg;
    row.T_gap = r.T_gap;

    const double dT = shape_derivative_T(sol.torsion_trace, f, t);
    const double dL = opts.with_eigen ? shape_derivative_lambda1(*sol.eigen_trace, f, t) : nan;
    const auto nd = normalized_derivatives(r, dT, dL, area_derivative(pt, f, t));
    row.dTnorm_dt = nd.dT_norm;
    row.dLnorm_dt = nd.dL_norm;
    row.dTnorm_dt_fd = opts.with_fd ? fd_on_mesh(Quantity::TNorm, *mesh, p, f, t, default_fd_step(t), opts.degree) : nan;

    if (f.kind() != FlowKind::Translate && f.kind() != FlowKind::Scale) {
      const auto pf = proof_form_derivative(f, sol.torsion_trace, sol.eigen_trace ? &*sol.eigen_trace : nullptr, t, pt);
      row.proof_form = pf.dT_norm;
      row.proof_form_lambda = pf.dL_norm;
    }
    if (r.min_angle_deg < kMinTrustedAngleDeg) {
      row.flag = "needle";
    } else if (!r.consistent) {
      row.flag = "inconsistent";
    }
  } catch (const Error& e) {
    row.flag = "error:" + std::string(to_string(e.kind()));
  }
  return row;
}

}  // namespace

double shape_derivative_T(const BoundaryTrace& tr, const AffineFlow& f, double t) { return flux_dot(tr, f, t); }

double shape_derivative_lambda1(const BoundaryTrace& tr, const AffineFlow& f, double t) {
  return -flux_dot(tr, f, t);
}

double area_derivative(const Polygon& p, const AffineFlow& f, double t) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 mid = 0.5 * (p.edge_start(i) + p.edge_end(i));
    s += p.side_length(i) * dot(f.velocity(t, mid), p.outer_normal(i));
  }
  return s;
}

NormalizedDerivatives normalized_derivatives(const FunctionalReport& r, double dT, double dL, double dA) {
  const double a = r.area;
  return {(dT * a - 2.0 * r.T_pohozaev * dA) / (a * a * a), dL * a + r.lambda1_pohozaev * dA};
}

ProofForm proof_form_derivative(const AffineFlow& f, const BoundaryTrace& torsion, const BoundaryTrace* eigen,
                                double t, const Polygon& domain) {
  ProofForm out;
  out.dT_norm = proof_kernel(f, torsion, t, domain);
  if (eigen) {
    const double a = area(domain);
    out.dL_norm = -a * a * a * proof_kernel(f, *eigen, t, domain);
  }
  return out;
}

double fd_derivative(Quantity q, const Polygon& p, const AffineFlow& f, double t, double h_fd,
                     const FdOptions& opts) {
  const Polygon pt = apply_flow(f, t, p);
  const Mesh mesh = mesh_polygon(pt, opts.rel_h * pt.diameter(), opts.mesh);
  return fd_on_mesh(q, mesh, p, f, t, h_fd, opts.degree);
}

std::vector<ScanRow> monotonicity_scan(const Polygon& p, const AffineFlow& f, const std::vector<double>& t_grid,
                                       const ScanOptions& opts) {
  std::vector<ScanRow> rows(t_grid.size());
  int workers = opts.workers > 0 ? opts.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max<int>(1, static_cast<int>(t_grid.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < t_grid.size(); i = next++) rows[i] = scan_row(p, f, t_grid[i], opts);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

std::vector<double> linear_grid(double t_min, double t_max, int n, bool open) {
  std::vector<double> g;
  if (n <= 0) return g;
  if (open) {
    for (int k = 1; k <= n; ++k) g.push_back(t_min + (t_max - t_min) * k / (n + 1));
  } else if (n == 1) {
    g.push_back(t_min);
  } else {
    for (int k = 0; k < n; ++k) g.push_back(t_min + (t_max - t_min) * k / (n - 1));
  }
  return g;
}

double css_lambda(double s) {
  const double s4 = s * s * s * s;
  return 0.5 * (1.0 - s4) / (1.0 + s4) * std::sqrt(1.0 / (s * s) + s * s);
}

double css_xi(double s, double t) {
  const double l = css_lambda(s);
  const double s2 = s * s;
  return std::sqrt(t * t * l * l + s2 + 2.0 * t * l * s2 / std::sqrt(s2 + 1.0 / s2));
}

CssState css_state(double s, double t) {
  if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorKind::InvalidInput, "css parameter s must lie in (0, 1]");
  return {s, css_lambda(s), css_xi(s, t)};
}

Polygon css_rectangle(double x) { return make_rectangle(x, 1.0 / x); }

double css_rectangle_torsion(double x, const FdOptions& opts) {
  const Polygon r = css_rectangle(x);
  ReportOptions ro;
  ro.degree = opts.degree;
  ro.with_eigen = false;
  ro.mesh = opts.mesh;
  return report(r, opts.rel_h * r.diameter(), ro).T_domain;
}

CssReport css_verify(double s, const std::vector<double>& t_grid, const FdOptions& opts) {
  if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorKind::InvalidInput, "css_verify needs 0 < s <= 1");
  CssReport rep;
  rep.s = s;
  const double ts = css_rectangle_torsion(s, opts);
  rep.passed = true;
  for (double t : t_grid) {
    CssRow row;
    row.t = t;
    row.xi = css_xi(s, t);
    row.s_prime = std::min(row.xi, 1.0 / row.xi);
    row.T_s = ts;
    const bool moved = row.s_prime != s;
    row.T_s_prime = moved ? css_rectangle_torsion(row.s_prime, opts) : ts;
    row.increased = row.T_s_prime > ts;
    if (moved) rep.passed = rep.passed && row.increased;
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<std::pair<double, double>> css_torsion_curve(const std::vector<double>& s_grid, const FdOptions& opts) {
  std::vector<std::pair<double, double>> out;
  for (double s : s_grid) out.emplace_back(s, css_rectangle_torsion(s, opts));
  return out;
}

}  // namespace shapeflow
