#include "shapeflow/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>

#include <fftw3.h>

#include "shapeflow/functionals.hpp"

namespace shapeflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRhoFloor = 1e-6;

// FFTW planning is not thread safe; plans are made once per size and then
// executed on fresh aligned buffers, which is.
struct Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

Plans plans_for(int n) {
  static std::mutex mtx;
  static std::map<int, Plans> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  Plans p;
  p.fwd = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_c2r_1d(n, out, in, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  cache.emplace(n, p);
  return p;
}

struct Spectrum {
  std::vector<std::complex<double>> c;  // c_k = (1/N) sum f_j e^{-i k theta_j}, k = 0..N/2
};

Spectrum forward(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  const Plans p = plans_for(n);
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  std::copy(f.begin(), f.end(), in);
  fftw_execute_dft_r2c(p.fwd, in, out);
  Spectrum s;
  s.c.resize(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) s.c[k] = std::complex<double>(out[k][0], out[k][1]) / static_cast<double>(n);
  fftw_free(in);
  fftw_free(out);
  return s;
}

std::vector<double> backward(const Spectrum& s, int n) {
  const Plans p = plans_for(n);
  double* out = fftw_alloc_real(n);
  fftw_complex* in = fftw_alloc_complex(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    in[k][0] = s.c[k].real();
    in[k][1] = s.c[k].imag();
  }
  fftw_execute_dft_c2r(p.bwd, in, out);
  std::vector<double> f(out, out + n);
  fftw_free(in);
  fftw_free(out);
  return f;
}

bool power_of_two(int n) { return n >= 8 && (n & (n - 1)) == 0; }

Vec2 normal_at(double th) { return {std::cos(th), std::sin(th)}; }

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> rho_of(const std::vector<double>& h) {
  std::vector<double> r = spectral_derivative(h, 2);
  for (std::size_t i = 0; i < h.size(); ++i) r[i] += h[i];
  return r;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

template <class Speed>
SupportBody midpoint(const SupportBody& b, double dt, Speed&& speed) {
  const std::vector<double>& h = b.h();
  const std::vector<double> f0 = speed(h);
  std::vector<double> half(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) half[i] = h[i] + 0.5 * dt * f0[i];
  const std::vector<double> f1 = speed(half);
  std::vector<double> next(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) next[i] = h[i] + dt * f1[i];
  return SupportBody(std::move(next));
}

std::vector<double> csf_speed(const std::vector<double>& h) {
  std::vector<double> r = rho_of(h);
  const double floor = kRhoFloor * mean(h);
  for (double& x : r) {
    if (!(x > floor)) throw Error(ErrorKind::ConvexityLost, "radius of curvature vanished inside a step");
    x = -1.0 / x;
  }
  return r;
}

std::vector<double> torsion_speed(const SupportBody& b, const BoundaryTrace& tr) {
  std::vector<double> g = node_grad_sq(tr, b);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0.0)) throw Error(ErrorKind::SolveFailure, "vanishing boundary gradient");
    f[i] = -b.h()[i] / g[i];
  }
  return f;
}

}  // namespace

std::vector<double> spectral_derivative(const std::vector<double>& f, int order) {
  const int n = static_cast<int>(f.size());
  if (!power_of_two(n)) throw Error(ErrorKind::InvalidInput, "grid size must be a power of two >= 8");
  if (order == 0) return f;
  Spectrum s = forward(f);
  for (int k = 0; k <= n / 2; ++k) {
    std::complex<double> m = 1.0;
    for (int j = 0; j < order; ++j) m *= std::complex<double>(0.0, k);
    s.c[k] *= m;
  }
  // the Nyquist mode has no derivative of odd order
  if (order % 2 == 1) s.c[n / 2] = 0.0;
  return backward(s, n);
}

SupportBody::SupportBody(std::vector<double> h) : h_(std::move(h)) {
  if (!power_of_two(size())) throw Error(ErrorKind::InvalidInput, "grid size must be a power of two >= 8");
  for (double x : h_) {
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidInput, "support values must be finite");
    if (x <= 0.0) throw Error(ErrorKind::OriginEscaped, "origin is not interior to the body");
  }
  if (!(rho_min() > rho_floor())) throw Error(ErrorKind::ConvexityLost, "body is not strictly convex");
}

SupportBody SupportBody::circle(double radius, Vec2 center, int n) {
  std::vector<double> h(n);
  for (int k = 0; k < n; ++k) h[k] = radius + dot(center, normal_at(kTwoPi * k / n));
  return SupportBody(std::move(h));
}

SupportBody SupportBody::ellipse(double a, double b, double rotation, Vec2 center, int n) {
  std::vector<double> h(n);
  for (int k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    const double c = std::cos(th - rotation), s = std::sin(th - rotation);
    h[k] = std::sqrt(a * a * c * c + b * b * s * s) + dot(center, normal_at(th));
  }
  return SupportBody(std::move(h));
}

SupportBody SupportBody::from_points(const std::vector<Vec2>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> h(n);
  for (int k = 0; k < n; ++k) h[k] = dot(x[k], normal_at(kTwoPi * k / n));
  return SupportBody(std::move(h));
}

double SupportBody::theta(int k) const { return kTwoPi * k / size(); }

double SupportBody::rho_floor() const { return kRhoFloor * mean(h_); }

std::vector<double> SupportBody::rho() const { return rho_of(h_); }

double SupportBody::rho_min() const { return min_of(rho()); }

std::vector<Vec2> SupportBody::points() const {
  const std::vector<double> d = spectral_derivative(h_, 1);
  std::vector<Vec2> x(h_.size());
  for (int k = 0; k < size(); ++k) {
    const Vec2 g = normal_at(theta(k));
    x[k] = h_[k] * g + d[k] * perp(g);
  }
  return x;
}

double SupportBody::area() const {
  const std::vector<double> r = rho();
  double s = 0.0;
  for (int k = 0; k < size(); ++k) s += h_[k] * r[k];
  return 0.5 * s * kTwoPi / size();
}

double SupportBody::perimeter() const { return mean(h_) * kTwoPi; }

Vec2 SupportBody::centroid() const {
  // int_Omega x = (1/3) int_boundary x (x . nu) ds, with x . nu = h and ds = rho dtheta
  const std::vector<double> r = rho();
  const std::vector<Vec2> x = points();
  Vec2 s{};
  for (int k = 0; k < size(); ++k) s += (h_[k] * r[k]) * x[k];
  return s * (kTwoPi / size()) / (3.0 * area());
}

SupportBody SupportBody::recentered(Vec2 c) const {
  std::vector<double> h(h_);
  for (int k = 0; k < size(); ++k) h[k] -= dot(c, normal_at(theta(k)));
  return SupportBody(std::move(h));
}

std::vector<double> rho(const SupportBody& b) { return b.rho(); }
double body_area(const SupportBody& b) { return b.area(); }
double body_perimeter(const SupportBody& b) { return b.perimeter(); }

Polygon to_polygon(const SupportBody& b, int m) {
  const int n = b.size();
  if (m == 0 || m == n) return Polygon(b.points());
  if (m < 3) throw Error(ErrorKind::InvalidInput, "need at least 3 sample points");
  const Spectrum s = forward(b.h());
  std::vector<Vec2> x(m);
  for (int j = 0; j < m; ++j) {
    const double th = kTwoPi * j / m;
    double h = s.c[0].real(), dh = 0.0;
    for (int k = 1; k < n / 2; ++k) {
      const std::complex<double> e = s.c[k] * std::complex<double>(std::cos(k * th), std::sin(k * th));
      h += 2.0 * e.real();
      dh -= 2.0 * k * e.imag();
    }
    h += s.c[n / 2].real() * std::cos(0.5 * n * th);
    const Vec2 g = normal_at(th);
    x[j] = h * g + dh * perp(g);
  }
  return Polygon(std::move(x));
}

SupportBody csf_step(const SupportBody& b, double dt) { return midpoint(b, dt, csf_speed); }

SupportBody imcf_step(const SupportBody& b, double dt) { return midpoint(b, dt, rho_of); }

Polygon fem_polygon(const SupportBody& b, const TorsionFem& fem) {
  return to_polygon(b, fem.polygon_nodes > 0 ? fem.polygon_nodes : 4 * b.size());
}

std::vector<double> node_grad_sq(const BoundaryTrace& tr, const SupportBody& b) {
  const int n = b.size();
  const int m = static_cast<int>(tr.tags.size());
  if (m < n || m % n != 0) throw Error(ErrorKind::InvalidInput, "trace was not computed on a body polygon");
  const int r = m / n;
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = 0.5 * (side_average_flux(tr, (k * r + m - 1) % m) + side_average_flux(tr, k * r));
  return g;
}

BoundaryTrace torsion_trace(const SupportBody& b, const TorsionFem& fem, double* T) {
  const Polygon p = fem_polygon(b, fem);
  auto mesh = std::make_shared<const Mesh>(mesh_polygon(p, fem.rel_h * p.diameter()));
  FemProblem prob(mesh, fem.degree);
  const Field u = prob.torsion();
  if (T) *T = integrate(u);
  return boundary_flux_sq(u);
}

SupportBody torsion_step(const SupportBody& b, const BoundaryTrace& tr, double dt, const TorsionFem& fem) {
  const std::vector<double> f0 = torsion_speed(b, tr);
  std::vector<double> half(b.h());
  for (std::size_t i = 0; i < half.size(); ++i) half[i] += 0.5 * dt * f0[i];
  const SupportBody mid(std::move(half));
  const std::vector<double> f1 = torsion_speed(mid, torsion_trace(mid, fem));
  std::vector<double> next(b.h());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * f1[i];
  return SupportBody(std::move(next));
}

double deficit(double T, double A) { return T - A * A / (8.0 * std::numbers::pi); }

double lemma51_value(const BoundaryTrace& tr, const SupportBody& b) {
  const std::vector<double> g = node_grad_sq(tr, b);
  double s = 0.0;
  for (double x : g) s += x;
  return s * kTwoPi / b.size();
}

std::string_view to_string(CurvatureFlow kind) noexcept {
  switch (kind) {
    case CurvatureFlow::Csf: return "csf";
    case CurvatureFlow::Imcf: return "imcf";
    case CurvatureFlow::Torsion: return "torsion";
  }
  return "?";
}

FlowSeries run_flow(CurvatureFlow kind, const SupportBody& b0, const FlowConfig& cfg) {
  FlowSeries out;
  out.kind = kind;
  SupportBody b = b0;
  double t = 0.0;
  const double nan = std::nan("");
  const double kmax = 0.5 * b.size();
  const double stiff = kmax * kmax - 1.0;

  // the current torsion trace, shared between the speed and the sample
  BoundaryTrace trace;
  double T_now = nan;
  bool have_trace = false;
  auto ensure_trace = [&] {
    if (!have_trace) {
      trace = torsion_trace(b, cfg.fem, &T_now);
      have_trace = true;
    }
  };

  auto sample = [&] {
    FlowSample s;
    s.t = t;
    s.area = b.area();
    s.perimeter = b.perimeter();
    s.isoper = s.perimeter * s.perimeter / s.area;
    s.rho_min = b.rho_min();
    s.T = s.deficit = s.lemma51 = nan;
    if (cfg.sample_fem || kind == CurvatureFlow::Torsion) {
      ensure_trace();
      s.T = T_now;
      s.deficit = deficit(T_now, area(fem_polygon(b, cfg.fem)));
      s.lemma51 = lemma51_value(trace, b);
    }
    out.samples.push_back(s);
  };

  try {
    sample();
    while (t < cfg.t_end && b.area() > cfg.area_stop && out.steps < cfg.max_steps) {
      const double hmin = min_of(b.h());
      double dt = 0.0;
      switch (kind) {
        case CurvatureFlow::Csf: {
          const double rmin = b.rho_min();
          dt = std::min(cfg.dt_safety * 2.0 * rmin * rmin / stiff, cfg.dh_max_rel * hmin * rmin);
          break;
        }
        case CurvatureFlow::Imcf: {
          const std::vector<double> r = b.rho();
          const double rmax = *std::max_element(r.begin(), r.end());
          dt = std::min(cfg.dt_safety * 2.0 / stiff, cfg.dh_max_rel * hmin / rmax);
          break;
        }
        case CurvatureFlow::Torsion:
          ensure_trace();
          dt = cfg.dh_max_rel * hmin / max_abs(torsion_speed(b, trace));
          break;
      }
      dt = std::min(dt, cfg.t_end - t);

      std::optional<SupportBody> next;
      for (int attempt = 0; !next; ++attempt) {
        bool ok = false;
        try {
          SupportBody cand = kind == CurvatureFlow::Csf    ? csf_step(b, dt)
                             : kind == CurvatureFlow::Imcf ? imcf_step(b, dt)
                                                           : torsion_step(b, trace, dt, cfg.fem);
          double dh = 0.0;
          for (int k = 0; k < b.size(); ++k) dh = std::max(dh, std::abs(cand.h()[k] - b.h()[k]));
          ok = dh <= cfg.dh_max_rel * hmin * (1.0 + 1e-9);
          if (ok) next = std::move(cand);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::ConvexityLost && e.kind() != ErrorKind::OriginEscaped) throw;
          if (attempt == cfg.max_halvings) throw;
        }
        if (!ok) {
          if (attempt == cfg.max_halvings) throw Error(ErrorKind::ConvexityLost, "step rejected after repeated halving");
          dt *= 0.5;
          ++out.halvings;
        }
      }
      b = *next;
      if (kind == CurvatureFlow::Torsion) b = b.recentered(b.centroid());
      t += dt;
      ++out.steps;
      have_trace = false;
      if (out.steps % cfg.sample_every == 0) sample();
    }
    if (out.samples.back().t != t) sample();
  } catch (const Error& e) {
    out.failure = e.what();
  }
  out.final_h = b.h();
  return out;
}

}  // namespace shapeflow
