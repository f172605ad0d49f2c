#include "shapeflow/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace shapeflow {

namespace {

// Degree-4 rule on the reference triangle (barycentric points, weights sum to 1).
struct QuadPoint {
  double l0, l1, l2, w;
};

constexpr QuadPoint kTriRule[6] = {
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
};

// Gauss-Legendre on [0,1].
constexpr double kG3 = 0.3872983346207417;  // sqrt(3/5)/2
constexpr double kEdgeNodes[3] = {0.5 - kG3, 0.5, 0.5 + kG3};
constexpr double kEdgeWeights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

struct Element {
  std::array<Vec2, 3> p;
  std::array<Vec2, 3> grad_l;  // gradients of the barycentric coordinates
  double area = 0.0;
};

Element element(const Mesh& m, std::size_t t) {
  const auto& tri = m.triangles()[t];
  Element e;
  for (int i = 0; i < 3; ++i) e.p[i] = m.vertices()[tri[i]];
  const double two_a = cross(e.p[1] - e.p[0], e.p[2] - e.p[0]);
  e.area = 0.5 * two_a;
  for (int i = 0; i < 3; ++i) {
    const Vec2 a = e.p[(i + 1) % 3];
    const Vec2 b = e.p[(i + 2) % 3];
    e.grad_l[i] = Vec2{a.y - b.y, b.x - a.x} / two_a;
  }
  return e;
}

std::array<double, 3> barycentric(const Element& e, Vec2 x) {
  const double two_a = 2.0 * e.area;
  std::array<double, 3> l{};
  for (int i = 0; i < 3; ++i) {
    const Vec2 a = e.p[(i + 1) % 3];
    const Vec2 b = e.p[(i + 2) % 3];
    l[i] = cross(b - a, x - a) / two_a;
  }
  return l;
}

// Shape function values and gradients at barycentric point l.
void basis(int degree, const Element& e, const std::array<double, 3>& l, double* phi, Vec2* dphi) {
  if (degree == 1) {
    for (int i = 0; i < 3; ++i) {
      phi[i] = l[i];
      dphi[i] = e.grad_l[i];
    }
    return;
  }
  for (int i = 0; i < 3; ++i) {
    phi[i] = l[i] * (2.0 * l[i] - 1.0);
    dphi[i] = (4.0 * l[i] - 1.0) * e.grad_l[i];
  }
  for (int k = 0; k < 3; ++k) {
    const int i = k, j = (k + 1) % 3;
    phi[3 + k] = 4.0 * l[i] * l[j];
    dphi[3 + k] = 4.0 * (l[i] * e.grad_l[j] + l[j] * e.grad_l[i]);
  }
}

using SpMat = Eigen::SparseMatrix<double>;

}  // namespace

DofMap::DofMap(const Mesh& mesh, int degree) : degree_(degree) {
  if (degree != 1 && degree != 2) {
    throw Error(ErrorKind::InvalidInput, "element degree must be 1 or 2");
  }
  const std::size_t nv = mesh.num_vertices();
  coords_ = mesh.vertices();
  boundary_.assign(nv, false);
  for (const auto& be : mesh.boundary_edges()) {
    boundary_[be.v0] = true;
    boundary_[be.v1] = true;
  }
  tri_dofs_.resize(mesh.num_triangles());
  std::map<std::pair<int, int>, int> edge_dof;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    auto& d = tri_dofs_[t];
    d.fill(-1);
    for (int i = 0; i < 3; ++i) d[i] = tri[i];
    if (degree == 2) {
      for (int k = 0; k < 3; ++k) {
        const int a = tri[k], b = tri[(k + 1) % 3];
        const auto key = std::minmax(a, b);
        auto [it, inserted] = edge_dof.try_emplace({key.first, key.second}, 0);
        if (inserted) {
          it->second = static_cast<int>(coords_.size());
          coords_.push_back(0.5 * (mesh.vertices()[a] + mesh.vertices()[b]));
          boundary_.push_back(false);
        }
        d[3 + k] = it->second;
      }
    }
  }
  if (degree == 2) {
    for (const auto& be : mesh.boundary_edges()) {
      const auto key = std::minmax(be.v0, be.v1);
      boundary_[edge_dof.at({key.first, key.second})] = true;
    }
  }
  interior_.assign(coords_.size(), -1);
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!boundary_[i]) interior_[i] = static_cast<int>(num_interior_++);
  }
}

double Field::value(std::size_t triangle, Vec2 x) const {
  const Element e = element(*mesh, triangle);
  const auto l = barycentric(e, x);
  double phi[6];
  Vec2 dphi[6];
  basis(degree(), e, l, phi, dphi);
  const auto& d = dofs->triangle_dofs(triangle);
  double v = 0.0;
  for (int a = 0; a < dofs->dofs_per_triangle(); ++a) v += values[d[a]] * phi[a];
  return v;
}

Vec2 Field::gradient(std::size_t triangle, Vec2 x) const {
  const Element e = element(*mesh, triangle);
  const auto l = barycentric(e, x);
  double phi[6];
  Vec2 dphi[6];
  basis(degree(), e, l, phi, dphi);
  const auto& d = dofs->triangle_dofs(triangle);
  Vec2 g{};
  for (int a = 0; a < dofs->dofs_per_triangle(); ++a) g += values[d[a]] * dphi[a];
  return g;
}

double Field::min_interior_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dofs->num_dofs(); ++i) {
    if (!dofs->on_boundary(i)) m = std::min(m, values[i]);
  }
  return m;
}

struct FemProblem::Factor {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool ok = false;
};

FemProblem::FemProblem(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), dofs_(std::make_shared<DofMap>(*mesh_, degree)),
      factor_(std::make_unique<Factor>()) {
  const DofMap& dm = *dofs_;
  const int nd = dm.dofs_per_triangle();
  const auto n = static_cast<Eigen::Index>(dm.num_interior());
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(mesh_->num_triangles() * nd * nd);
  mt.reserve(mesh_->num_triangles() * nd * nd);
  f_full_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dm.num_dofs()));

  for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
    const Element e = element(*mesh_, t);
    double ke[6][6] = {}, me[6][6] = {}, fe[6] = {};
    for (const auto& q : kTriRule) {
      double phi[6];
      Vec2 dphi[6];
      basis(degree, e, {q.l0, q.l1, q.l2}, phi, dphi);
      const double w = q.w * e.area;
      for (int a = 0; a < nd; ++a) {
        fe[a] += w * phi[a];
        for (int b = 0; b < nd; ++b) {
          ke[a][b] += w * dot(dphi[a], dphi[b]);
          me[a][b] += w * phi[a] * phi[b];
        }
      }
    }
    const auto& d = dm.triangle_dofs(t);
    for (int a = 0; a < nd; ++a) {
      f_full_[d[a]] += fe[a];
      const int ia = dm.interior_index(d[a]);
      if (ia < 0) continue;
      for (int b = 0; b < nd; ++b) {
        const int ib = dm.interior_index(d[b]);
        if (ib < 0) continue;
        kt.emplace_back(ia, ib, ke[a][b]);
        mt.emplace_back(ia, ib, me[a][b]);
      }
    }
  }
  k_.resize(n, n);
  m_.resize(n, n);
  k_.setFromTriplets(kt.begin(), kt.end());
  m_.setFromTriplets(mt.begin(), mt.end());
  f_.resize(n);
  for (std::size_t i = 0; i < dm.num_dofs(); ++i) {
    const int ii = dm.interior_index(i);
    if (ii >= 0) f_[ii] = f_full_[static_cast<Eigen::Index>(i)];
  }
  if (n == 0) throw Error(ErrorKind::SolveFailure, "mesh has no interior degrees of freedom");
}

FemProblem::~FemProblem() = default;

Eigen::VectorXd FemProblem::expand(const Eigen::VectorXd& interior) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs_->num_dofs()));
  for (std::size_t i = 0; i < dofs_->num_dofs(); ++i) {
    const int ii = dofs_->interior_index(i);
    if (ii >= 0) full[static_cast<Eigen::Index>(i)] = interior[ii];
  }
  return full;
}

Eigen::VectorXd FemProblem::solve_stiffness(const Eigen::VectorXd& rhs) {
  constexpr double kTol = 1e-10;
  if (!factor_->ok) {
    factor_->ldlt.compute(k_);
    factor_->ok = factor_->ldlt.info() == Eigen::Success;
  }
  const double rn = std::max(rhs.norm(), std::numeric_limits<double>::min());
  if (factor_->ok) {
    Eigen::VectorXd x = factor_->ldlt.solve(rhs);
    if ((k_ * x - rhs).norm() <= kTol * rn) return x;
  }
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(kTol);
  cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * k_.rows()));
  cg.compute(k_);
  Eigen::VectorXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success || (k_ * x - rhs).norm() > kTol * rn) {
    throw Error(ErrorKind::SolveFailure, "stiffness solve did not reach relative residual 1e-10");
  }
  return x;
}

Field FemProblem::torsion() {
  Field f;
  f.mesh = mesh_;
  f.dofs = dofs_;
  f.role = FieldRole::Torsion;
  f.values = expand(solve_stiffness(f_));
  if (!(f.min_interior_value() > 0.0)) {
    throw Error(ErrorKind::SolveFailure, "torsion function not positive at every interior dof");
  }
  return f;
}

EigenResult FemProblem::principal_eigen(const EigenOptions& opts) {
  Eigen::VectorXd x = solve_stiffness(f_);
  auto normalize = [&](Eigen::VectorXd& v) { v /= std::sqrt(v.dot(m_ * v)); };
  normalize(x);
  double rq = x.dot(k_ * x);

  // A few unshifted steps to get a safe lower shift, then shifted iteration.
  Eigen::SimplicialLDLT<SpMat> shifted;
  bool use_shift = false;
  EigenResult res;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iterations; ++it) {
    if (it == 6) {
      const double sigma = 0.9 * rq;
      SpMat a = k_ - sigma * m_;
      shifted.compute(a);
      use_shift = shifted.info() == Eigen::Success && shifted.vectorD().minCoeff() > 0.0;
    }
    const Eigen::VectorXd mx = m_ * x;
    Eigen::VectorXd y = use_shift ? Eigen::VectorXd(shifted.solve(mx)) : solve_stiffness(mx);
    normalize(y);
    const Eigen::VectorXd ky = k_ * y;
    const double rq_new = y.dot(ky);
    const Eigen::VectorXd my = m_ * y;
    residual = (ky - rq_new * my).norm() / my.norm();
    const bool rq_done = std::abs(rq_new - rq) <= opts.rq_tol * std::abs(rq_new);
    x = std::move(y);
    rq = rq_new;
    res.iterations = it;
    if (it >= 2 && rq_done && residual <= opts.residual_tol) break;
    if (it == opts.max_iterations) {
      throw Error(ErrorKind::SolveFailure, "inverse iteration did not converge");
    }
  }

  // Sign convention: positive at the interior dof nearest the area centroid.
  const Vec2 c = mesh_->domain().centroid();
  double best = std::numeric_limits<double>::infinity();
  int pick = -1;
  for (std::size_t i = 0; i < dofs_->num_dofs(); ++i) {
    const int ii = dofs_->interior_index(i);
    if (ii < 0) continue;
    const double d = distance(dofs_->coord(i), c);
    if (d < best) {
      best = d;
      pick = ii;
    }
  }
  if (x[pick] < 0.0) x = -x;

  res.lambda1 = rq;
  res.residual = residual;
  res.field.mesh = mesh_;
  res.field.dofs = dofs_;
  res.field.role = FieldRole::Eigenfunction;
  res.field.values = expand(x);
  return res;
}

Field solve_torsion(const Mesh& mesh, int degree) {
  FemProblem p(std::make_shared<const Mesh>(mesh), degree);
  return p.torsion();
}

EigenResult solve_principal_eigen(const Mesh& mesh, int degree, const EigenOptions& opts) {
  FemProblem p(std::make_shared<const Mesh>(mesh), degree);
  return p.principal_eigen(opts);
}

double integrate(const Field& f) {
  double s = 0.0;
  const int deg = f.degree();
  const int nd = f.dofs->dofs_per_triangle();
  for (std::size_t t = 0; t < f.mesh->num_triangles(); ++t) {
    const Element e = element(*f.mesh, t);
    const auto& d = f.dofs->triangle_dofs(t);
    // Exact integrals of the shape functions: P1 area/3; P2 vertex 0, edge area/3.
    for (int a = 0; a < nd; ++a) {
      double w;
      if (deg == 1) {
        w = e.area / 3.0;
      } else {
        w = a < 3 ? 0.0 : e.area / 3.0;
      }
      s += w * f.values[d[a]];
    }
  }
  return s;
}

int BoundaryTrace::side_index(std::string_view tag) const {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == tag) return static_cast<int>(i);
  }
  throw Error(ErrorKind::UnknownTag, "no side tagged '" + std::string(tag) + "'");
}

BoundaryTrace boundary_flux_sq(const Field& f) {
  const Mesh& m = *f.mesh;
  const Polygon& poly = m.domain();
  BoundaryTrace tr;
  tr.role = f.role;
  tr.tags = poly.tags();
  for (std::size_t i = 0; i < poly.size(); ++i) tr.side_lengths.push_back(poly.side_length(i));
  tr.points.reserve(3 * m.boundary_edges().size());
  for (const auto& be : m.boundary_edges()) {
    const Vec2 a = m.vertices()[be.v0];
    const Vec2 b = m.vertices()[be.v1];
    const double len = distance(a, b);
    const Vec2 nrm = poly.outer_normal(static_cast<std::size_t>(be.side));
    for (int q = 0; q < 3; ++q) {
      TracePoint p;
      p.x = a + kEdgeNodes[q] * (b - a);
      p.normal = nrm;
      const Vec2 g = f.gradient(static_cast<std::size_t>(be.triangle), p.x);
      p.grad_sq = dot(g, g);
      p.weight = kEdgeWeights[q] * len;
      p.side = be.side;
      tr.points.push_back(p);
    }
  }
  return tr;
}

double boundary_gradient_sq(const Field& f, int side, Vec2 x) {
  const Mesh& m = *f.mesh;
  double best = std::numeric_limits<double>::infinity();
  int tri = -1;
  for (const auto& be : m.boundary_edges()) {
    if (be.side != side) continue;
    const Vec2 a = m.vertices()[be.v0];
    const Vec2 b = m.vertices()[be.v1];
    const Vec2 ab = b - a;
    const double s = std::clamp(dot(x - a, ab) / dot(ab, ab), 0.0, 1.0);
    const double d = distance(a + s * ab, x);
    if (d < best) {
      best = d;
      tri = be.triangle;
    }
  }
  if (tri < 0) throw Error(ErrorKind::InvalidInput, "side index out of range");
  const Vec2 g = f.gradient(static_cast<std::size_t>(tri), x);
  return dot(g, g);
}

}  // namespace shapeflow
