#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "shapeflow/mesh.hpp"

namespace shapeflow {

/// Lagrange degrees of freedom (P1 or P2) over a mesh. P2 numbers vertex
/// dofs first, then one dof per edge.
class DofMap {
 public:
  DofMap(const Mesh& mesh, int degree);

  int degree() const { return degree_; }
  int dofs_per_triangle() const { return degree_ == 1 ? 3 : 6; }
  std::size_t num_dofs() const { return coords_.size(); }
  /// Local order: v0, v1, v2, then (P2) e01, e12, e20.
  const std::array<int, 6>& triangle_dofs(std::size_t t) const { return tri_dofs_[t]; }
  Vec2 coord(std::size_t dof) const { return coords_[dof]; }
  bool on_boundary(std::size_t dof) const { return boundary_[dof]; }
  /// Compact index among interior dofs, -1 for Dirichlet dofs.
  int interior_index(std::size_t dof) const { return interior_[dof]; }
  std::size_t num_interior() const { return num_interior_; }

 private:
  int degree_;
  std::vector<std::array<int, 6>> tri_dofs_;
  std::vector<Vec2> coords_;
  std::vector<bool> boundary_;
  std::vector<int> interior_;
  std::size_t num_interior_ = 0;
};

enum class FieldRole { Torsion, Eigenfunction };

/// A finite-element function bound to a mesh, zero on the boundary.
struct Field {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DofMap> dofs;
  Eigen::VectorXd values;  // one per dof
  FieldRole role = FieldRole::Torsion;

  int degree() const { return dofs->degree(); }
  double value(std::size_t triangle, Vec2 x) const;
  Vec2 gradient(std::size_t triangle, Vec2 x) const;
  /// Smallest value over interior dofs.
  double min_interior_value() const;
};

struct EigenResult {
  double lambda1 = 0.0;
  Field field;
  /// ||K v - lambda M v|| / ||M v|| on the interior dofs.
  double residual = 0.0;
  int iterations = 0;
};

struct EigenOptions {
  int max_iterations = 500;
  /// Stop once successive Rayleigh quotients differ by less than this
  /// (relative) and the residual is below `residual_tol`.
  double rq_tol = 1e-12;
  double residual_tol = 1e-8;
};

/// Assembled stiffness/mass pair and load vector on the interior dofs. The
/// stiffness factorization is shared by the torsion and eigenvalue solves.
class FemProblem {
 public:
  FemProblem(std::shared_ptr<const Mesh> mesh, int degree = 2);
  FemProblem(const FemProblem&) = delete;
  FemProblem& operator=(const FemProblem&) = delete;
  ~FemProblem();

  const Mesh& mesh() const { return *mesh_; }
  const DofMap& dofs() const { return *dofs_; }
  const Eigen::SparseMatrix<double>& stiffness() const { return k_; }
  const Eigen::SparseMatrix<double>& mass() const { return m_; }
  const Eigen::VectorXd& load() const { return f_; }

  /// Galerkin solution of -Lap u = 1, u = 0 on the boundary. Throws
  /// `SolveFailure` when the solve stagnates or the interior values are not
  /// all positive.
  Field torsion();
  /// Smallest Dirichlet eigenpair with int v^2 = 1 and v > 0 at the interior
  /// dof nearest the area centroid.
  EigenResult principal_eigen(const EigenOptions& opts = {});

  /// Full-length dof vector from interior values.
  Eigen::VectorXd expand(const Eigen::VectorXd& interior) const;

 private:
  struct Factor;
  Eigen::VectorXd solve_stiffness(const Eigen::VectorXd& rhs);

  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const DofMap> dofs_;
  Eigen::SparseMatrix<double> k_, m_;
  Eigen::VectorXd f_;  // interior load
  Eigen::VectorXd f_full_;
  std::unique_ptr<Factor> factor_;
};

Field solve_torsion(const Mesh& mesh, int degree = 2);
EigenResult solve_principal_eigen(const Mesh& mesh, int degree = 2, const EigenOptions& opts = {});

/// Exact integral of a field (torsional rigidity for the torsion role).
double integrate(const Field& f);

struct TracePoint {
  Vec2 x;
  Vec2 normal;  // unit outer normal
  double grad_sq = 0.0;
  double weight = 0.0;  // arclength quadrature weight
  int side = 0;
};

/// Squared gradient sampled at Gauss points of every boundary edge, taken
/// from the adjacent triangle.
struct BoundaryTrace {
  std::vector<TracePoint> points;
  std::vector<std::string> tags;  // per polygon side
  std::vector<double> side_lengths;
  FieldRole role = FieldRole::Torsion;

  /// Throws `UnknownTag`.
  int side_index(std::string_view tag) const;
};

/// Three-point Gauss rule per boundary edge.
BoundaryTrace boundary_flux_sq(const Field& f);

/// |grad f|^2 at a point on polygon side `side`, from the adjacent triangle.
double boundary_gradient_sq(const Field& f, int side, Vec2 x);

}  // namespace shapeflow
