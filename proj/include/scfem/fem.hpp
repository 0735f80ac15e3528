#ifndef SCFEM_FEM_HPP
#define SCFEM_FEM_HPP

#include <functional>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "scfem/mesh.hpp"

namespace scfem {

/// Scalar field on the spatial domain.
using SpatialFn = std::function<double(double, double)>;

/// P1 function with homogeneous Dirichlet data: interior nodal values only,
/// ordered like SimplexMesh::interior_vertices().
struct FEFunction {
  Eigen::VectorXd values;
  int mesh_id = -1;
};

/// Assembled Galerkin system for one coefficient sample, interior rows and
/// columns only (Dirichlet elimination keeps the matrix SPD).
struct FESystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  int mesh_id = -1;
};

/// Element-wise assembly with the 3-point edge-midpoint quadrature rule
/// (exact for quadratics). Throws NumericsError if the coefficient is not
/// strictly positive at a quadrature point.
FESystem assemble(const SimplexMesh& mesh, const SpatialFn& coefficient,
                  const SpatialFn& forcing);

/// Load vector only (coefficient-independent part of the assembly).
Eigen::VectorXd assemble_load(const SimplexMesh& mesh, const SpatialFn& forcing);

/// Diagonally preconditioned CG, relative tolerance 1e-12, at most 20 n
/// iterations. A zero right-hand side returns the zero function.
FEFunction solve(const FESystem& system);

/// Stiffness matrix for unit coefficient; its quadratic form is the squared
/// X-norm (the H1_0 seminorm).
Eigen::SparseMatrix<double> laplace_stiffness(const SimplexMesh& mesh);

double x_inner(const Eigen::SparseMatrix<double>& laplace, const FEFunction& u,
               const FEFunction& v);

/// Convenience overload assembling the Laplace matrix on the fly.
double x_inner(const SimplexMesh& mesh, const FEFunction& u, const FEFunction& v);

/// Interior values on `fine` of the P1 embedding of u (exact prolongation).
FEFunction prolong(const SimplexMesh& coarse, const SimplexMesh& fine,
                   const FEFunction& u);

/// Residual of u against a hat function of the uniformly refined mesh:
///   (f, phi_hat_xi) - (a grad u, grad phi_hat_xi),
/// computed by patch-local quadrature on the children elements.
/// xi is a fine-mesh vertex id from mesh.new_interior_vertices().
double residual_against_fine_hat(const SimplexMesh& mesh, const SpatialFn& coefficient,
                                 const SpatialFn& forcing, const FEFunction& u, int xi);

}  // namespace scfem

#endif
