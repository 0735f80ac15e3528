#include "scfem/fem.hpp"

#include <algorithm>
#include <vector>

#include <Eigen/IterativeLinearSolvers>

#include "scfem/errors.hpp"

namespace scfem {

namespace {

struct ElementGeometry {
  double area;
  double gx[3];  // gradient of the local hat functions
  double gy[3];
  double mx[3];  // edge midpoints, mid[k] opposite vertex k
  double my[3];
};

ElementGeometry element_geometry(const SimplexMesh& mesh, const std::array<int, 3>& t) {
  const auto& v = mesh.vertices();
  const double x0 = v[t[0]].x, y0 = v[t[0]].y;
  const double x1 = v[t[1]].x, y1 = v[t[1]].y;
  const double x2 = v[t[2]].x, y2 = v[t[2]].y;
  const double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
  ElementGeometry g;
  g.area = 0.5 * std::abs(det);
  // grad of barycentric coordinates
  g.gx[0] = (y1 - y2) / det;
  g.gy[0] = (x2 - x1) / det;
  g.gx[1] = (y2 - y0) / det;
  g.gy[1] = (x0 - x2) / det;
  g.gx[2] = (y0 - y1) / det;
  g.gy[2] = (x1 - x0) / det;
  g.mx[0] = 0.5 * (x1 + x2);
  g.my[0] = 0.5 * (y1 + y2);
  g.mx[1] = 0.5 * (x0 + x2);
  g.my[1] = 0.5 * (y0 + y2);
  g.mx[2] = 0.5 * (x0 + x1);
  g.my[2] = 0.5 * (y0 + y1);
  return g;
}

std::vector<int> interior_row_map(const SimplexMesh& mesh) {
  std::vector<int> row(mesh.vertex_count(), -1);
  const auto& interior = mesh.interior_vertices();
  for (std::size_t r = 0; r < interior.size(); ++r) row[interior[r]] = static_cast<int>(r);
  return row;
}

}  // namespace

FESystem assemble(const SimplexMesh& mesh, const SpatialFn& coefficient,
                  const SpatialFn& forcing) {
  const auto row = interior_row_map(mesh);
  const int n = static_cast<int>(mesh.interior_vertices().size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.triangle_count() * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  for (const auto& t : mesh.triangles()) {
    const ElementGeometry g = element_geometry(mesh, t);
    const double w = g.area / 3.0;
    double a_sum = 0.0;
    double fq[3];
    for (int q = 0; q < 3; ++q) {
      const double aq = coefficient(g.mx[q], g.my[q]);
      if (!(aq > 0.0))
        throw NumericsError("coefficient not positive at quadrature point (" +
                            std::to_string(g.mx[q]) + ", " + std::to_string(g.my[q]) + ")");
      a_sum += w * aq;
      fq[q] = forcing(g.mx[q], g.my[q]);
    }
    for (int i = 0; i < 3; ++i) {
      const int ri = row[t[i]];
      if (ri < 0) continue;
      // phi_i at midpoint q is 1/2 unless q is the midpoint opposite i
      double load = 0.0;
      for (int q = 0; q < 3; ++q)
        if (q != i) load += w * fq[q] * 0.5;
      rhs[ri] += load;
      for (int j = i; j < 3; ++j) {
        const int rj = row[t[j]];
        if (rj < 0) continue;
        const double k = a_sum * (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]);
        triplets.emplace_back(ri, rj, k);
        if (j != i) triplets.emplace_back(rj, ri, k);
      }
    }
  }
  FESystem sys;
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.rhs = std::move(rhs);
  sys.mesh_id = mesh.id();
  return sys;
}

Eigen::VectorXd assemble_load(const SimplexMesh& mesh, const SpatialFn& forcing) {
  const auto row = interior_row_map(mesh);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mesh.interior_vertices().size());
  for (const auto& t : mesh.triangles()) {
    const ElementGeometry g = element_geometry(mesh, t);
    const double w = g.area / 3.0;
    double fq[3];
    for (int q = 0; q < 3; ++q) fq[q] = forcing(g.mx[q], g.my[q]);
    for (int i = 0; i < 3; ++i) {
      const int ri = row[t[i]];
      if (ri < 0) continue;
      for (int q = 0; q < 3; ++q)
        if (q != i) rhs[ri] += w * fq[q] * 0.5;
    }
  }
  return rhs;
}

FEFunction solve(const FESystem& system) {
  FEFunction u;
  u.mesh_id = system.mesh_id;
  const Eigen::Index n = system.rhs.size();
  if (n == 0) {
    u.values.resize(0);
    return u;
  }
  if (system.rhs.norm() == 0.0) {
    u.values = Eigen::VectorXd::Zero(n);
    return u;
  }
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(20 * n);
  cg.compute(system.matrix);
  u.values = cg.solve(system.rhs);
  if (cg.info() != Eigen::Success)
    throw NumericsError("CG did not converge after " + std::to_string(cg.iterations()) +
                        " iterations (error " + std::to_string(cg.error()) + ")");
  return u;
}

Eigen::SparseMatrix<double> laplace_stiffness(const SimplexMesh& mesh) {
  return assemble(mesh, [](double, double) { return 1.0; },
                  [](double, double) { return 0.0; })
      .matrix;
}

double x_inner(const Eigen::SparseMatrix<double>& laplace, const FEFunction& u,
               const FEFunction& v) {
  if (u.mesh_id != v.mesh_id) throw ContractError("x_inner: mesh mismatch");
  if (u.values.size() != laplace.rows() || v.values.size() != laplace.rows())
    throw ContractError("x_inner: dimension mismatch");
  return u.values.dot(laplace * v.values);
}

double x_inner(const SimplexMesh& mesh, const FEFunction& u, const FEFunction& v) {
  if (u.mesh_id != mesh.id() || v.mesh_id != mesh.id())
    throw ContractError("x_inner: functions do not live on this mesh");
  return x_inner(laplace_stiffness(mesh), u, v);
}

FEFunction prolong(const SimplexMesh& coarse, const SimplexMesh& fine,
                   const FEFunction& u) {
  if (u.mesh_id != coarse.id()) throw ContractError("prolong: wrong source mesh");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(coarse.vertex_count());
  const auto& ci = coarse.interior_vertices();
  for (std::size_t r = 0; r < ci.size(); ++r) full[ci[r]] = u.values[r];
  const Eigen::VectorXd fine_full = prolong_full(coarse, fine, full);
  FEFunction out;
  out.mesh_id = fine.id();
  const auto& fi = fine.interior_vertices();
  out.values.resize(fi.size());
  for (std::size_t r = 0; r < fi.size(); ++r) out.values[r] = fine_full[fi[r]];
  return out;
}

double residual_against_fine_hat(const SimplexMesh& mesh, const SpatialFn& coefficient,
                                 const SpatialFn& forcing, const FEFunction& u, int xi) {
  const auto fine = mesh.refined();
  if (xi < static_cast<int>(mesh.vertex_count()) ||
      xi >= static_cast<int>(fine->vertex_count()) || fine->vertices()[xi].boundary)
    throw ContractError("residual_against_fine_hat: xi is not a new interior vertex");
  if (u.mesh_id != mesh.id())
    throw ContractError("residual_against_fine_hat: sample on wrong mesh");

  // full nodal values of u on the fine mesh (gradient is constant per coarse
  // element, and the embedding is exact)
  Eigen::VectorXd coarse_full = Eigen::VectorXd::Zero(mesh.vertex_count());
  const auto& ci = mesh.interior_vertices();
  for (std::size_t r = 0; r < ci.size(); ++r) coarse_full[ci[r]] = u.values[r];
  const Eigen::VectorXd ufine = prolong_full(mesh, *fine, coarse_full);

  double acc = 0.0;
  for (const auto& t : fine->triangles()) {
    int local = -1;
    for (int k = 0; k < 3; ++k)
      if (t[k] == xi) local = k;
    if (local < 0) continue;
    const ElementGeometry g = element_geometry(*fine, t);
    const double w = g.area / 3.0;
    // (f, phi_xi) over the element
    for (int q = 0; q < 3; ++q)
      if (q != local) acc += w * forcing(g.mx[q], g.my[q]) * 0.5;
    // (a grad u, grad phi_xi) over the element
    double ux = 0.0, uy = 0.0;
    for (int k = 0; k < 3; ++k) {
      ux += ufine[t[k]] * g.gx[k];
      uy += ufine[t[k]] * g.gy[k];
    }
    double a_sum = 0.0;
    for (int q = 0; q < 3; ++q) a_sum += w * coefficient(g.mx[q], g.my[q]);
    acc -= a_sum * (ux * g.gx[local] + uy * g.gy[local]);
  }
  return acc;
}

}  // namespace scfem
