#ifndef SCFEM_ESTIMATION_HPP
#define SCFEM_ESTIMATION_HPP

#include <span>
#include <vector>

#include "scfem/fem.hpp"
#include "scfem/problems.hpp"
#include "scfem/sparse_grid.hpp"

namespace scfem {

/// Two-level spatial indicators: for each collocation point z the scaled
/// residuals of the sample solution against the hat functions of the
/// uniformly refined mesh, plus their aggregate per-point value.
struct SpatialIndicators {
  std::vector<int> new_vertices;            // fine-mesh vertex ids (N+ of the mesh)
  std::vector<std::vector<double>> local;   // [z][xi], aligned with new_vertices
  std::vector<double> per_point;            // mu_z = sqrt(sum_xi mu_z(xi)^2)
};

SpatialIndicators spatial_indicators(const SimplexMesh& mesh,
                                     const ParametricProblem& problem,
                                     const SparseGrid& grid,
                                     std::span<const FEFunction> samples);

/// Mesh-level data shared by all per-point two-level computations: the
/// uniformly refined mesh, its Laplace stiffness, the load vector and the
/// hat-function norms at the new interior vertices.
struct TwoLevelContext {
  std::shared_ptr<const SimplexMesh> fine;
  Eigen::SparseMatrix<double> K_fine;
  Eigen::VectorXd load;
  std::vector<int> new_vertices;
  std::vector<int> rows;      // fine interior row per new vertex
  Eigen::VectorXd hat_norms;  // ||phi_hat_xi||_X per new vertex
};

TwoLevelContext make_two_level_context(const SimplexMesh& mesh,
                                       const ParametricProblem& problem);

/// Local indicators mu_z(xi) for one collocation point, aligned with
/// ctx.new_vertices.
std::vector<double> spatial_indicator_point(const TwoLevelContext& ctx,
                                            const SimplexMesh& mesh,
                                            const ParametricProblem& problem,
                                            std::span<const double> z,
                                            const FEFunction& sample);

/// Parametric indicators over the reduced margin of I, computed from
/// solutions at the points of the enriched grid (I plus its margin).
struct ParametricIndicators {
  std::vector<MultiIndex> margin;
  std::vector<double> tau;  // aligned with margin

  double total() const {
    double s = 0.0;
    for (double t : tau) s += t;
    return s;
  }
};

/// Norms are Bochner L2_pi(Gamma; X) norms; the X-gram of the samples is
/// taken with the stiffness K of the mesh the samples live on.
ParametricIndicators parametric_indicators(const IndexSet& I, NodeFamily family,
                                           const SparseGrid& enriched_grid,
                                           std::span<const FEFunction> samples,
                                           const Eigen::SparseMatrix<double>& K);

/// Spatial error estimate mu = || S (U_hat - U) ||: prolongs each sample to
/// the fine mesh, pairs the differences through the parametric Gram matrix.
double spatial_estimate(const SparseGrid& grid, const SimplexMesh& mesh,
                        const SimplexMesh& fine_mesh,
                        std::span<const FEFunction> fine_samples,
                        std::span<const FEFunction> samples,
                        const Eigen::SparseMatrix<double>& K_fine);

/// Parametric error estimate tau = || sum over the margin of the surplus
/// blocks || (norm of the sum, not the sum of norms).
double parametric_estimate(const IndexSet& I, NodeFamily family,
                           const SparseGrid& enriched_grid,
                           std::span<const FEFunction> samples,
                           const Eigen::SparseMatrix<double>& K);

/// Weighted indicator sums driving the marking comparison:
///   mu_bar = sum_z mu_z ||L_z||,  tau_bar = sum_nu tau_nu,
/// with ||L_z|| = sqrt of the diagonal of the grid's Lagrange Gram matrix.
std::pair<double, double> weighted_sums(std::span<const double> mu_per_point,
                                        std::span<const double> lambda_diag,
                                        const ParametricIndicators& parametric);

/// Diagnostic variant of the parametric indicators computed from samples on
/// an arbitrary (current or refined) mesh; not used for marking.
ParametricIndicators alt_parametric_indicators(const IndexSet& I, NodeFamily family,
                                               const SparseGrid& enriched_grid,
                                               std::span<const FEFunction> samples,
                                               const Eigen::SparseMatrix<double>& K);

}  // namespace scfem

#endif
