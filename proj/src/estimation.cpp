#include "scfem/estimation.hpp"

#include <cmath>

#include "scfem/errors.hpp"

namespace scfem {

TwoLevelContext make_two_level_context(const SimplexMesh& mesh,
                                       const ParametricProblem& problem) {
  TwoLevelContext ctx;
  ctx.fine = mesh.refined();
  ctx.K_fine = laplace_stiffness(*ctx.fine);
  ctx.load = assemble_load(*ctx.fine, problem.forcing);
  ctx.new_vertices = mesh.new_interior_vertices();
  std::vector<int> fine_row(ctx.fine->vertex_count(), -1);
  const auto& fi = ctx.fine->interior_vertices();
  for (std::size_t r = 0; r < fi.size(); ++r) fine_row[fi[r]] = static_cast<int>(r);
  ctx.rows.resize(ctx.new_vertices.size());
  ctx.hat_norms.resize(ctx.new_vertices.size());
  const Eigen::VectorXd k_diag = ctx.K_fine.diagonal();
  for (std::size_t k = 0; k < ctx.new_vertices.size(); ++k) {
    ctx.rows[k] = fine_row[ctx.new_vertices[k]];
    ctx.hat_norms[k] = std::sqrt(k_diag[ctx.rows[k]]);
  }
  return ctx;
}

std::vector<double> spatial_indicator_point(const TwoLevelContext& ctx,
                                            const SimplexMesh& mesh,
                                            const ParametricProblem& problem,
                                            std::span<const double> z,
                                            const FEFunction& sample) {
  const auto a_z = problem.sample(std::vector<double>(z.begin(), z.end()));
  const FESystem fine_sys = assemble(*ctx.fine, a_z, problem.forcing);
  const FEFunction u_on_fine = prolong(mesh, *ctx.fine, sample);
  const Eigen::VectorXd residual = ctx.load - fine_sys.matrix * u_on_fine.values;
  std::vector<double> local(ctx.new_vertices.size());
  for (std::size_t k = 0; k < ctx.new_vertices.size(); ++k)
    local[k] = std::abs(residual[ctx.rows[k]]) / ctx.hat_norms[k];
  return local;
}

SpatialIndicators spatial_indicators(const SimplexMesh& mesh,
                                     const ParametricProblem& problem,
                                     const SparseGrid& grid,
                                     std::span<const FEFunction> samples) {
  if (samples.size() != grid.size())
    throw ContractError("spatial_indicators: one sample per collocation point");
  const TwoLevelContext ctx = make_two_level_context(mesh, problem);
  SpatialIndicators out;
  out.new_vertices = ctx.new_vertices;
  out.local.resize(grid.size());
  out.per_point.resize(grid.size());
  for (std::size_t z = 0; z < grid.size(); ++z) {
    out.local[z] = spatial_indicator_point(ctx, mesh, problem, grid.coords(z), samples[z]);
    double sum_sq = 0.0;
    for (double v : out.local[z]) sum_sq += v * v;
    out.per_point[z] = std::sqrt(sum_sq);
  }
  return out;
}

namespace {

void check_enriched_inputs(const IndexSet& I, const SparseGrid& enriched_grid,
                           std::span<const FEFunction> samples) {
  if (samples.size() != enriched_grid.size())
    throw ContractError("parametric indicators: one sample per enriched grid point");
  for (const auto& nu : I.indices())
    if (!enriched_grid.index_set().contains(nu))
      throw ContractError("parametric indicators: enriched grid does not cover I");
}

std::vector<Eigen::VectorXd> value_views(std::span<const FEFunction> samples) {
  std::vector<Eigen::VectorXd> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.values);
  return v;
}

ParametricIndicators margin_indicators(const IndexSet& I, NodeFamily family,
                                       const SparseGrid& enriched_grid,
                                       std::span<const FEFunction> samples,
                                       const Eigen::SparseMatrix<double>& K) {
  if (family != enriched_grid.family())
    throw ContractError("parametric indicators: family mismatch");
  check_enriched_inputs(I, enriched_grid, samples);
  ParametricIndicators out;
  out.margin = reduced_margin(I);
  auto grid_ptr = std::make_shared<SparseGrid>(enriched_grid);
  const SurplusExpansion expansion = expand_surpluses(grid_ptr);
  const auto values = value_views(samples);
  out.tau.resize(out.margin.size());
  for (std::size_t k = 0; k < out.margin.size(); ++k) {
    // the nu-block of the enriched expansion is Delta^{m(nu)} applied to the
    // interpolated data
    const SurplusExpansion block =
        restrict_to_indices(expansion, std::span<const MultiIndex>(&out.margin[k], 1));
    const Eigen::MatrixXd lambda = parametric_gram(block, block);
    out.tau[k] = std::sqrt(std::max(0.0, bochner_norm_sq(lambda, values, K)));
  }
  return out;
}

}  // namespace

ParametricIndicators parametric_indicators(const IndexSet& I, NodeFamily family,
                                           const SparseGrid& enriched_grid,
                                           std::span<const FEFunction> samples,
                                           const Eigen::SparseMatrix<double>& K) {
  return margin_indicators(I, family, enriched_grid, samples, K);
}

ParametricIndicators alt_parametric_indicators(const IndexSet& I, NodeFamily family,
                                               const SparseGrid& enriched_grid,
                                               std::span<const FEFunction> samples,
                                               const Eigen::SparseMatrix<double>& K) {
  return margin_indicators(I, family, enriched_grid, samples, K);
}

double spatial_estimate(const SparseGrid& grid, const SimplexMesh& mesh,
                        const SimplexMesh& fine_mesh,
                        std::span<const FEFunction> fine_samples,
                        std::span<const FEFunction> samples,
                        const Eigen::SparseMatrix<double>& K_fine) {
  if (fine_samples.size() != grid.size() || samples.size() != grid.size())
    throw ContractError("spatial_estimate: one sample pair per collocation point");
  auto grid_ptr = std::make_shared<SparseGrid>(grid);
  const SurplusExpansion expansion = expand_surpluses(grid_ptr);
  std::vector<Eigen::VectorXd> diffs;
  diffs.reserve(grid.size());
  for (std::size_t z = 0; z < grid.size(); ++z) {
    const FEFunction lifted = prolong(mesh, fine_mesh, samples[z]);
    diffs.push_back(fine_samples[z].values - lifted.values);
  }
  const Eigen::MatrixXd lambda = parametric_gram(expansion, expansion);
  return std::sqrt(std::max(0.0, bochner_norm_sq(lambda, diffs, K_fine)));
}

double parametric_estimate(const IndexSet& I, NodeFamily family,
                           const SparseGrid& enriched_grid,
                           std::span<const FEFunction> samples,
                           const Eigen::SparseMatrix<double>& K) {
  if (family != enriched_grid.family())
    throw ContractError("parametric_estimate: family mismatch");
  check_enriched_inputs(I, enriched_grid, samples);
  const auto margin = reduced_margin(I);
  auto grid_ptr = std::make_shared<SparseGrid>(enriched_grid);
  const SurplusExpansion expansion = expand_surpluses(grid_ptr);
  const SurplusExpansion block = restrict_to_indices(expansion, margin);
  const Eigen::MatrixXd lambda = parametric_gram(block, block);
  const auto values = value_views(samples);
  return std::sqrt(std::max(0.0, bochner_norm_sq(lambda, values, K)));
}

std::pair<double, double> weighted_sums(std::span<const double> mu_per_point,
                                        std::span<const double> lambda_diag,
                                        const ParametricIndicators& parametric) {
  if (mu_per_point.size() != lambda_diag.size())
    throw ContractError("weighted_sums: size mismatch");
  double mu_bar = 0.0;
  for (std::size_t z = 0; z < mu_per_point.size(); ++z)
    mu_bar += mu_per_point[z] * std::sqrt(std::max(0.0, lambda_diag[z]));
  return {mu_bar, parametric.total()};
}

}  // namespace scfem
