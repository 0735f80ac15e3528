#include "scfem/driver.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <thread>
#include <cmath>
#include <numeric>

#include "scfem/errors.hpp"

namespace scfem {

const char* refinement_name(RefinementType t) {
  return t == RefinementType::Spatial ? "spatial" : "parametric";
}

std::vector<int> doerfler_spatial(std::span<const double> squared_values,
                                  double total_sq, double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw ContractError("doerfler_spatial: theta must be in (0, 1]");
  std::vector<int> order(squared_values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return squared_values[a] > squared_values[b];
  });
  std::vector<int> marked;
  double acc = 0.0;
  const double target = theta * total_sq;
  for (int k : order) {
    if (acc >= target) break;
    if (squared_values[k] <= 0.0) break;  // zeros can no longer help
    marked.push_back(k);
    acc += squared_values[k];
  }
  // rounding slack covers theta = 1 with an externally accumulated total
  if (acc < target && target - acc > 1e-12 * std::max(1.0, target))
    throw ContractError("doerfler_spatial: total exceeds the sum of the entries");
  std::sort(marked.begin(), marked.end());
  return marked;
}

std::vector<std::size_t> doerfler_parametric(std::span<const double> values,
                                             double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw ContractError("doerfler_parametric: theta must be in (0, 1]");
  double total = 0.0;
  for (double v : values) total += v;
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<std::size_t> marked;
  double acc = 0.0;
  const double target = theta * total;
  for (std::size_t k : order) {
    if (acc >= target) break;
    if (values[k] <= 0.0) break;
    marked.push_back(k);
    acc += values[k];
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

std::optional<MultiIndex> select_nu_star(std::span<const MultiIndex> candidates) {
  if (candidates.empty()) return std::nullopt;
  const MultiIndex* best = &candidates[0];
  for (const auto& nu : candidates) {
    const int bn = one_norm(*best), nn = one_norm(nu);
    if (nn < bn || (nn == bn && nu < *best)) best = &nu;
  }
  return *best;
}

RefinementType choose_refinement(double mu_bar, double tau_bar, double vartheta) {
  return mu_bar >= vartheta * tau_bar ? RefinementType::Spatial
                                      : RefinementType::Parametric;
}

AdaptiveState make_state(const ParametricProblem& problem, const RunConfig& config) {
  AdaptiveState s;
  s.problem = problem;
  s.config = config;
  s.family = config.family == "cc" ? NodeFamily::ClenshawCurtis : NodeFamily::Leja;
  s.index_set = IndexSet(problem.M);
  s.mesh0 = problem.initial_mesh();
  s.mesh = s.mesh0;
  s.K0 = laplace_stiffness(*s.mesh0);
  return s;
}

namespace {

struct Marking {
  RefinementType type = RefinementType::Spatial;
  std::vector<int> vertices;  // union over collocation points
  std::vector<MultiIndex> indices;
  std::optional<MultiIndex> nu_star;
};

// The two-level context and the indicator values survive across parametric
// iterations, which keep the mesh (and hence the samples) unchanged.
void refresh_scratch(AdaptiveState& state) {
  if (state.scratch_mesh_id != state.mesh->id()) {
    state.scratch_mesh_id = state.mesh->id();
    state.two_level = make_two_level_context(*state.mesh, state.problem);
    state.indicator_cache.clear();
  }
}

// Statically partitioned worker pool; each job writes only its own slots, so
// results are identical to the serial order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Solves every grid point missing from the cache (in parallel) and returns
// the samples in grid order.
std::vector<FEFunction> ensure_solves(std::map<PointKey, FEFunction>& cache,
                                      const SimplexMesh& mesh,
                                      const ParametricProblem& problem,
                                      const SparseGrid& grid, long long& counter) {
  std::vector<std::size_t> missing;
  for (std::size_t z = 0; z < grid.size(); ++z)
    if (!cache.count(grid.points()[z])) missing.push_back(z);
  std::vector<FEFunction> fresh(missing.size());
  parallel_for(missing.size(), [&](std::size_t i) {
    const std::size_t z = missing[i];
    fresh[i] = solve(assemble(mesh, problem.sample(grid.coords(z)), problem.forcing));
  });
  for (std::size_t i = 0; i < missing.size(); ++i)
    cache.emplace(grid.points()[missing[i]], std::move(fresh[i]));
  counter += static_cast<long long>(missing.size());
  std::vector<FEFunction> samples;
  samples.reserve(grid.size());
  for (std::size_t z = 0; z < grid.size(); ++z)
    samples.push_back(cache.at(grid.points()[z]));
  return samples;
}

IterationRecord analyze(AdaptiveState& state, Marking& marking, StepTrace* trace) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig& cfg = state.config;
  refresh_scratch(state);

  // Galerkin solves on the current mesh at the current grid
  const auto grid = build_grid(state.index_set, state.family);
  const std::vector<FEFunction> samples = ensure_solves(
      state.current_cache, *state.mesh, state.problem, *grid, state.counters.current);

  // two-level spatial indicators (cached per point while the mesh lasts)
  SpatialIndicators spatial;
  spatial.new_vertices = state.two_level.new_vertices;
  spatial.local.resize(grid->size());
  spatial.per_point.resize(grid->size());
  {
    std::vector<std::size_t> missing;
    for (std::size_t z = 0; z < grid->size(); ++z)
      if (!state.indicator_cache.count(grid->points()[z])) missing.push_back(z);
    std::vector<std::vector<double>> fresh(missing.size());
    parallel_for(missing.size(), [&](std::size_t i) {
      const std::size_t z = missing[i];
      fresh[i] = spatial_indicator_point(state.two_level, *state.mesh, state.problem,
                                         grid->coords(z), samples[z]);
    });
    for (std::size_t i = 0; i < missing.size(); ++i)
      state.indicator_cache.emplace(grid->points()[missing[i]], std::move(fresh[i]));
  }
  for (std::size_t z = 0; z < grid->size(); ++z) {
    spatial.local[z] = state.indicator_cache.at(grid->points()[z]);
    double sum_sq = 0.0;
    for (double v : spatial.local[z]) sum_sq += v * v;
    spatial.per_point[z] = std::sqrt(sum_sq);
  }

  // coarsest-mesh solves at the enriched grid (new points only)
  const auto margin = reduced_margin(state.index_set);
  const IndexSet enriched = enrich(state.index_set, margin);
  const auto enriched_grid = build_grid(enriched, state.family);
  if (state.mesh->id() == state.mesh0->id()) {
    // the current mesh IS the coarse mesh; reuse its solutions
    for (const auto& [key, fn] : state.current_cache)
      state.coarse_cache.emplace(key, fn);
  }
  const std::vector<FEFunction> coarse_samples =
      ensure_solves(state.coarse_cache, *state.mesh0, state.problem, *enriched_grid,
                    state.counters.coarse);

  // parametric indicators on the reduced margin
  const ParametricIndicators parametric = parametric_indicators(
      state.index_set, state.family, *enriched_grid, coarse_samples, state.K0);

  // weighted sums for the marking comparison
  const SurplusExpansion expansion = expand_surpluses(grid);
  const Eigen::VectorXd lambda_diag = parametric_gram_diagonal(expansion);
  const auto [mu_bar, tau_bar] =
      weighted_sums(spatial.per_point, std::span<const double>(lambda_diag.data(),
                                                               lambda_diag.size()),
                    parametric);

  // error estimates (periodic; needed for the stopping test)
  double mu = std::nan(""), tau = std::nan("");
  if (state.iteration % cfg.estimate_period == 0) {
    const std::vector<FEFunction> fine_samples =
        ensure_solves(state.fine_cache, *state.two_level.fine, state.problem, *grid,
                      state.counters.fine);
    mu = spatial_estimate(*grid, *state.mesh, *state.two_level.fine, fine_samples,
                          samples, state.two_level.K_fine);
    tau = parametric_estimate(state.index_set, state.family, *enriched_grid,
                              coarse_samples, state.K0);
  }

  // marking: exactly one refinement type fires per iteration
  marking = Marking{};
  marking.type = choose_refinement(mu_bar, tau_bar, cfg.vartheta);
  std::vector<std::vector<int>> marked_per_point(grid->size());
  if (marking.type == RefinementType::Spatial) {
    std::vector<char> in_union(spatial.new_vertices.size(), 0);
    for (std::size_t z = 0; z < grid->size(); ++z) {
      std::vector<double> sq(spatial.local[z].size());
      double total_sq = 0.0;
      for (std::size_t k = 0; k < sq.size(); ++k) {
        sq[k] = spatial.local[z][k] * spatial.local[z][k];
        total_sq += sq[k];
      }
      const auto marked = doerfler_spatial(sq, total_sq, cfg.theta_x);
      for (int k : marked) {
        marked_per_point[z].push_back(spatial.new_vertices[k]);
        in_union[k] = 1;
      }
    }
    for (std::size_t k = 0; k < in_union.size(); ++k)
      if (in_union[k]) marking.vertices.push_back(spatial.new_vertices[k]);
  } else {
    const auto positions = doerfler_parametric(parametric.tau, cfg.theta_y);
    for (std::size_t p : positions) marking.indices.push_back(parametric.margin[p]);
    if (!marking.indices.empty()) {
      std::vector<MultiIndex> rest;
      for (const auto& nu : parametric.margin)
        if (std::find(marking.indices.begin(), marking.indices.end(), nu) ==
            marking.indices.end())
          rest.push_back(nu);
      marking.nu_star = select_nu_star(rest);
    }
  }

  IterationRecord rec;
  rec.iteration = state.iteration;
  rec.type = marking.type;
  rec.dof = static_cast<long long>(grid->size()) *
            static_cast<long long>(state.mesh->interior_vertices().size());
  rec.dof_total_vertices = static_cast<long long>(grid->size()) *
                           static_cast<long long>(state.mesh->vertex_count());
  rec.mu_bar = mu_bar;
  rec.tau_bar = tau_bar;
  rec.mu = mu;
  rec.tau = tau;
  rec.eta = mu + tau;
  rec.n_collocation_points = static_cast<int>(grid->size());
  rec.n_triangles = static_cast<int>(state.mesh->triangle_count());
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

  if (trace) {
    trace->points = grid->points();
    trace->spatial = spatial;
    trace->lambda_diag = lambda_diag;
    trace->parametric = parametric;
    trace->mu_bar = mu_bar;
    trace->tau_bar = tau_bar;
    trace->type = marking.type;
    trace->marked_vertices = marking.vertices;
    trace->marked_per_point = marked_per_point;
    trace->marked_indices = marking.indices;
    trace->nu_star = marking.nu_star;
  }
  return rec;
}

// Applies the selected refinement and advances the iteration counter.
void apply(AdaptiveState& state, const Marking& marking) {
  if (marking.type == RefinementType::Spatial) {
    if (!marking.vertices.empty()) {
      state.mesh = state.mesh->refine_with_marked(marking.vertices);
      state.current_cache.clear();
      state.fine_cache.clear();
    }
  } else {
    std::vector<MultiIndex> added = marking.indices;
    if (marking.nu_star) added.push_back(*marking.nu_star);
    state.index_set = enrich(state.index_set, added);
  }
  state.iteration += 1;
}

}  // namespace

IterationRecord step(AdaptiveState& state, StepTrace* trace) {
  Marking marking;
  IterationRecord rec = analyze(state, marking, trace);
  apply(state, marking);
  return rec;
}

RunResult run(const ParametricProblem& problem, const RunConfig& config) {
  RunResult result;
  AdaptiveState state = make_state(problem, config);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    while (true) {
      Marking marking;
      IterationRecord rec = analyze(state, marking, nullptr);
      result.records.push_back(rec);
      if (!std::isnan(rec.eta) && rec.eta < config.tolerance) {
        result.termination = Termination::Converged;
        break;
      }
      if (static_cast<int>(result.records.size()) >= config.max_iterations) {
        result.termination = Termination::MaxIterations;
        result.message = "max_iterations reached before the tolerance";
        break;
      }
      apply(state, marking);
    }
  } catch (const std::exception& e) {
    result.termination = Termination::Aborted;
    result.message = e.what();
  }
  result.final_mesh = state.mesh;
  result.final_index_set = state.index_set.indices();
  result.counters = state.counters;
  result.total_wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
  return result;
}

}  // namespace scfem
