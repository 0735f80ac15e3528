#ifndef SCFEM_DRIVER_HPP
#define SCFEM_DRIVER_HPP

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scfem/config.hpp"
#include "scfem/estimation.hpp"
#include "scfem/fem.hpp"
#include "scfem/problems.hpp"
#include "scfem/sparse_grid.hpp"

namespace scfem {

enum class RefinementType { Spatial, Parametric };
const char* refinement_name(RefinementType t);

/// Minimal-cardinality subset reaching theta * total under the SQUARED-sum
/// criterion; entries are (key, value) with value = mu_z(xi), keys returned.
/// Ties resolve by the stable descending order (value, then smaller key).
std::vector<int> doerfler_spatial(std::span<const double> squared_values, double total_sq,
                                  double theta);

/// Minimal-cardinality subset of the margin reaching theta * total under the
/// PLAIN-sum criterion; returns positions into the indicator list.
std::vector<std::size_t> doerfler_parametric(std::span<const double> values, double theta);

/// argmin of ||.||_1 over the candidates, ties broken by lexicographic order;
/// nullopt when the candidate set is empty.
std::optional<MultiIndex> select_nu_star(std::span<const MultiIndex> candidates);

/// Spatial refinement iff mu_bar >= vartheta * tau_bar.
RefinementType choose_refinement(double mu_bar, double tau_bar, double vartheta);

struct IterationRecord {
  int iteration = 0;
  RefinementType type = RefinementType::Spatial;
  long long dof = 0;                 // |Colpts| x interior vertices
  long long dof_total_vertices = 0;  // |Colpts| x all vertices
  double mu_bar = 0.0;
  double tau_bar = 0.0;
  double mu = 0.0;   // NaN when skipped by estimate_period
  double tau = 0.0;  // NaN when skipped by estimate_period
  double eta = 0.0;  // mu + tau, NaN when skipped
  int n_collocation_points = 0;
  int n_triangles = 0;
  double wall_ms = 0.0;
};

/// Everything the marking step saw; exposed so tests can replay the marking
/// decisions from the logged indicator values.
struct StepTrace {
  std::vector<PointKey> points;
  SpatialIndicators spatial;
  Eigen::VectorXd lambda_diag;
  ParametricIndicators parametric;
  double mu_bar = 0.0;
  double tau_bar = 0.0;
  RefinementType type = RefinementType::Spatial;
  std::vector<int> marked_vertices;          // union over z
  std::vector<std::vector<int>> marked_per_point;
  std::vector<MultiIndex> marked_indices;
  std::optional<MultiIndex> nu_star;
};

struct SolveCounters {
  long long coarse = 0;
  long long current = 0;
  long long fine = 0;
};

/// Mutable loop state of the adaptive algorithm. Sample caches are keyed by
/// collocation point ordinals, so a value is reused whenever the mesh it was
/// computed on is still current.
struct AdaptiveState {
  ParametricProblem problem;
  RunConfig config;
  NodeFamily family = NodeFamily::Leja;
  int iteration = 0;
  IndexSet index_set{1};
  std::shared_ptr<const SimplexMesh> mesh;   // T_ell
  std::shared_ptr<const SimplexMesh> mesh0;  // T_0
  Eigen::SparseMatrix<double> K0;            // Laplace stiffness on T_0

  std::map<PointKey, FEFunction> coarse_cache;   // solutions on T_0 (kept forever)
  std::map<PointKey, FEFunction> current_cache;  // solutions on T_ell
  std::map<PointKey, FEFunction> fine_cache;     // solutions on refined T_ell

  // per-mesh scratch, rebuilt whenever the mesh changes
  int scratch_mesh_id = -1;
  TwoLevelContext two_level;
  std::map<PointKey, std::vector<double>> indicator_cache;

  SolveCounters counters;
};

AdaptiveState make_state(const ParametricProblem& problem, const RunConfig& config);

/// One full adaptive iteration: solves, indicators, estimates
/// (subject to estimate_period), marking and the state update. The returned
/// record describes the state BEFORE the refinement was applied.
IterationRecord step(AdaptiveState& state, StepTrace* trace = nullptr);

enum class Termination { Converged, MaxIterations, Aborted };

struct RunResult {
  std::vector<IterationRecord> records;
  Termination termination = Termination::MaxIterations;
  std::string message;
  std::shared_ptr<const SimplexMesh> final_mesh;
  std::vector<MultiIndex> final_index_set;
  SolveCounters counters;
  double total_wall_ms = 0.0;
};

/// Runs the adaptive loop until eta = mu + tau drops below the configured
/// tolerance or max_iterations is reached. Solver failures abort the run and
/// are reported in the result together with the partial history.
RunResult run(const ParametricProblem& problem, const RunConfig& config);

}  // namespace scfem

#endif
