#ifndef SCFEM_OUTPUTS_HPP
#define SCFEM_OUTPUTS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scfem/config.hpp"
#include "scfem/driver.hpp"
#include "scfem/mesh.hpp"
#include "scfem/problems.hpp"

namespace scfem {

/// Writes the convergence table. Header:
///   iter,type,dof,dof_total_vertices,mu_bar,tau_bar,mu,tau,eta,n_colpts,n_triangles,wall_ms
/// One row per iteration, floating-point columns in %.12e format.
void write_csv(std::span<const IterationRecord> records, const std::string& path);

/// Reads a table written by write_csv.
std::vector<IterationRecord> read_csv(const std::string& path);

/// Self-contained log-log SVG convergence plot (dof vs eta/mu/tau plus the
/// weighted sums); requires at least two records.
void emit_svg_plot(std::span<const IterationRecord> records, const std::string& path);

/// Plain-text mesh snapshot:
///   line 1:  <vertex count> <triangle count>
///   then one vertex per line "x y boundary_flag" (%.17g coordinates),
///   then one triangle per line "i j k" (0-based, reference edge = (i, j)).
void snapshot_mesh(const SimplexMesh& mesh, const std::string& path);

/// Reads a snapshot back into a root mesh (refinement history is not part of
/// the format).
std::shared_ptr<const SimplexMesh> read_mesh(const std::string& path);

/// Outcome of the per-problem hypothesis check, reported in the manifest.
struct HypothesisReport {
  std::string kind;  // "uniform_ellipticity" | "derivative_bound"
  bool pass = false;
  double r = 0.0;                  // ellipticity margin (affine problems)
  std::vector<double> delta;       // admissible delta vector (nonaffine)
};

HypothesisReport run_hypothesis_check(const ParametricProblem& problem);

/// JSON run manifest: configuration echo, per-iteration records, termination
/// status, totals and the hypothesis check.
void write_manifest(const RunConfig& config, const RunResult& result,
                    const HypothesisReport& hypothesis, const std::string& path,
                    const std::string& config_source = {});

}  // namespace scfem

#endif
