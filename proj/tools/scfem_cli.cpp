// Command-line front end for the adaptive stochastic collocation solver.
// Talks to the solver exclusively through the C API of libscfem.
#include <cmath>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "scfem.h"

namespace {

int die(scfem_status status) {
  std::fprintf(stderr, "error (%s): %s\n", scfem_status_name(status),
               scfem_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive sparse-grid stochastic collocation FEM solver"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run the adaptive loop and write outputs");
  std::string problem, family, out_dir, config_file;
  double tol = 0.0, theta_x = 0.0, theta_y = 0.0, vartheta = 0.0;
  int m = 0, estimate_period = 0, max_iter = 0, lshape_cells = 0;
  bool quiet = false;

  run_cmd->add_option("--problem", problem, "problem name: cookie | fourier");
  run_cmd->add_option("--family", family, "collocation family: leja | cc");
  run_cmd->add_option("--tol", tol, "error tolerance for mu + tau");
  run_cmd->add_option("--m", m, "parameter-domain dimension");
  run_cmd->add_option("--theta-x", theta_x, "spatial Doerfler parameter");
  run_cmd->add_option("--theta-y", theta_y, "parametric Doerfler parameter");
  run_cmd->add_option("--vartheta", vartheta, "refinement-type threshold");
  run_cmd->add_option("--estimate-period", estimate_period,
                      "compute the error estimates every k-th iteration");
  run_cmd->add_option("--max-iter", max_iter, "iteration cap");
  run_cmd->add_option("--lshape-cells", lshape_cells,
                      "initial-mesh cells per unit square (fourier problem)");
  run_cmd->add_option("--out", out_dir, "output directory")->required();
  run_cmd->add_option("--config", config_file, "key=value config file (flags override)");
  run_cmd->add_flag("--quiet", quiet, "suppress per-iteration progress lines");

  CLI11_PARSE(app, argc, argv);

  scfem_config* config = scfem_config_create();
  if (!config) {
    std::fprintf(stderr, "error: out of memory\n");
    return 1;
  }
  scfem_status status = SCFEM_OK;
  auto set = [&](const char* key, const std::string& value) {
    if (status == SCFEM_OK && !value.empty())
      status = scfem_config_set(config, key, value.c_str());
  };
  auto full_precision = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  if (!config_file.empty()) status = scfem_config_load_file(config, config_file.c_str());
  set("problem", problem);
  set("family", family);
  if (run_cmd->count("--tol")) set("tol", full_precision(tol));
  if (run_cmd->count("--m")) set("m", std::to_string(m));
  if (run_cmd->count("--theta-x")) set("theta_x", full_precision(theta_x));
  if (run_cmd->count("--theta-y")) set("theta_y", full_precision(theta_y));
  if (run_cmd->count("--vartheta")) set("vartheta", full_precision(vartheta));
  if (run_cmd->count("--estimate-period"))
    set("estimate_period", std::to_string(estimate_period));
  if (run_cmd->count("--max-iter")) set("max_iter", std::to_string(max_iter));
  if (run_cmd->count("--lshape-cells")) set("lshape_cells", std::to_string(lshape_cells));
  set("out", out_dir);
  if (status != SCFEM_OK) {
    scfem_config_destroy(config);
    return die(status);
  }
  if ((status = scfem_config_validate(config)) != SCFEM_OK) {
    scfem_config_destroy(config);
    return die(status);
  }

  scfem_run* run = nullptr;
  status = scfem_run_execute(config, &run);
  scfem_config_destroy(config);
  if (status != SCFEM_OK && !run) return die(status);
  if (status != SCFEM_OK)
    std::fprintf(stderr, "run aborted (%s): %s\n", scfem_status_name(status),
                 scfem_last_error());

  const int n = scfem_run_iteration_count(run);
  if (!quiet) {
    for (int i = 0; i < n; ++i) {
      scfem_record rec;
      if (scfem_run_get_record(run, i, &rec) != SCFEM_OK) continue;
      std::printf("iter %3d  %-10s  dof %10lld  mu_bar %.6e  tau_bar %.6e  eta %.6e\n",
                  rec.iteration,
                  rec.refinement == SCFEM_REFINE_SPATIAL ? "spatial" : "parametric",
                  rec.dof, rec.mu_bar, rec.tau_bar, rec.eta);
    }
  }

  const scfem_status ws = scfem_run_write_outputs(run, out_dir.c_str());
  if (ws != SCFEM_OK) {
    scfem_run_destroy(run);
    return die(ws);
  }

  const scfem_termination term = scfem_run_termination(run);
  std::printf("%s after %d iterations; outputs in %s\n",
              term == SCFEM_TERMINATED_CONVERGED       ? "converged"
              : term == SCFEM_TERMINATED_MAX_ITERATIONS ? "stopped at max iterations"
                                                         : "aborted",
              n, out_dir.c_str());
  scfem_run_destroy(run);
  return (term == SCFEM_TERMINATED_CONVERGED || term == SCFEM_TERMINATED_MAX_ITERATIONS)
             ? (status == SCFEM_OK ? 0 : 1)
             : 1;
}
