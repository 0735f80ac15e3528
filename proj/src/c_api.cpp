#include "scfem.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "scfem/config.hpp"
#include "scfem/driver.hpp"
#include "scfem/errors.hpp"
#include "scfem/outputs.hpp"
#include "scfem/problems.hpp"

struct scfem_config {
  scfem::RunConfig config;
  std::string source;  // raw text of a loaded config file, echoed in manifests
};

struct scfem_run {
  scfem::RunConfig config;
  std::string config_source;
  scfem::RunResult result;
  scfem::HypothesisReport hypothesis;
};

namespace {

thread_local std::string g_last_error;

scfem_status fail(scfem_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class Fn>
scfem_status guarded(Fn&& fn) {
  try {
    fn();
    return SCFEM_OK;
  } catch (const scfem::ConfigError& e) {
    return fail(SCFEM_ERR_CONFIG, e.what());
  } catch (const scfem::ContractError& e) {
    return fail(SCFEM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const scfem::NumericsError& e) {
    return fail(SCFEM_ERR_NUMERICS, e.what());
  } catch (const scfem::IoError& e) {
    return fail(SCFEM_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(SCFEM_ERR_INTERNAL, e.what());
  }
}

scfem::ParametricProblem make_problem(const scfem::RunConfig& config) {
  if (config.problem == "cookie") {
    auto p = scfem::cookie_problem();
    if (config.effective_m() != p.M)
      throw scfem::ConfigError("the cookie problem has exactly 8 parameters");
    return p;
  }
  return scfem::fourier_exp_problem(config.effective_m(), config.lshape_cells);
}

}  // namespace

extern "C" {

const char* scfem_version(void) { return "1.0.0"; }

const char* scfem_status_name(scfem_status status) {
  switch (status) {
    case SCFEM_OK: return "ok";
    case SCFEM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SCFEM_ERR_CONFIG: return "invalid configuration";
    case SCFEM_ERR_NUMERICS: return "numerical failure";
    case SCFEM_ERR_IO: return "i/o failure";
    case SCFEM_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* scfem_last_error(void) { return g_last_error.c_str(); }

scfem_config* scfem_config_create(void) {
  try {
    return new scfem_config();
  } catch (...) {
    return nullptr;
  }
}

void scfem_config_destroy(scfem_config* config) { delete config; }

scfem_status scfem_config_set(scfem_config* config, const char* key, const char* value) {
  if (!config || !key || !value)
    return fail(SCFEM_ERR_INVALID_ARGUMENT, "null argument to scfem_config_set");
  return guarded([&] { scfem::apply_setting(config->config, key, value); });
}

scfem_status scfem_config_load_file(scfem_config* config, const char* path) {
  if (!config || !path)
    return fail(SCFEM_ERR_INVALID_ARGUMENT, "null argument to scfem_config_load_file");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw scfem::IoError(std::string("cannot open config file: ") + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    config->source = buffer.str();
    std::istringstream stream(config->source);
    config->config = scfem::parse_config(stream, config->config);
  });
}

scfem_status scfem_config_validate(const scfem_config* config) {
  if (!config) return fail(SCFEM_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] { (void)scfem::validate(config->config); });
}

scfem_status scfem_run_execute(const scfem_config* config, scfem_run** out) {
  if (!config || !out)
    return fail(SCFEM_ERR_INVALID_ARGUMENT, "null argument to scfem_run_execute");
  *out = nullptr;
  scfem::RunConfig validated;
  const scfem_status vs = guarded([&] { validated = scfem::validate(config->config); });
  if (vs != SCFEM_OK) return vs;

  auto run = std::make_unique<scfem_run>();
  run->config = validated;
  run->config_source = config->source;
  const scfem_status rs = guarded([&] {
    const auto problem = make_problem(validated);
    run->hypothesis = scfem::run_hypothesis_check(problem);
    run->result = scfem::run(problem, validated);
    if (run->result.termination == scfem::Termination::Aborted)
      throw scfem::NumericsError(run->result.message);
  });
  if (rs == SCFEM_OK || rs == SCFEM_ERR_NUMERICS) *out = run.release();
  return rs;
}

void scfem_run_destroy(scfem_run* run) { delete run; }

scfem_termination scfem_run_termination(const scfem_run* run) {
  if (!run) return SCFEM_TERMINATED_ABORTED;
  switch (run->result.termination) {
    case scfem::Termination::Converged: return SCFEM_TERMINATED_CONVERGED;
    case scfem::Termination::MaxIterations: return SCFEM_TERMINATED_MAX_ITERATIONS;
    case scfem::Termination::Aborted: break;
  }
  return SCFEM_TERMINATED_ABORTED;
}

int scfem_run_iteration_count(const scfem_run* run) {
  return run ? static_cast<int>(run->result.records.size()) : 0;
}

scfem_status scfem_run_get_record(const scfem_run* run, int index, scfem_record* out) {
  if (!run || !out) return fail(SCFEM_ERR_INVALID_ARGUMENT, "null argument");
  if (index < 0 || index >= static_cast<int>(run->result.records.size()))
    return fail(SCFEM_ERR_INVALID_ARGUMENT, "record index out of range");
  const auto& r = run->result.records[index];
  out->iteration = r.iteration;
  out->refinement = r.type == scfem::RefinementType::Spatial ? SCFEM_REFINE_SPATIAL
                                                             : SCFEM_REFINE_PARAMETRIC;
  out->dof = r.dof;
  out->dof_total_vertices = r.dof_total_vertices;
  out->mu_bar = r.mu_bar;
  out->tau_bar = r.tau_bar;
  out->mu = r.mu;
  out->tau = r.tau;
  out->eta = r.eta;
  out->n_collocation_points = r.n_collocation_points;
  out->n_triangles = r.n_triangles;
  out->wall_ms = r.wall_ms;
  return SCFEM_OK;
}

int scfem_run_hypothesis_pass(const scfem_run* run) {
  return run && run->hypothesis.pass ? 1 : 0;
}

scfem_status scfem_run_write_csv(const scfem_run* run, const char* path) {
  if (!run || !path) return fail(SCFEM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { scfem::write_csv(run->result.records, path); });
}

scfem_status scfem_run_write_manifest(const scfem_run* run, const char* path) {
  if (!run || !path) return fail(SCFEM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    scfem::write_manifest(run->config, run->result, run->hypothesis, path,
                          run->config_source);
  });
}

scfem_status scfem_run_write_svg(const scfem_run* run, const char* path) {
  if (!run || !path) return fail(SCFEM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { scfem::emit_svg_plot(run->result.records, path); });
}

scfem_status scfem_run_write_mesh(const scfem_run* run, const char* path) {
  if (!run || !path) return fail(SCFEM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (!run->result.final_mesh) throw scfem::ContractError("run has no final mesh");
    scfem::snapshot_mesh(*run->result.final_mesh, path);
  });
}

scfem_status scfem_run_write_outputs(const scfem_run* run, const char* dir) {
  if (!run || !dir) return fail(SCFEM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    namespace fs = std::filesystem;
    const fs::path base(dir);
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec) throw scfem::IoError("cannot create output directory: " + base.string());
    scfem::write_csv(run->result.records, (base / "run.csv").string());
    scfem::write_manifest(run->config, run->result, run->hypothesis,
                          (base / "manifest.json").string(), run->config_source);
    if (run->result.records.size() >= 2)
      scfem::emit_svg_plot(run->result.records, (base / "convergence.svg").string());
    if (run->result.final_mesh)
      scfem::snapshot_mesh(*run->result.final_mesh, (base / "mesh_final.txt").string());
  });
}

} /* extern "C" */
