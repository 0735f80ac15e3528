#ifndef SCFEM_CONFIG_HPP
#define SCFEM_CONFIG_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace scfem {

/// Fully deterministic run configuration (no seeds anywhere).
struct RunConfig {
  std::string problem;  // "cookie" | "fourier"
  std::string family;   // "leja" | "cc"; must be set explicitly
  int M = 0;            // 0 = per-problem default (8 cookie, 4 fourier)
  double tolerance = 2e-2;
  double theta_x = 0.3;
  double theta_y = 0.3;
  double vartheta = 1.0;
  int estimate_period = 1;
  int max_iterations = 200;
  int lshape_cells = 4;  // initial-mesh density knob of the fourier problem
  std::string out_dir;

  /// Effective parameter-domain dimension after defaults.
  int effective_m() const;

  /// key=value map mirroring the accepted config keys.
  std::map<std::string, std::string> as_map() const;
};

/// Applies one key=value setting; unknown keys or malformed values throw
/// ConfigError. Valid keys: problem, family, m, tol, theta_x, theta_y,
/// vartheta, estimate_period, max_iter, lshape_cells, out.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses a flat key=value stream ('#' starts a comment, blank lines are
/// skipped) on top of the given base configuration.
RunConfig parse_config(std::istream& in, RunConfig base = {});

/// Throws ConfigError listing every violated constraint; returns the config
/// with per-problem defaults resolved otherwise.
RunConfig validate(RunConfig config);

}  // namespace scfem

#endif
