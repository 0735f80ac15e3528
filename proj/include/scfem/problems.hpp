#ifndef SCFEM_PROBLEMS_HPP
#define SCFEM_PROBLEMS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scfem/fem.hpp"
#include "scfem/mesh.hpp"

namespace scfem {

/// Parametric diffusion problem -div(a(.,y) grad u) = f on D, u = 0 on dD,
/// with y ranging over [-1,1]^M under the uniform product measure.
struct ParametricProblem {
  std::string name;
  int M = 0;
  std::function<double(double, double, std::span<const double>)> coefficient;
  SpatialFn forcing;
  std::function<std::shared_ptr<const SimplexMesh>()> initial_mesh;
  double a_min = 0.0;  // analytic bounds where available
  double a_max = 0.0;

  // affine structure a = a0 + sum a_m y_m, exposed when it exists
  bool affine = false;
  SpatialFn a0;
  std::vector<SpatialFn> affine_terms;

  // amplitudes of the log-affine exponent field (nonaffine test problem)
  std::vector<double> alphas;

  /// Coefficient sample frozen at a parameter point.
  SpatialFn sample(std::vector<double> y) const;
};

/// Test problem with affine coefficient: nine 0.2 x 0.2 subdomains on the
/// unit square, forcing 100 on the center square, M = 8 amplitude-decaying
/// inclusion terms, 128-triangle initial mesh.
ParametricProblem cookie_problem();

/// Test problem with nonaffine coefficient exp(h) on the L-shape, h affine
/// with planar Fourier modes of increasing total order; f = 1.
/// `cells` controls the initial mesh density per unit square (2*cells^2
/// right triangles each).
ParametricProblem fourier_exp_problem(int M, int cells = 4);

struct EllipticityReport {
  double r = 0.0;  // inf_x (a0 - sum |a_m|)
  bool pass = false;
};

/// Hypothesis check for affine coefficients: estimates
/// r = inf_x (a0(x) - sum_m |a_m(x)|) on a dense grid plus subdomain-corner
/// sample points. Throws ContractError if the problem exposes no affine
/// structure.
EllipticityReport check_uniform_ellipticity(const ParametricProblem& problem,
                                            int grid_n = 1000);

/// Hypothesis check for the nonaffine problem: verifies
/// prod alpha_m^{k_m} <= (2 delta)^{-k} k! for all 1 <= |k|_1 <= k_max with
/// the candidate delta_m = 1/(2 alpha_m); returns the delta vector when it is
/// admissible (> 1 componentwise), nullopt otherwise.
std::optional<std::vector<double>> check_fourier_derivative_bound(
    const ParametricProblem& problem, int k_max);

}  // namespace scfem

#endif
