#include "scfem/problems.hpp"

#include <cmath>

#include "scfem/errors.hpp"

namespace scfem {

SpatialFn ParametricProblem::sample(std::vector<double> y) const {
  if (static_cast<int>(y.size()) != M)
    throw ContractError("coefficient sample: parameter dimension mismatch");
  auto coeff = coefficient;
  return [coeff, y = std::move(y)](double x1, double x2) {
    return coeff(x1, x2, y);
  };
}

namespace {

struct Box {
  double x_lo, x_hi, y_lo, y_hi;
  // half-open membership keeps the characteristic functions well defined on
  // shared boundaries
  bool contains(double x, double y) const {
    return x >= x_lo && x < x_hi && y >= y_lo && y < y_hi;
  }
};

// Subdomain squares of the first test case, row by row from the bottom; the
// center square carries the forcing.
constexpr double kLo[3] = {0.1, 0.4, 0.7};
constexpr double kHi[3] = {0.3, 0.6, 0.9};

std::vector<Box> cookie_boxes() {
  // A1..A8 skip the center (row 1, col 1)
  std::vector<Box> boxes;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col)
      if (!(row == 1 && col == 1))
        boxes.push_back({kLo[col], kHi[col], kLo[row], kHi[row]});
  return boxes;
}

}  // namespace

ParametricProblem cookie_problem() {
  ParametricProblem p;
  p.name = "cookie";
  p.M = 8;
  const std::vector<double> omega{1.0, 0.8, 0.4, 0.2, 0.1, 0.05, 0.02, 0.01};
  const auto boxes = cookie_boxes();
  const Box center{kLo[1], kHi[1], kLo[1], kHi[1]};

  p.coefficient = [boxes, omega](double x1, double x2, std::span<const double> y) {
    double a = 1.1;
    for (std::size_t m = 0; m < boxes.size(); ++m)
      if (boxes[m].contains(x1, x2)) a += omega[m] * y[m];
    return a;
  };
  p.forcing = [center](double x1, double x2) {
    return center.contains(x1, x2) ? 100.0 : 0.0;
  };
  p.initial_mesh = [] { return unit_square_mesh(8); };
  p.a_min = 0.1;
  p.a_max = 2.1;
  p.affine = true;
  p.a0 = [](double, double) { return 1.1; };
  for (std::size_t m = 0; m < boxes.size(); ++m) {
    const Box b = boxes[m];
    const double w = omega[m];
    p.affine_terms.push_back(
        [b, w](double x1, double x2) { return b.contains(x1, x2) ? w : 0.0; });
  }
  return p;
}

ParametricProblem fourier_exp_problem(int M, int cells) {
  if (M < 1) throw ContractError("fourier_exp_problem: M must be >= 1");
  ParametricProblem p;
  p.name = "fourier";
  p.M = M;
  p.alphas.resize(M);
  std::vector<double> beta1(M), beta2(M);
  for (int m = 1; m <= M; ++m) {
    p.alphas[m - 1] = (m == 1) ? 0.498 : 0.547 / m;
    const int k = static_cast<int>(std::floor(-0.5 + std::sqrt(0.25 + 2.0 * m)));
    beta1[m - 1] = m - k * (k + 1) / 2;
    beta2[m - 1] = k - beta1[m - 1];
  }
  const std::vector<double> alphas = p.alphas;
  p.coefficient = [alphas, beta1, beta2, M](double x1, double x2,
                                            std::span<const double> y) {
    double h = 1.0;  // h0
    for (int m = 0; m < M; ++m)
      h += alphas[m] * std::cos(2.0 * M_PI * beta1[m] * x1) *
           std::cos(2.0 * M_PI * beta2[m] * x2) * y[m];
    return std::exp(h);
  };
  p.forcing = [](double, double) { return 1.0; };
  p.initial_mesh = [cells] { return l_shape_mesh(cells); };
  double alpha_sum = 0.0;
  for (double a : p.alphas) alpha_sum += a;
  p.a_min = std::exp(1.0 - alpha_sum);
  p.a_max = std::exp(1.0 + alpha_sum);
  return p;
}

EllipticityReport check_uniform_ellipticity(const ParametricProblem& problem,
                                            int grid_n) {
  if (!problem.affine)
    throw ContractError("ellipticity check requires an affine coefficient");
  // sample points: dense grid over the bounding box of the initial mesh plus
  // the subdomain corner pattern (both sides of every breakpoint)
  const auto mesh = problem.initial_mesh();
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const auto& v : mesh->vertices()) {
    x_lo = std::min(x_lo, v.x);
    x_hi = std::max(x_hi, v.x);
    y_lo = std::min(y_lo, v.y);
    y_hi = std::max(y_hi, v.y);
  }
  auto slack = [&](double x, double y) {
    double s = problem.a0(x, y);
    for (const auto& term : problem.affine_terms) s -= std::abs(term(x, y));
    return s;
  };
  double r = 1e300;
  for (int i = 0; i <= grid_n; ++i) {
    for (int j = 0; j <= grid_n; ++j) {
      const double x = x_lo + (x_hi - x_lo) * i / grid_n;
      const double y = y_lo + (y_hi - y_lo) * j / grid_n;
      r = std::min(r, slack(x, y));
    }
  }
  const double eps = 1e-9;
  const double breaks[6] = {kLo[0], kLo[1], kLo[2], kHi[0], kHi[1], kHi[2]};
  for (double bx : breaks)
    for (double by : breaks)
      for (double dx : {-eps, eps})
        for (double dy : {-eps, eps}) r = std::min(r, slack(bx + dx, by + dy));
  EllipticityReport report;
  report.r = r;
  report.pass = r > 0.0;
  return report;
}

std::optional<std::vector<double>> check_fourier_derivative_bound(
    const ParametricProblem& problem, int k_max) {
  if (problem.alphas.empty())
    throw ContractError("derivative bound check requires amplitude data");
  const int M = problem.M;
  std::vector<double> delta(M);
  for (int m = 0; m < M; ++m) {
    delta[m] = 1.0 / (2.0 * problem.alphas[m]);
    if (!(delta[m] > 1.0)) return std::nullopt;
  }
  // verify prod alpha_m^{k_m} <= prod (2 delta_m)^{-k_m} * k!  over all
  // multi-orders with 1 <= |k|_1 <= k_max
  std::vector<int> k(M, 0);
  while (true) {
    int m = M - 1;
    while (m >= 0) {
      if (++k[m] <= k_max) break;
      k[m] = 0;
      --m;
    }
    if (m < 0) break;
    int total = 0;
    for (int v : k) total += v;
    if (total < 1 || total > k_max) continue;
    double lhs = 1.0, rhs = 1.0;
    for (int d = 0; d < M; ++d) {
      lhs *= std::pow(problem.alphas[d], k[d]);
      rhs *= std::pow(2.0 * delta[d], -k[d]);
      for (int f = 2; f <= k[d]; ++f) rhs *= f;
    }
    if (lhs > rhs * (1.0 + 1e-12)) return std::nullopt;
  }
  return delta;
}

}  // namespace scfem
