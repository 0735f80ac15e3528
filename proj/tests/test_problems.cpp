#include "doctest.h"

#include <cmath>
#include <random>

#include "scfem/errors.hpp"
#include "scfem/problems.hpp"

using namespace scfem;

TEST_CASE("cookie problem data") {
  const auto p = cookie_problem();
  CHECK(p.M == 8);
  CHECK(p.affine);
  const std::vector<double> zero(8, 0.0);
  SUBCASE("a(x, 0) = 1.1 everywhere") {
    for (double x : {0.05, 0.2, 0.5, 0.85})
      for (double y : {0.11, 0.47, 0.93})
        CHECK(p.coefficient(x, y, zero) == doctest::Approx(1.1));
  }
  SUBCASE("first subdomain with y = e_1") {
    std::vector<double> y(8, 0.0);
    y[0] = 1.0;
    CHECK(p.coefficient(0.2, 0.2, y) == doctest::Approx(2.1));  // inside A_1
    CHECK(p.coefficient(0.05, 0.05, y) == doctest::Approx(1.1));  // outside all
  }
  SUBCASE("outside every subdomain the coefficient ignores y") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> y(8);
      for (double& v : y) v = unif(rng);
      CHECK(p.coefficient(0.35, 0.65, y) == doctest::Approx(1.1));
    }
  }
  SUBCASE("forcing is 100 on the center square only") {
    CHECK(p.forcing(0.5, 0.5) == 100.0);
    CHECK(p.forcing(0.2, 0.2) == 0.0);
    CHECK(p.forcing(0.35, 0.5) == 0.0);
  }
  SUBCASE("initial mesh has 128 right triangles") {
    auto mesh = p.initial_mesh();
    CHECK(mesh->triangle_count() == 128);
    CHECK(mesh->vertex_count() == 81);
  }
  SUBCASE("affinity in y: second differences vanish") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> unif(-0.9, 0.9);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> y(8);
      for (double& v : y) v = unif(rng);
      const double x1 = 0.2, x2 = 0.5;
      for (int m = 0; m < 8; ++m) {
        auto yp = y, ym = y;
        yp[m] += 0.05;
        ym[m] -= 0.05;
        const double second = p.coefficient(x1, x2, yp) - 2.0 * p.coefficient(x1, x2, y) +
                              p.coefficient(x1, x2, ym);
        CHECK(std::abs(second) <= 1e-12);
      }
    }
  }
}

TEST_CASE("fourier problem data") {
  const auto p = fourier_exp_problem(4);
  CHECK(p.M == 4);
  CHECK_FALSE(p.affine);
  SUBCASE("a(x, 0) = e") {
    const std::vector<double> zero(4, 0.0);
    for (double x : {-0.7, 0.3, 0.9})
      for (double y : {0.1, 0.6})
        CHECK(p.coefficient(x, y, zero) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  }
  SUBCASE("amplitudes") {
    CHECK(p.alphas[0] == doctest::Approx(0.498));
    CHECK(p.alphas[1] == doctest::Approx(0.547 / 2.0));
    CHECK(p.alphas[2] == doctest::Approx(0.547 / 3.0));
  }
  SUBCASE("mode orders follow the diagonal enumeration") {
    // (beta1, beta2) for m = 1, 2, 3 are (0,1), (1,0), (0,2): probe the
    // coefficient along axes where the relevant cosine changes
    std::vector<double> y(4, 0.0);
    y[0] = 1.0;  // mode 1: cos(2 pi * 0 * x1) cos(2 pi * 1 * x2) = cos(2 pi x2)
    const double v1 = std::log(p.coefficient(0.123, 0.0, y));
    const double v2 = std::log(p.coefficient(0.877, 0.0, y));
    CHECK(v1 == doctest::Approx(1.0 + 0.498).epsilon(1e-12));
    CHECK(v2 == doctest::Approx(1.0 + 0.498).epsilon(1e-12));
    y.assign(4, 0.0);
    y[1] = 1.0;  // mode 2 depends on x1 only
    const double w1 = std::log(p.coefficient(0.25, 0.1, y));
    CHECK(w1 == doctest::Approx(1.0 + 0.2735 * std::cos(M_PI / 2)).epsilon(1e-12));
    y.assign(4, 0.0);
    y[2] = 1.0;  // mode 3: cos(2 pi * 0 * x1) cos(2 pi * 2 * x2)
    const double u1 = std::log(p.coefficient(0.9, 0.25, y));
    CHECK(u1 == doctest::Approx(1.0 + (0.547 / 3.0) * std::cos(M_PI)).epsilon(1e-12));
  }
  SUBCASE("log-affinity in y") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(-0.9, 0.9);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> y(4);
      for (double& v : y) v = unif(rng);
      for (int m = 0; m < 4; ++m) {
        auto yp = y, ym = y;
        yp[m] += 0.05;
        ym[m] -= 0.05;
        const double second = std::log(p.coefficient(-0.3, 0.7, yp)) -
                              2.0 * std::log(p.coefficient(-0.3, 0.7, y)) +
                              std::log(p.coefficient(-0.3, 0.7, ym));
        CHECK(std::abs(second) <= 1e-12);
      }
    }
  }
  SUBCASE("initial mesh on the L-shape") {
    auto mesh = p.initial_mesh();
    CHECK(mesh->triangle_count() == 96);
  }
}

TEST_CASE("positivity of both coefficients") {
  std::mt19937 rng(2718);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const auto cookie = cookie_problem();
  const auto fourier = fourier_exp_problem(4);
  double cookie_min = 1e300, fourier_min = 1e300;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> yc(8), yf(4);
    for (double& v : yc) v = unif(rng);
    for (double& v : yf) v = unif(rng);
    for (int i = 0; i < 200; i += 7) {
      for (int j = 0; j < 200; j += 7) {
        const double sx = i / 199.0, sy = j / 199.0;
        cookie_min = std::min(cookie_min, cookie.coefficient(sx, sy, yc));
        fourier_min = std::min(
            fourier_min, fourier.coefficient(-1.0 + 2.0 * sx, -1.0 + 2.0 * sy, yf));
      }
    }
  }
  CHECK(cookie_min > 0.0);
  CHECK(cookie_min >= 0.1 - 1e-12);
  CHECK(fourier_min > 0.0);
}

TEST_CASE("uniform ellipticity check") {
  SUBCASE("cookie problem margin is 0.1") {
    const auto report = check_uniform_ellipticity(cookie_problem());
    CHECK(report.pass);
    CHECK(report.r == doctest::Approx(0.1).epsilon(1e-9));
  }
  SUBCASE("a0 = 1, a1 = 1 fails") {
    ParametricProblem p = cookie_problem();
    p.a0 = [](double, double) { return 1.0; };
    p.affine_terms.clear();
    p.affine_terms.push_back([](double, double) { return 1.0; });
    const auto report = check_uniform_ellipticity(p, 50);
    CHECK_FALSE(report.pass);
    CHECK(report.r == doctest::Approx(0.0));
  }
  SUBCASE("a0 = 2 with two 0.5 terms gives r = 1") {
    ParametricProblem p = cookie_problem();
    p.a0 = [](double, double) { return 2.0; };
    p.affine_terms.clear();
    p.affine_terms.push_back([](double, double) { return 0.5; });
    p.affine_terms.push_back([](double, double) { return 0.5; });
    const auto report = check_uniform_ellipticity(p, 50);
    CHECK(report.pass);
    CHECK(report.r == doctest::Approx(1.0));
  }
  SUBCASE("nonaffine problems are rejected") {
    CHECK_THROWS_AS(check_uniform_ellipticity(fourier_exp_problem(2)), ContractError);
  }
}

TEST_CASE("derivative bound check") {
  SUBCASE("default amplitudes admit delta > 1") {
    const auto p = fourier_exp_problem(4);
    const auto delta = check_fourier_derivative_bound(p, 3);
    REQUIRE(delta.has_value());
    CHECK((*delta)[0] == doctest::Approx(1.0 / 0.996).epsilon(1e-12));
    for (double d : *delta) CHECK(d > 1.0);
  }
  SUBCASE("alpha >= 1/2 fails") {
    auto p = fourier_exp_problem(2);
    p.alphas[0] = 0.6;
    CHECK_FALSE(check_fourier_derivative_bound(p, 2).has_value());
  }
}
