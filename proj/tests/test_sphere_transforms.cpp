#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nullrad/sphere/fields.hpp"
#include "nullrad/sphere/transforms.hpp"

using namespace nullrad::sphere;

namespace {

// deterministic band-limited random field
ScalarField random_field(const SphereGrid& g, unsigned seed, int lmin = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SHCoefficients c(g.band_limit);
  for (int l = lmin; l <= g.band_limit; ++l)
    for (int m = -l; m <= l; ++m) c(l, m) = dist(rng);
  return synthesize(c, g);
}

}  // namespace

TEST_CASE("grid quadrature integrates the area of S^2") {
  for (int L : {2, 8, 16, 24}) {
    SphereGrid g = make_grid(L);
    double area = 0.0;
    for (std::size_t j = 0; j < g.n_theta(); ++j)
      area += g.node_weight(j) * double(g.n_phi());
    REQUIRE(area == Catch::Approx(4.0 * std::numbers::pi).epsilon(1e-14));
  }
}

TEST_CASE("no grid node sits on a pole") {
  SphereGrid g = make_grid(16);
  for (double s : g.sin_theta) REQUIRE(s > 1e-3);
}

TEST_CASE("grid below resolution is rejected") {
  REQUIRE_THROWS_AS(make_grid(16, 10, 40), nullrad::ResolutionError);
  REQUIRE_THROWS_AS(make_grid(16, 20, 16), nullrad::ResolutionError);
  REQUIRE_THROWS_AS(make_grid(1), nullrad::ResolutionError);
}

TEST_CASE("analyze of the constant field") {
  SphereGrid g = make_grid(8);
  ScalarField f(g);
  for (double& v : f.values) v = 1.0;
  SHCoefficients c = analyze(f);
  REQUIRE(c(0, 0) == Catch::Approx(std::sqrt(4.0 * std::numbers::pi)).epsilon(1e-12));
  for (int l = 1; l <= 8; ++l)
    for (int m = -l; m <= l; ++m) REQUIRE(std::abs(c(l, m)) < 1e-12);
}

TEST_CASE("analyze picks out single and mixed basis elements") {
  SphereGrid g = make_grid(8);
  SHCoefficients in(8);
  in(2, 0) = 1.0;
  in(3, 3) = 0.5;
  ScalarField f = synthesize(in, g);
  SHCoefficients c = analyze(f);
  for (int l = 0; l <= 8; ++l)
    for (int m = -l; m <= l; ++m) {
      double expect = (l == 2 && m == 0) ? 1.0 : (l == 3 && m == 3) ? 0.5 : 0.0;
      REQUIRE(c(l, m) == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("round trip and Parseval on random band-limited fields") {
  SphereGrid g = make_grid(16);
  ScalarField f = random_field(g, 7);
  SHCoefficients c = analyze(f);
  ScalarField back = synthesize(c, g);
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    num += (back.values[n] - f.values[n]) * (back.values[n] - f.values[n]);
    den += f.values[n] * f.values[n];
  }
  REQUIRE(std::sqrt(num / den) < 1e-12);

  double sum_sq = 0.0;
  for (double a : c.a) sum_sq += a * a;
  ScalarField f2(g);
  for (std::size_t n = 0; n < f.values.size(); ++n)
    f2.values[n] = f.values[n] * f.values[n];
  REQUIRE(sum_sq == Catch::Approx(integrate(f2)).epsilon(1e-10));
}

TEST_CASE("synthesize rejects coefficients above the grid band limit") {
  SphereGrid g = make_grid(8);
  SHCoefficients c(12);
  REQUIRE_THROWS_AS(synthesize(c, g), nullrad::ResolutionError);
}

TEST_CASE("Laplacian eigenrelation") {
  SphereGrid g = make_grid(16);
  SECTION("Y20") {
    SHCoefficients c(16);
    c(2, 0) = 1.0;
    ScalarField y = synthesize(c, g);
    ScalarField lap = laplacian(y);
    for (std::size_t n = 0; n < y.values.size(); ++n)
      REQUIRE(lap.values[n] == Catch::Approx(-6.0 * y.values[n]).margin(1e-10));
  }
  SECTION("Y11") {
    SHCoefficients c(16);
    c(1, 1) = 1.0;
    ScalarField y = synthesize(c, g);
    ScalarField lap = laplacian(y);
    for (std::size_t n = 0; n < y.values.size(); ++n)
      REQUIRE(lap.values[n] == Catch::Approx(-2.0 * y.values[n]).margin(1e-10));
  }
  SECTION("constant maps to zero") {
    ScalarField one(g);
    for (double& v : one.values) v = 1.0;
    ScalarField lap = laplacian(one);
    for (double v : lap.values) REQUIRE(std::abs(v) < 1e-10);
  }
  SECTION("all degrees l <= 14 at L = 16") {
    double worst = 0.0;
    for (int l = 1; l <= 14; ++l) {
      SHCoefficients c(16);
      c(l, std::min(l, 3)) = 1.0;
      ScalarField y = synthesize(c, g);
      ScalarField lap = laplacian(y);
      for (std::size_t n = 0; n < y.values.size(); ++n)
        worst = std::max(worst,
                         std::abs(lap.values[n] + double(l) * (l + 1) * y.values[n]));
    }
    REQUIRE(worst < 1e-8);
  }
}

TEST_CASE("Poisson solver inverts the Laplacian on mean-free sources") {
  SphereGrid g = make_grid(16);
  SECTION("eigenvalue -6") {
    SHCoefficients c(16);
    c(2, 0) = 1.0;
    ScalarField y = synthesize(c, g);
    ScalarField phi = solve_poisson(y);
    for (std::size_t n = 0; n < y.values.size(); ++n)
      REQUIRE(phi.values[n] == Catch::Approx(-y.values[n] / 6.0).margin(1e-12));
  }
  SECTION("two modes") {
    SHCoefficients c(16);
    c(1, 0) = 1.0;
    c(3, 0) = 1.0;
    ScalarField f = synthesize(c, g);
    ScalarField phi = solve_poisson(f);
    SHCoefficients cp = analyze(phi);
    REQUIRE(cp(1, 0) == Catch::Approx(-1.0 / 2.0).epsilon(1e-10));
    REQUIRE(cp(3, 0) == Catch::Approx(-1.0 / 12.0).epsilon(1e-10));
  }
  SECTION("zero source") {
    ScalarField z(g);
    ScalarField phi = solve_poisson(z);
    for (double v : phi.values) REQUIRE(v == 0.0);
  }
  SECTION("raw F with a mean is rejected") {
    ScalarField one(g);
    for (double& v : one.values) v = 1.0;
    REQUIRE_THROWS_AS(solve_poisson(one), nullrad::NonMeanFreeSourceError);
  }
  SECTION("solution is mean-free and satisfies the equation") {
    ScalarField f = random_field(g, 11, 1);
    ScalarField phi = solve_poisson(f);
    REQUIRE(std::abs(mean(phi)) < 1e-12);
    ScalarField lap = laplacian(phi);
    double num = 0.0;
    for (std::size_t n = 0; n < f.values.size(); ++n)
      num += (lap.values[n] - f.values[n]) * (lap.values[n] - f.values[n]);
    REQUIRE(std::sqrt(num) < 1e-8 * l2_norm(f));
  }
}
