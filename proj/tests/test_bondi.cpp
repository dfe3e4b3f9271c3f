#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include <numbers>

#include "nullrad/bondi.hpp"
#include "nullrad/sphere/transforms.hpp"

using namespace nullrad;

namespace {

BondiWaveform random_waveform(int L, int nw, unsigned seed) {
  BondiWaveform b;
  b.grid = sphere::make_grid(L);
  b.w_grid.resize(nw);
  for (int i = 0; i < nw; ++i)
    b.w_grid[i] = -10.0 + 20.0 * i / double(nw - 1);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto random_series = [&](std::vector<sphere::ScalarField>& out) {
    sphere::SHCoefficients c(L);
    for (double& a : c.a) a = dist(rng);
    const auto shape = sphere::synthesize(c, b.grid);
    for (int i = 0; i < nw; ++i) {
      sphere::ScalarField f(b.grid);
      const double g = std::exp(-0.1 * b.w_grid[i] * b.w_grid[i]) *
                       (1.0 + 0.3 * std::sin(b.w_grid[i] + dist(rng) * 0.0));
      for (std::size_t k = 0; k < f.values.size(); ++k)
        f.values[k] = g * shape.values[k];
      out.push_back(std::move(f));
    }
  };
  random_series(b.c);
  random_series(b.d);
  random_series(b.x);
  random_series(b.y);
  return b;
}

}  // namespace

TEST_CASE("to_radiative basics") {
  const auto grid = sphere::make_grid(6);
  BondiWaveform b;
  b.grid = grid;
  const int nw = 201;
  b.w_grid.resize(nw);
  for (int i = 0; i < nw; ++i)
    b.w_grid[i] = -10.0 + 20.0 * i / double(nw - 1);
  for (int i = 0; i < nw; ++i) {
    b.c.emplace_back(grid);
    b.d.emplace_back(grid);
    b.x.emplace_back(grid);
    b.y.emplace_back(grid);
  }

  SECTION("zero waveform maps to zero payload") {
    auto p = to_radiative(b);
    for (const auto& xi : p.xi) CHECK(sphere::l2_norm(xi) == 0.0);
    for (const auto& af : p.a_f) CHECK(sphere::l2_norm(af) == 0.0);
  }

  SECTION("c-only waveform: |Xi|^2 = (dc/dw)^2") {
    for (int i = 0; i < nw; ++i) {
      const double g = std::exp(-b.w_grid[i] * b.w_grid[i]);
      for (double& v : b.c[i].values) v = g;
    }
    auto p = to_radiative(b);
    for (std::size_t i = 1; i + 1 < p.n_u(); ++i) {
      const double u = p.u_grid[i];
      const double dc_exact = -2.0 * u * std::exp(-u * u);
      // the map uses the same centered difference as the check below, so
      // compare against the finite-difference value
      const double dw = b.w_grid[i + 1] - b.w_grid[i - 1];
      const double dc_fd =
          (std::exp(-b.w_grid[i + 1] * b.w_grid[i + 1]) -
           std::exp(-b.w_grid[i - 1] * b.w_grid[i - 1])) /
          dw;
      CHECK(p.xi[i].norm2_at(0) == Catch::Approx(dc_fd * dc_fd).epsilon(1e-12));
      CHECK(p.xi[i].norm2_at(0) ==
            Catch::Approx(dc_exact * dc_exact).margin(5e-2));
      // EM portion stays zero
      CHECK(p.a_f[i].norm2_at(0) == 0.0);
    }
  }

  SECTION("constant X, Y: |A_F|^2 is Pythagorean") {
    for (int i = 0; i < nw; ++i) {
      for (double& v : b.x[i].values) v = 3.0;
      for (double& v : b.y[i].values) v = 4.0;
    }
    auto p = to_radiative(b);
    for (std::size_t i = 0; i < p.n_u(); ++i)
      CHECK(p.a_f[i].norm2_at(0) == Catch::Approx(25.0).epsilon(1e-14));
  }

  SECTION("too few samples") {
    BondiWaveform small;
    small.grid = grid;
    small.w_grid = {0.0, 1.0};
    small.c.assign(2, sphere::ScalarField(grid));
    small.d.assign(2, sphere::ScalarField(grid));
    small.x.assign(2, sphere::ScalarField(grid));
    small.y.assign(2, sphere::ScalarField(grid));
    CHECK_THROWS_AS(to_radiative(small), RangeError);
  }
}

TEST_CASE("orientation flip") {
  auto b = random_waveform(6, 51, 7);
  auto p = to_radiative(b);
  auto pf = to_radiative(b, true);
  const std::size_t n = p.n_u();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(pf.u_grid[i] == -p.u_grid[n - 1 - i]);
    CHECK(pf.xi[i].comp_tt == p.xi[n - 1 - i].comp_tt);
  }
  for (std::size_t i = 1; i < n; ++i) CHECK(pf.u_grid[i] > pf.u_grid[i - 1]);
}

TEST_CASE("mass loss integrand equivalence") {
  SECTION("zero waveform") {
    BondiWaveform b;
    b.grid = sphere::make_grid(6);
    b.w_grid = {-1.0, 0.0, 1.0};
    b.c.assign(3, sphere::ScalarField(b.grid));
    b.d.assign(3, sphere::ScalarField(b.grid));
    b.x.assign(3, sphere::ScalarField(b.grid));
    b.y.assign(3, sphere::ScalarField(b.grid));
    auto rep = check_mass_loss_equivalence(b);
    CHECK(rep.max_pointwise_residual == 0.0);
  }

  SECTION("random band-limited waveforms agree pointwise") {
    for (unsigned seed : {1u, 2u, 3u}) {
      auto b = random_waveform(10, 41, seed);
      auto rep = check_mass_loss_equivalence(b);
      CHECK(rep.max_pointwise_residual < 1e-10);
      CHECK(rep.integral_ratio == Catch::Approx(1.0).epsilon(1e-10));
    }
  }

  SECTION("declared convention constants") {
    auto b = random_waveform(6, 21, 4);
    auto rep = check_mass_loss_equivalence(b);
    CHECK(rep.sign == -1.0);
    CHECK(rep.prefactor == Catch::Approx(1.0 / (8.0 * std::numbers::pi)));
  }
}
