#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nullrad/sphere/fields.hpp"
#include "nullrad/sphere/oracle.hpp"
#include "nullrad/sphere/transforms.hpp"

using namespace nullrad::sphere;

namespace {

ScalarField random_field(const SphereGrid& g, unsigned seed, int lmin = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SHCoefficients c(g.band_limit);
  for (int l = lmin; l <= g.band_limit; ++l)
    for (int m = -l; m <= l; ++m) c(l, m) = dist(rng);
  return synthesize(c, g);
}

double rel_diff(const ScalarField& a, const ScalarField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    num += (a.values[n] - b.values[n]) * (a.values[n] - b.values[n]);
    den += b.values[n] * b.values[n];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST_CASE("gradient of a constant vanishes") {
  SphereGrid g = make_grid(12);
  ScalarField one(g);
  for (double& v : one.values) v = 1.0;
  OneFormField v = gradient(one);
  REQUIRE(sup_pointwise_norm(v) < 1e-12);
}

TEST_CASE("gradient of Y10 is axisymmetric and proportional to -sin") {
  SphereGrid g = make_grid(12);
  SHCoefficients c(12);
  c(1, 0) = 1.0;
  OneFormField v = gradient(synthesize(c, g));
  const double n10 = std::sqrt(3.0 / (4.0 * std::numbers::pi));
  for (std::size_t j = 0; j < g.n_theta(); ++j)
    for (std::size_t k = 0; k < g.n_phi(); ++k) {
      std::size_t n = j * g.n_phi() + k;
      REQUIRE(v.comp_theta[n] ==
              Catch::Approx(-n10 * g.sin_theta[j]).margin(1e-12));
      REQUIRE(std::abs(v.comp_phi[n]) < 1e-12);
    }
}

TEST_CASE("div grad equals the Laplacian") {
  SphereGrid g = make_grid(16);
  ScalarField f = random_field(g, 3);
  ScalarField d = divergence_oneform(gradient(f));
  ScalarField lap = laplacian(f);
  REQUIRE(rel_diff(d, lap) < 1e-10);
}

TEST_CASE("divergence and curl separate the Hodge parts") {
  SphereGrid g = make_grid(16);
  SECTION("grad part") {
    SHCoefficients c(16);
    c(2, 0) = 1.0;
    OneFormField v = gradient(synthesize(c, g));
    ScalarField d = divergence_oneform(v);
    ScalarField y = synthesize(c, g);
    for (std::size_t n = 0; n < d.values.size(); ++n)
      REQUIRE(d.values[n] == Catch::Approx(-6.0 * y.values[n]).margin(1e-10));
    REQUIRE(l2_norm(curl_oneform(v)) < 1e-10);
  }
  SECTION("curl part") {
    SHCoefficients c(16);
    c(2, 0) = 1.0;
    OneFormField v = star(gradient(synthesize(c, g)));
    REQUIRE(l2_norm(divergence_oneform(v)) < 1e-10);
    ScalarField cu = curl_oneform(v);
    ScalarField y = synthesize(c, g);
    for (std::size_t n = 0; n < cu.values.size(); ++n)
      REQUIRE(cu.values[n] == Catch::Approx(-6.0 * y.values[n]).margin(1e-10));
  }
  SECTION("mixed field recovers the magnetic potential") {
    ScalarField f = random_field(g, 5);
    ScalarField h = random_field(g, 6);
    OneFormPotentials pot{analyze(f), analyze(h)};
    pot.electric(0, 0) = pot.magnetic(0, 0) = 0.0;
    OneFormField v = synthesize_oneform(pot, g);
    ScalarField cu = curl_oneform(v);
    ScalarField lap_h = laplacian(synthesize(pot.magnetic, g));
    REQUIRE(rel_diff(cu, lap_h) < 1e-8);
  }
}

TEST_CASE("Hodge orthogonality of gradient and rotated gradient") {
  SphereGrid g = make_grid(16);
  ScalarField f = random_field(g, 10);
  ScalarField h = random_field(g, 11);
  OneFormField vf = gradient(f);
  OneFormField vh = star(gradient(h));
  double ip = 0.0;
  for (std::size_t j = 0; j < g.n_theta(); ++j)
    for (std::size_t k = 0; k < g.n_phi(); ++k) {
      std::size_t n = j * g.n_phi() + k;
      ip += (vf.comp_theta[n] * vh.comp_theta[n] +
             vf.comp_phi[n] * vh.comp_phi[n]) *
            g.node_weight(j);
    }
  REQUIRE(std::abs(ip) < 1e-10 * l2_norm(f) * l2_norm(h));
}

TEST_CASE("adjointness of div and grad under the grid quadrature") {
  SphereGrid g = make_grid(16);
  ScalarField f = random_field(g, 20);
  ScalarField phi = random_field(g, 21);
  OneFormPotentials pot{analyze(f), analyze(random_field(g, 22))};
  OneFormField v = synthesize_oneform(pot, g);
  ScalarField dv = divergence_oneform(v);
  OneFormField gphi = gradient(phi);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t j = 0; j < g.n_theta(); ++j)
    for (std::size_t k = 0; k < g.n_phi(); ++k) {
      std::size_t n = j * g.n_phi() + k;
      lhs += dv.values[n] * phi.values[n] * g.node_weight(j);
      rhs -= (v.comp_theta[n] * gphi.comp_theta[n] +
              v.comp_phi[n] * gphi.comp_phi[n]) *
             g.node_weight(j);
    }
  REQUIRE(std::abs(lhs - rhs) < 1e-8 * std::abs(rhs));
}

TEST_CASE("STT pointwise norm identity") {
  SphereGrid g = make_grid(12);
  STTPotentials pot{SHCoefficients(12), SHCoefficients(12), 0.0};
  pot.electric(3, 2) = 1.0;
  STTField t = synthesize_stt(pot, g);
  for (std::size_t n = 0; n < g.n_nodes(); ++n)
    REQUIRE(t.norm2_at(n) ==
            Catch::Approx(2.0 * (t.comp_tt[n] * t.comp_tt[n] +
                                 t.comp_tp[n] * t.comp_tp[n]))
                .margin(1e-15));
}

TEST_CASE("STT decomposition round trip") {
  SphereGrid g = make_grid(16);
  SECTION("pure electric basis element") {
    STTPotentials in{SHCoefficients(16), SHCoefficients(16), 0.0};
    in.electric(2, 0) = 1.0;
    STTField t = synthesize_stt(in, g);
    STTPotentials out = decompose_stt(t);
    REQUIRE(out.electric(2, 0) == Catch::Approx(1.0).epsilon(1e-10));
    for (int l = 2; l <= 16; ++l)
      for (int m = -l; m <= l; ++m) {
        if (l == 2 && m == 0) continue;
        REQUIRE(std::abs(out.electric(l, m)) < 1e-10);
        REQUIRE(std::abs(out.magnetic(l, m)) < 1e-10);
      }
  }
  SECTION("zero field") {
    STTField t(g);
    STTPotentials out = decompose_stt(t);
    for (double a : out.electric.a) REQUIRE(a == 0.0);
    for (double a : out.magnetic.a) REQUIRE(a == 0.0);
  }
  SECTION("random l <= L tensor") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    STTPotentials in{SHCoefficients(16), SHCoefficients(16), 0.0};
    for (int l = 2; l <= 16; ++l)
      for (int m = -l; m <= l; ++m) {
        in.electric(l, m) = dist(rng);
        in.magnetic(l, m) = dist(rng);
      }
    STTField t = synthesize_stt(in, g);
    STTPotentials out = decompose_stt(t);
    STTField back = synthesize_stt(out, g);
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < g.n_nodes(); ++n) {
      num += (back.comp_tt[n] - t.comp_tt[n]) * (back.comp_tt[n] - t.comp_tt[n]) +
             (back.comp_tp[n] - t.comp_tp[n]) * (back.comp_tp[n] - t.comp_tp[n]);
      den += t.comp_tt[n] * t.comp_tt[n] + t.comp_tp[n] * t.comp_tp[n];
    }
    REQUIRE(std::sqrt(num / den) < 1e-10);
    REQUIRE(out.low_degree_residual < 1e-8);
  }
}

TEST_CASE("divergence constants match the finite-difference oracle") {
  SphereGrid g = make_grid(12);
  OperatorConstants oc = operator_constants(g);
  for (int l : {2, 3, 5, 8, 10}) {
    auto ref = oracle::stt_divergence_constants(l);
    CAPTURE(l);
    REQUIRE(oc.lambda_e[l] == Catch::Approx(ref.lambda_e).epsilon(1e-6));
    REQUIRE(oc.lambda_b[l] == Catch::Approx(ref.lambda_b).epsilon(1e-6));
  }
}

TEST_CASE("divergence of an electric basis tensor is a pure gradient") {
  SphereGrid g = make_grid(12);
  OperatorConstants oc = operator_constants(g);
  STTPotentials in{SHCoefficients(12), SHCoefficients(12), 0.0};
  in.electric(2, 0) = 1.0;
  OneFormField v = divergence_stt(synthesize_stt(in, g));
  OneFormPotentials pot = decompose_oneform(v);
  REQUIRE(pot.electric(2, 0) == Catch::Approx(oc.lambda_e[2]).epsilon(1e-9));
  double mag = 0.0;
  for (double a : pot.magnetic.a) mag += a * a;
  REQUIRE(std::sqrt(mag) < 1e-10);
}

TEST_CASE("divergence of a magnetic tensor is a pure rotated gradient") {
  SphereGrid g = make_grid(12);
  STTPotentials in{SHCoefficients(12), SHCoefficients(12), 0.0};
  in.magnetic(4, -2) = 1.0;
  OneFormField v = divergence_stt(synthesize_stt(in, g));
  OneFormPotentials pot = decompose_oneform(v);
  double ele = 0.0;
  for (double a : pot.electric.a) ele += a * a;
  REQUIRE(std::sqrt(ele) < 1e-10);
  REQUIRE(l2_norm(divergence_oneform(v)) < 1e-9);
}

TEST_CASE("invert_div_stt") {
  SphereGrid g = make_grid(16);
  OperatorConstants oc = operator_constants(g);
  SECTION("zero maps to zero") {
    OneFormField v(g);
    STTField t = invert_div_stt(v);
    REQUIRE(sup_pointwise_norm(t) == 0.0);
  }
  SECTION("forward oracle: V = grad(lambda_e2 Y20) inverts to De Y20") {
    SHCoefficients c(16);
    c(2, 0) = oc.lambda_e[2];
    OneFormField v = gradient(synthesize(c, g));
    STTField t = invert_div_stt(v);
    STTPotentials want{SHCoefficients(16), SHCoefficients(16), 0.0};
    want.electric(2, 0) = 1.0;
    STTField ref = synthesize_stt(want, g);
    for (std::size_t n = 0; n < g.n_nodes(); ++n) {
      REQUIRE(t.comp_tt[n] == Catch::Approx(ref.comp_tt[n]).margin(1e-10));
      REQUIRE(t.comp_tp[n] == Catch::Approx(ref.comp_tp[n]).margin(1e-10));
    }
  }
  SECTION("div o invert is the identity on admissible sources") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SHCoefficients c(16);
    for (int l = 2; l <= 16; ++l)
      for (int m = -l; m <= l; ++m) c(l, m) = dist(rng);
    OneFormField v = gradient(synthesize(c, g));
    OneFormField back = divergence_stt(invert_div_stt(v));
    double num = 0.0;
    for (std::size_t n = 0; n < g.n_nodes(); ++n) {
      double dt = back.comp_theta[n] - v.comp_theta[n];
      double dp = back.comp_phi[n] - v.comp_phi[n];
      num += dt * dt + dp * dp;
    }
    REQUIRE(std::sqrt(num) < 1e-8 * l2_norm(v));
  }
  SECTION("magnetic content is rejected") {
    SHCoefficients c(16);
    c(3, 1) = 1.0;
    OneFormField v = star(gradient(synthesize(c, g)));
    REQUIRE_THROWS_AS(invert_div_stt(v), nullrad::NonElectricSourceError);
  }
  SECTION("l=1 gradient content is an obstruction") {
    SHCoefficients c(16);
    c(1, 0) = 1.0;
    c(2, 0) = 1.0;
    OneFormField v = gradient(synthesize(c, g));
    REQUIRE_THROWS_AS(invert_div_stt(v), nullrad::KernelObstructionError);
    InvertDivReport rep;
    STTField t = invert_div_stt(v, &rep);  // tolerated when reported
    REQUIRE(rep.l1_fraction > 0.1);
    REQUIRE(sup_pointwise_norm(t) > 0.0);
  }
}
