#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "nullrad/errors.hpp"
#include "nullrad/radiation.hpp"
#include "nullrad/sphere/fields.hpp"
#include "nullrad/sphere/kernel.hpp"
#include "nullrad/sphere/transforms.hpp"

namespace nullrad {

struct MemoryResult {
  sphere::ScalarField phi;  // mean-free potential of the memory constraint
  sphere::STTField sigma_jump_constraint;  // electric solution of the Hodge system
  sphere::STTField sigma_jump_direct;      // -int Xi du from the radiation data
  double residual = 0.0;  // L^2 distance of the electric potentials
  double l1_projected_fraction = 0.0;  // l=1 gradient content projected out
};

struct OmegaDiagnostics {
  std::vector<sphere::ScalarField> omega_prime;
  sphere::ScalarField jump;  // omega_prime at u_max minus at u_min
};

// The permanent memory tensor from the constraint system
//   laplacian Phi = F - mean(F),  div (Sigma^+ - Sigma^-) = grad Phi
// with F the un-normalized angular flux. The Hodge system determines only
// the electric, l >= 2 part; the magnetic part of the constraint tensor is
// zero. Any l = 1 gradient content of Phi has no STT preimage and is
// projected out, with its fraction recorded.
inline MemoryResult solve_memory(const RadiativePayload& p) {
  MemoryResult out;
  sphere::ScalarField f = memory_source(p);
  const double fbar = sphere::mean(f);
  for (double& v : f.values) v -= fbar;
  out.phi = sphere::solve_poisson(f);

  sphere::InvertDivReport rep;
  out.sigma_jump_constraint =
      sphere::invert_div_stt(sphere::gradient(out.phi), &rep);
  out.l1_projected_fraction = rep.l1_fraction;

  SigmaSeries ss = sigma_from_xi(p);
  out.sigma_jump_direct = ss.sigma_plus;
  const std::size_t nn = p.grid.n_nodes();
  for (std::size_t n = 0; n < nn; ++n) {
    out.sigma_jump_direct.comp_tt[n] -= ss.sigma[0].comp_tt[n];
    out.sigma_jump_direct.comp_tp[n] -= ss.sigma[0].comp_tp[n];
  }

  const sphere::STTPotentials pc = sphere::decompose_stt(out.sigma_jump_constraint);
  const sphere::STTPotentials pd = sphere::decompose_stt(out.sigma_jump_direct);
  double r2 = 0.0;
  for (std::size_t i = 0; i < pc.electric.a.size(); ++i) {
    const double d = pc.electric.a[i] - pd.electric.a[i];
    r2 += d * d;
  }
  out.residual = std::sqrt(r2);
  return out;
}

// Omega'(u) per the kernel-integral formula: the u-independent singular
// kernel term plus the sgn(u - u') term of the mean-free integrand
// G = |Xi|^2 + 1/2 |A_F|^2 - angular means. The kernel term cancels in the
// jump, which therefore equals int G du.
inline OmegaDiagnostics omega_prime_series(const RadiativePayload& p,
                                           const sphere::KernelOptions& kopt = {}) {
  p.validate();
  const std::size_t n = p.n_u();
  const std::size_t nn = p.grid.n_nodes();

  // mean-free integrand per u slice
  std::vector<sphere::ScalarField> g;
  g.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sphere::ScalarField s(p.grid);
    for (std::size_t k = 0; k < nn; ++k)
      s.values[k] = p.xi[i].norm2_at(k) + 0.5 * p.a_f[i].norm2_at(k);
    const double m = sphere::mean(s);
    for (double& v : s.values) v -= m;
    g.push_back(std::move(s));
  }

  // cumulative trapezoid C_i = int_{u_min}^{u_i} G du'
  std::vector<sphere::ScalarField> cum;
  cum.reserve(n);
  cum.emplace_back(p.grid);
  for (std::size_t i = 1; i < n; ++i) {
    sphere::ScalarField s = cum.back();
    const double hw = 0.5 * (p.u_grid[i] - p.u_grid[i - 1]);
    for (std::size_t k = 0; k < nn; ++k)
      s.values[k] += hw * (g[i - 1].values[k] + g[i].values[k]);
    cum.push_back(std::move(s));
  }
  const sphere::ScalarField& total = cum.back();

  // single kernel evaluation on the u-integrated integrand
  sphere::ScalarField kterm = sphere::kernel_integral(total, kopt);
  const double kscale = -1.0 / (std::pow(2.0, 1.5) * 4.0 * std::numbers::pi);
  for (double& v : kterm.values) v *= kscale;

  OmegaDiagnostics out;
  out.omega_prime.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // int sgn(u_i - u') G du' = 2 C_i - C_total
    sphere::ScalarField s(p.grid);
    for (std::size_t k = 0; k < nn; ++k)
      s.values[k] = kterm.values[k] +
                    0.5 * (2.0 * cum[i].values[k] - total.values[k]);
    out.omega_prime.push_back(std::move(s));
  }

  out.jump = sphere::ScalarField(p.grid);
  for (std::size_t k = 0; k < nn; ++k)
    out.jump.values[k] =
        out.omega_prime.back().values[k] - out.omega_prime.front().values[k];
  return out;
}

// Overall test-mass displacement -(d0/r) (Sigma^+ - Sigma^-).
inline sphere::STTField memory_displacement_field(const sphere::STTField& sigma_jump,
                                                  double d0, double r) {
  if (!(d0 > 0.0) || !(r > 0.0)) throw DomainError("need d0 > 0 and r > 0");
  sphere::STTField out = sigma_jump;
  const double s = -d0 / r;
  for (double& v : out.comp_tt) v *= s;
  for (double& v : out.comp_tp) v *= s;
  return out;
}

}  // namespace nullrad
