#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "nullrad/errors.hpp"
#include "nullrad/radiation.hpp"
#include "nullrad/sphere/fields.hpp"

namespace nullrad {

// Bondi-coordinate waveform data: shear functions c, d and the radiative
// electromagnetic functions X, Y, sampled over retarded time w.
struct BondiWaveform {
  sphere::SphereGrid grid;
  std::vector<double> w_grid;
  std::vector<sphere::ScalarField> c, d, x, y;

  std::size_t n_w() const { return w_grid.size(); }

  void validate() const {
    if (w_grid.size() < 3) throw RangeError("need at least 3 w samples");
    for (std::size_t i = 1; i < w_grid.size(); ++i)
      if (!(w_grid[i] > w_grid[i - 1]))
        throw RangeError("w_grid must be strictly increasing");
    if (c.size() != w_grid.size() || d.size() != w_grid.size() ||
        x.size() != w_grid.size() || y.size() != w_grid.size())
      throw RangeError("Bondi series lengths must match w_grid");
  }
};

struct BondiEquivalenceReport {
  double max_pointwise_residual = 0.0;  // relative, over all (w, node)
  double integral_ratio = 1.0;  // angular integrals, Bondi over CK, worst w
  // declared convention constants between the two published mass-loss
  // formulas: dM/dw = -int(...) versus dM/du = +(1/8pi) int(...)
  double prefactor = 1.0 / (8.0 * std::numbers::pi);
  double sign = -1.0;
};

// Maps Bondi data to radiative data so the norm identities
//   |Xi|^2 = (dc/dw)^2 + (dd/dw)^2,  |A_F|^2 = X^2 + Y^2
// hold pointwise. The component assignment is a convention: Xi carries
// (-dc/dw, -dd/dw)/sqrt(2) in the dyad (the 1/sqrt(2) compensates
// |T|^2 = 2(T_tt^2 + T_tp^2)), and A_F carries (X, Y) directly. u is
// identified with w; flip_orientation reverses the time direction.
inline RadiativePayload to_radiative(const BondiWaveform& b,
                                     bool flip_orientation = false) {
  b.validate();
  const std::size_t n = b.n_w();
  const std::size_t nn = b.grid.n_nodes();

  RadiativePayload p;
  p.grid = b.grid;
  p.u_grid = b.w_grid;
  p.sigma_minus = sphere::STTField(b.grid);
  p.xi.reserve(n);
  p.a_f.reserve(n);

  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t i = 0; i < n; ++i) {
    sphere::STTField xi(b.grid);
    sphere::OneFormField af(b.grid);
    const std::size_t il = i == 0 ? 0 : i - 1;
    const std::size_t ir = i == n - 1 ? n - 1 : i + 1;
    const double dw = b.w_grid[ir] - b.w_grid[il];
    for (std::size_t k = 0; k < nn; ++k) {
      const double dc = (b.c[ir].values[k] - b.c[il].values[k]) / dw;
      const double dd = (b.d[ir].values[k] - b.d[il].values[k]) / dw;
      xi.comp_tt[k] = -dc * inv_sqrt2;
      xi.comp_tp[k] = -dd * inv_sqrt2;
      af.comp_theta[k] = b.x[i].values[k];
      af.comp_phi[k] = b.y[i].values[k];
    }
    p.xi.push_back(std::move(xi));
    p.a_f.push_back(std::move(af));
  }
  if (flip_orientation) {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = -p.u_grid[n - 1 - i];
    p.u_grid = std::move(u);
    std::reverse(p.xi.begin(), p.xi.end());
    std::reverse(p.a_f.begin(), p.a_f.end());
  }
  return p;
}

// Verifies pointwise that the Bondi mass-loss integrand
// (dc/dw)^2 + (dd/dw)^2 + 1/2 (X^2 + Y^2) equals |Xi|^2 + 1/2 |A_F|^2 from
// the mapping above, and compares the angular integrals per w slice.
inline BondiEquivalenceReport check_mass_loss_equivalence(
    const BondiWaveform& b) {
  b.validate();
  const RadiativePayload p = to_radiative(b);
  const std::size_t n = b.n_w();
  const std::size_t nn = b.grid.n_nodes();

  BondiEquivalenceReport rep;
  double worst_ratio_dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t il = i == 0 ? 0 : i - 1;
    const std::size_t ir = i == n - 1 ? n - 1 : i + 1;
    const double dw = b.w_grid[ir] - b.w_grid[il];
    sphere::ScalarField bondi(b.grid), ck(b.grid);
    for (std::size_t k = 0; k < nn; ++k) {
      const double dc = (b.c[ir].values[k] - b.c[il].values[k]) / dw;
      const double dd = (b.d[ir].values[k] - b.d[il].values[k]) / dw;
      bondi.values[k] =
          dc * dc + dd * dd +
          0.5 * (b.x[i].values[k] * b.x[i].values[k] +
                 b.y[i].values[k] * b.y[i].values[k]);
      ck.values[k] = p.xi[i].norm2_at(k) + 0.5 * p.a_f[i].norm2_at(k);
      const double scale = std::max(std::abs(bondi.values[k]), 1e-300);
      rep.max_pointwise_residual =
          std::max(rep.max_pointwise_residual,
                   std::abs(bondi.values[k] - ck.values[k]) / scale);
    }
    const double ib = sphere::integrate(bondi);
    const double ic = sphere::integrate(ck);
    if (std::abs(ic) > 1e-300) {
      const double ratio = ib / ic;
      if (std::abs(ratio - 1.0) > worst_ratio_dev) {
        worst_ratio_dev = std::abs(ratio - 1.0);
        rep.integral_ratio = ratio;
      }
    }
  }
  return rep;
}

}  // namespace nullrad
