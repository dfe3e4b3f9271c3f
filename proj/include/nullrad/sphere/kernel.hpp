#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nullrad/errors.hpp"
#include "nullrad/sphere/fields.hpp"
#include "nullrad/sphere/harmonics.hpp"
#include "nullrad/sphere/transforms.hpp"

namespace nullrad::sphere {

// Quadrature of the singular integral
//
//   (K f)(w) = int_{S^2} f(w') / (1 - w.w')^{1/2} dmu(w')
//
// against a dense source grid rotated relative to the target grid so no
// node pair coincides (the kernel is integrable at w = w'). f is evaluated
// on the source grid by spherical-harmonic synthesis of its coefficients.
// The kernel is zonal, so the operator is diagonal per degree; leakage of
// the quadrature into other (l, m) quantifies its accuracy.
//
// The singularity is subtracted before quadrature:
//   (K f)(w) = int (f(w') - f(w)) K dmu' + f(w) int K dmu'
// with int_{S^2} (1 - w.w')^{-1/2} dmu' = 4 sqrt(2) pi analytically. The
// difference integrand is bounded at w' = w, so a smooth rule converges.
//
// Default source density: 8 L Gauss colatitudes x 16 L longitudes.

struct KernelOptions {
  int source_n_theta = 0;  // 0 -> 8 L
  int source_n_phi = 0;    // 0 -> 16 L
  // Rotation offset of the source grid: half the target node spacing in
  // both angles (deterministic, collision-free).
};

inline ScalarField kernel_integral(const ScalarField& f,
                                   const KernelOptions& opt = {}) {
  const SphereGrid& g = f.grid;
  const int L = g.band_limit;
  const int nst = opt.source_n_theta > 0 ? opt.source_n_theta : 8 * L;
  const int nsp = opt.source_n_phi > 0 ? opt.source_n_phi : 16 * L;

  SHCoefficients c = analyze(f);

  // Source rule: Gauss-Legendre x equispaced, then rotated about the y axis
  // by half the target colatitude spacing and shifted in phi by half the
  // target longitude spacing.
  std::vector<double> sx, sw;
  detail::gauss_legendre(nst, sx, sw);
  const double dtheta = 0.5 * std::numbers::pi / double(g.n_theta() + 1);
  const double dphi = std::numbers::pi / double(g.n_phi());
  const double ca = std::cos(dtheta), sa = std::sin(dtheta);

  struct SourceNode {
    double x, y, z;   // unit vector after rotation
    double fw;        // f at node times quadrature weight
    double w;         // quadrature weight alone
  };
  std::vector<SourceNode> nodes;
  nodes.reserve(std::size_t(nst) * nsp);
  const double wphi = 2.0 * std::numbers::pi / nsp;
  for (int j = 0; j < nst; ++j) {
    const double ct = sx[j];
    const double st = std::sqrt(1.0 - ct * ct);
    for (int k = 0; k < nsp; ++k) {
      const double phi = wphi * k + dphi;
      // rotate the node about the y axis by dtheta
      const double px = st * std::cos(phi), py = st * std::sin(phi), pz = ct;
      SourceNode n;
      n.x = ca * px + sa * pz;
      n.y = py;
      n.z = -sa * px + ca * pz;
      // evaluate f spectrally at the rotated node
      const double ctr = std::clamp(n.z, -1.0, 1.0);
      const double str = std::sqrt(std::max(0.0, 1.0 - ctr * ctr));
      const double phir = std::atan2(n.y, n.x);
      detail::LegendreTable tab(L, ctr, str);
      double val = 0.0;
      for (int l = 0; l <= L; ++l)
        for (int m = -l; m <= l; ++m) {
          const double a = c(l, m);
          if (a == 0.0) continue;
          const int ma = std::abs(m);
          const double r =
              (m == 0 ? 1.0 : std::numbers::sqrt2) * tab.p[tri_index(l, ma)];
          val += a * r * (m > 0   ? std::cos(ma * phir)
                          : m < 0 ? std::sin(ma * phir)
                                  : 1.0);
        }
      n.w = sw[j] * wphi;
      n.fw = val * n.w;
      nodes.push_back(n);
    }
  }

  const double kernel_mass = 4.0 * std::numbers::sqrt2 * std::numbers::pi;
  ScalarField out(g);
  const std::size_t np = g.n_phi();
  for (std::size_t j = 0; j < g.n_theta(); ++j) {
    const double ct = g.cos_theta[j], st = g.sin_theta[j];
    for (std::size_t k = 0; k < np; ++k) {
      const double tx = st * std::cos(g.phi[k]);
      const double ty = st * std::sin(g.phi[k]);
      const double tz = ct;
      const double ftarget = f.at(j, k);
      double acc = 0.0;
      for (const SourceNode& n : nodes) {
        const double dot = tx * n.x + ty * n.y + tz * n.z;
        const double one_minus = 1.0 - dot;
        if (one_minus <= 1e-14)
          throw GridCollisionError(
              "target node coincides with a source quadrature node");
        acc += (n.fw - n.w * ftarget) / std::sqrt(one_minus);
      }
      out.at(j, k) = acc + ftarget * kernel_mass;
    }
  }
  return out;
}

// Per-degree kernel eigenvalues mu_l by the smooth 1-D substitution
// 1 - x = t^2, which removes the square-root singularity exactly:
//   mu_l = 2 pi int_{-1}^{1} P_l(x) (1-x)^{-1/2} dx
//        = 4 pi int_0^{sqrt 2} P_l(1 - t^2) dt.
// The substituted integrand is a polynomial, so Gauss quadrature with
// enough points is exact. This is the oracle route, independent of the 2-D
// quadrature above.
inline double kernel_eigenvalue_oracle(int l) {
  std::vector<double> x, w;
  detail::gauss_legendre(2 * l + 8, x, w);
  const double half = std::sqrt(2.0) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = half * (x[i] + 1.0);  // map [-1,1] -> [0, sqrt2]
    const double arg = 1.0 - t * t;
    double p0 = 1.0, p1 = 0.0;
    for (int n = 0; n < l; ++n) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * n + 1.0) * arg * p1 - n * p2) / (n + 1.0);
    }
    sum += w[i] * half * p0;
  }
  return 4.0 * std::numbers::pi * sum;
}

}  // namespace nullrad::sphere
