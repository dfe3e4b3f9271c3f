#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "nullrad/errors.hpp"
#include "nullrad/sphere/grid.hpp"

namespace nullrad::sphere {

// Real orthonormal spherical harmonics. Convention (the single place it is
// fixed):
//
//   Y_{l0}      = Pb_{l0}(cos t)
//   Y_{lm}, m>0 = sqrt(2) Pb_{lm}(cos t) cos(m p)
//   Y_{l,-m}    = sqrt(2) Pb_{lm}(cos t) sin(m p)
//
// where Pb_{lm} = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_{lm} with NO
// Condon-Shortley phase (P_{lm} = (1-x^2)^{m/2} d^m/dx^m P_l). Then
// int_{S^2} Y_{lm} Y_{l'm'} dmu = delta_{ll'} delta_{mm'}.
//
// The traceless second-derivative operators on scalars are
//   (De s)_AB = (grad_A grad_B - 1/2 gamma_AB lap) s   (electric)
//   (Db s)    = the in-plane rotation of De s          (magnetic)
// with the rotation fixed by (Db)_tt = -(De)_tp, (Db)_tp = (De)_tt.
// Their per-degree divergence constants are measured numerically, never
// assumed (see transforms.hpp).

inline std::size_t tri_index(int l, int m) {  // 0 <= m <= l
  return std::size_t(l) * (l + 1) / 2 + m;
}

inline std::size_t lm_index(int l, int m) {  // -l <= m <= l
  return std::size_t(l) * l + l + m;
}

// Degree-indexed real coefficients a_{lm}, 0 <= l <= L.
struct SHCoefficients {
  int band_limit = 0;
  std::vector<double> a;  // size (L+1)^2, indexed by lm_index

  explicit SHCoefficients(int L = 0)
      : band_limit(L), a(std::size_t(L + 1) * (L + 1), 0.0) {}

  double& operator()(int l, int m) { return a[lm_index(l, m)]; }
  double operator()(int l, int m) const { return a[lm_index(l, m)]; }
};

namespace detail {

// Normalized associated Legendre values Pb_{lm}(x) and d/dtheta Pb_{lm}
// for all 0 <= m <= l <= L at one colatitude. Stable three-term upward
// recurrence in l for each m.
struct LegendreTable {
  int L = 0;
  std::vector<double> p;       // tri_index
  std::vector<double> dp;      // d/dtheta, tri_index

  LegendreTable(int Lmax, double x, double sx) : L(Lmax) {
    const std::size_t n = tri_index(Lmax, Lmax) + 1;
    p.assign(n, 0.0);
    dp.assign(n, 0.0);
    p[tri_index(0, 0)] = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    for (int m = 1; m <= Lmax; ++m)
      p[tri_index(m, m)] =
          p[tri_index(m - 1, m - 1)] * sx * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    for (int m = 0; m < Lmax; ++m)
      p[tri_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * p[tri_index(m, m)];
    for (int m = 0; m <= Lmax; ++m) {
      for (int l = m + 2; l <= Lmax; ++l) {
        const double a =
            std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        const double b = std::sqrt(
            ((double(l - 1) * (l - 1) - double(m) * m)) /
            (4.0 * double(l - 1) * (l - 1) - 1.0));
        p[tri_index(l, m)] =
            a * (x * p[tri_index(l - 1, m)] - b * p[tri_index(l - 2, m)]);
      }
    }
    // sin(t) d/dt Pb_lm = l x Pb_lm - sqrt((l^2-m^2)(2l+1)/(2l-1)) Pb_{l-1,m}
    for (int l = 0; l <= Lmax; ++l) {
      for (int m = 0; m <= l; ++m) {
        double low = (l > m) ? p[tri_index(l - 1, m)] : 0.0;
        double c = (l > 0) ? std::sqrt((double(l) * l - double(m) * m) *
                                       (2.0 * l + 1.0) / (2.0 * l - 1.0))
                           : 0.0;
        dp[tri_index(l, m)] = (l * x * p[tri_index(l, m)] - c * low) / sx;
      }
    }
  }
};

}  // namespace detail

// Pointwise basis values at one sphere point for one (l, m): the scalar
// harmonic, its gradient in the orthonormal dyad, and the electric/magnetic
// traceless second-derivative tensors.
struct BasisPoint {
  double y = 0.0;
  double grad_theta = 0.0, grad_phi = 0.0;      // (dY/dt, dY/dp / sin t)
  double e_tt = 0.0, e_tp = 0.0;                // electric STT components
};

namespace detail {

inline BasisPoint basis_point(const LegendreTable& tab, int l, int m,
                              double x, double sx, double phi) {
  const double cot = x / sx;
  const int ma = std::abs(m);
  const double r = (m == 0 ? 1.0 : std::numbers::sqrt2) * tab.p[tri_index(l, ma)];
  const double rp = (m == 0 ? 1.0 : std::numbers::sqrt2) * tab.dp[tri_index(l, ma)];
  double trig, dtrig;  // azimuthal factor and its phi-derivative
  if (m >= 0) {
    trig = std::cos(ma * phi);
    dtrig = -ma * std::sin(ma * phi);
  } else {
    trig = std::sin(ma * phi);
    dtrig = ma * std::cos(ma * phi);
  }
  BasisPoint b;
  b.y = r * trig;
  b.grad_theta = rp * trig;
  b.grad_phi = r * dtrig / sx;
  const double ll1 = double(l) * (l + 1);
  b.e_tt = (-cot * rp + (double(ma) * ma / (sx * sx) - 0.5 * ll1) * r) * trig;
  b.e_tp = ((rp - cot * r) / sx) * dtrig;
  return b;
}

}  // namespace detail

// Per-grid table of all basis functions; built once per grid and cached by
// the transform layer. Memory at L=16 is a few MB.
class BasisTable {
public:
  explicit BasisTable(const SphereGrid& g) : grid_(&g), L_(g.band_limit) {
    const std::size_t nlm = std::size_t(L_ + 1) * (L_ + 1);
    data_.resize(g.n_nodes() * nlm);
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
      detail::LegendreTable tab(L_, g.cos_theta[j], g.sin_theta[j]);
      for (std::size_t k = 0; k < g.n_phi(); ++k) {
        for (int l = 0; l <= L_; ++l)
          for (int m = -l; m <= l; ++m)
            data_[(j * g.n_phi() + k) * nlm + lm_index(l, m)] =
                detail::basis_point(tab, l, m, g.cos_theta[j], g.sin_theta[j],
                                    g.phi[k]);
      }
    }
  }

  const BasisPoint& at(std::size_t node, int l, int m) const {
    const std::size_t nlm = std::size_t(L_ + 1) * (L_ + 1);
    return data_[node * nlm + lm_index(l, m)];
  }

  int band_limit() const { return L_; }
  const SphereGrid& grid() const { return *grid_; }

private:
  const SphereGrid* grid_;
  int L_;
  std::vector<BasisPoint> data_;
};

// Evaluate Y_lm at an arbitrary point (off-grid). Used by the kernel
// quadrature and the detector's direction sampling.
inline double eval_harmonic(int l, int m, double cos_theta, double phi) {
  const double sx = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  detail::LegendreTable tab(l, cos_theta, sx > 0 ? sx : 1e-300);
  const int ma = std::abs(m);
  const double r = (m == 0 ? 1.0 : std::numbers::sqrt2) * tab.p[tri_index(l, ma)];
  if (m > 0) return r * std::cos(ma * phi);
  if (m < 0) return r * std::sin(ma * phi);
  return r;
}

}  // namespace nullrad::sphere
