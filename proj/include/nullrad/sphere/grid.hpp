#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "nullrad/errors.hpp"

namespace nullrad::sphere {

// Product quadrature grid on the unit sphere: Gauss-Legendre nodes in
// cos(theta) crossed with equispaced longitudes. Gauss nodes exclude the
// poles, so the orthonormal dyad {e_theta, e_phi} is regular at every node.
// Quadrature is exact for integrands polynomial in cos(theta) of degree
// <= 2*n_theta - 1 and trigonometric in phi of degree <= n_phi - 1.
struct SphereGrid {
  int band_limit = 0;                 // max spherical-harmonic degree L
  std::vector<double> cos_theta;      // Gauss-Legendre nodes, descending theta
  std::vector<double> sin_theta;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> gauss_weight;   // per-colatitude weights (sum = 2)

  std::size_t n_theta() const { return theta.size(); }
  std::size_t n_phi() const { return phi.size(); }
  std::size_t n_nodes() const { return n_theta() * n_phi(); }

  // Full quadrature weight of node (j, k): integrates f d(mu) over S^2.
  double node_weight(std::size_t j) const {
    return gauss_weight[j] * (2.0 * std::numbers::pi / double(n_phi()));
  }

  bool same_layout(const SphereGrid& o) const {
    return band_limit == o.band_limit && n_theta() == o.n_theta() &&
           n_phi() == o.n_phi();
  }
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int mid = (n + 1) / 2;
  for (int i = 0; i < mid; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int l = 0; l < n; ++l) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * l + 1.0) * z * p1 - l * p2) / (l + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace detail

inline SphereGrid make_grid(int band_limit, int n_theta = 0, int n_phi = 0) {
  if (band_limit < 2) throw ResolutionError("band limit must be >= 2");
  if (n_theta == 0) n_theta = band_limit + 1;
  if (n_phi == 0) n_phi = 2 * band_limit + 1;
  if (n_theta < band_limit + 1)
    throw ResolutionError("n_theta < L+1 cannot resolve band limit");
  if (n_phi < 2 * band_limit + 1)
    throw ResolutionError("n_phi < 2L+1 cannot resolve band limit");

  SphereGrid g;
  g.band_limit = band_limit;
  detail::gauss_legendre(n_theta, g.cos_theta, g.gauss_weight);
  // descending in cos -> ascending theta
  std::reverse(g.cos_theta.begin(), g.cos_theta.end());
  std::reverse(g.gauss_weight.begin(), g.gauss_weight.end());
  g.theta.resize(n_theta);
  g.sin_theta.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) {
    g.theta[j] = std::acos(g.cos_theta[j]);
    g.sin_theta[j] = std::sqrt(1.0 - g.cos_theta[j] * g.cos_theta[j]);
  }
  g.phi.resize(n_phi);
  for (int k = 0; k < n_phi; ++k)
    g.phi[k] = 2.0 * std::numbers::pi * k / n_phi;
  return g;
}

}  // namespace nullrad::sphere
