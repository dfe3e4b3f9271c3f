#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "nullrad/errors.hpp"
#include "nullrad/sphere/grid.hpp"

namespace nullrad::sphere {

// Real samples at the grid nodes, row-major (theta, phi).
struct ScalarField {
  SphereGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const SphereGrid& g)
      : grid(g), values(g.n_nodes(), 0.0) {}

  double& at(std::size_t j, std::size_t k) { return values[j * grid.n_phi() + k]; }
  double at(std::size_t j, std::size_t k) const {
    return values[j * grid.n_phi() + k];
  }
};

// Tangent 1-form in the orthonormal dyad {e_theta, e_phi}.
struct OneFormField {
  SphereGrid grid;
  std::vector<double> comp_theta;
  std::vector<double> comp_phi;

  OneFormField() = default;
  explicit OneFormField(const SphereGrid& g)
      : grid(g), comp_theta(g.n_nodes(), 0.0), comp_phi(g.n_nodes(), 0.0) {}

  // pointwise |V|^2
  double norm2_at(std::size_t n) const {
    return comp_theta[n] * comp_theta[n] + comp_phi[n] * comp_phi[n];
  }
};

// Symmetric traceless 2-tensor tangent to S^2. Only (T_tt, T_tp) are stored;
// T_pp = -T_tt and T_pt = T_tp by symmetry/tracelessness.
struct STTField {
  SphereGrid grid;
  std::vector<double> comp_tt;
  std::vector<double> comp_tp;

  STTField() = default;
  explicit STTField(const SphereGrid& g)
      : grid(g), comp_tt(g.n_nodes(), 0.0), comp_tp(g.n_nodes(), 0.0) {}

  // pointwise |T|^2 = 2 (T_tt^2 + T_tp^2)
  double norm2_at(std::size_t n) const {
    return 2.0 * (comp_tt[n] * comp_tt[n] + comp_tp[n] * comp_tp[n]);
  }
};

// int_{S^2} f dmu by the grid quadrature.
inline double integrate(const ScalarField& f) {
  double s = 0.0;
  const std::size_t np = f.grid.n_phi();
  for (std::size_t j = 0; j < f.grid.n_theta(); ++j) {
    double row = 0.0;
    for (std::size_t k = 0; k < np; ++k) row += f.at(j, k);
    s += row * f.grid.node_weight(j);
  }
  return s;
}

inline double mean(const ScalarField& f) {
  return integrate(f) / (4.0 * std::numbers::pi);
}

// L^2(S^2) norm of a scalar field.
inline double l2_norm(const ScalarField& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.grid.n_theta(); ++j)
    for (std::size_t k = 0; k < f.grid.n_phi(); ++k)
      s += f.at(j, k) * f.at(j, k) * f.grid.node_weight(j);
  return std::sqrt(s);
}

inline double l2_norm(const OneFormField& v) {
  double s = 0.0;
  const std::size_t np = v.grid.n_phi();
  for (std::size_t j = 0; j < v.grid.n_theta(); ++j)
    for (std::size_t k = 0; k < np; ++k)
      s += v.norm2_at(j * np + k) * v.grid.node_weight(j);
  return std::sqrt(s);
}

inline double l2_norm(const STTField& t) {
  double s = 0.0;
  const std::size_t np = t.grid.n_phi();
  for (std::size_t j = 0; j < t.grid.n_theta(); ++j)
    for (std::size_t k = 0; k < np; ++k)
      s += t.norm2_at(j * np + k) * t.grid.node_weight(j);
  return std::sqrt(s);
}

inline double sup_pointwise_norm(const STTField& t) {
  double m = 0.0;
  for (std::size_t n = 0; n < t.grid.n_nodes(); ++n)
    m = std::max(m, std::sqrt(t.norm2_at(n)));
  return m;
}

inline double sup_pointwise_norm(const OneFormField& v) {
  double m = 0.0;
  for (std::size_t n = 0; n < v.grid.n_nodes(); ++n)
    m = std::max(m, std::sqrt(v.norm2_at(n)));
  return m;
}

}  // namespace nullrad::sphere
