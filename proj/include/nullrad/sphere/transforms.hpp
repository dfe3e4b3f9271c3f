#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "nullrad/errors.hpp"
#include "nullrad/sphere/fields.hpp"
#include "nullrad/sphere/harmonics.hpp"

namespace nullrad::sphere {

namespace detail {

// Basis tables are immutable once built; cache one per grid layout.
inline const BasisTable& basis_for(const SphereGrid& g) {
  struct Entry {
    SphereGrid grid;
    std::unique_ptr<BasisTable> table;
  };
  static std::mutex mu;
  static std::map<std::tuple<int, std::size_t, std::size_t>,
                  std::unique_ptr<Entry>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(g.band_limit, g.n_theta(), g.n_phi());
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto entry = std::make_unique<Entry>();
    entry->grid = g;
    entry->table = std::make_unique<BasisTable>(entry->grid);
    it = cache.emplace(key, std::move(entry)).first;
  }
  return *it->second->table;
}

}  // namespace detail

// ----- scalar transforms ---------------------------------------------------

inline SHCoefficients analyze(const ScalarField& f) {
  const SphereGrid& g = f.grid;
  const int L = g.band_limit;
  if (g.n_theta() < std::size_t(L + 1) || g.n_phi() < std::size_t(2 * L + 1))
    throw ResolutionError("grid cannot resolve its declared band limit");
  const BasisTable& bt = detail::basis_for(g);
  SHCoefficients c(L);
  const std::size_t np = g.n_phi();
  for (std::size_t j = 0; j < g.n_theta(); ++j) {
    const double w = g.node_weight(j);
    for (std::size_t k = 0; k < np; ++k) {
      const double fw = f.at(j, k) * w;
      const std::size_t node = j * np + k;
      for (int l = 0; l <= L; ++l)
        for (int m = -l; m <= l; ++m)
          c(l, m) += fw * bt.at(node, l, m).y;
    }
  }
  return c;
}

inline ScalarField synthesize(const SHCoefficients& c, const SphereGrid& g) {
  if (c.band_limit > g.band_limit)
    throw ResolutionError("coefficient degree exceeds grid band limit");
  const BasisTable& bt = detail::basis_for(g);
  ScalarField f(g);
  for (std::size_t node = 0; node < g.n_nodes(); ++node) {
    double s = 0.0;
    for (int l = 0; l <= c.band_limit; ++l)
      for (int m = -l; m <= l; ++m) {
        const double a = c(l, m);
        if (a != 0.0) s += a * bt.at(node, l, m).y;
      }
    f.values[node] = s;
  }
  return f;
}

// Spectral Laplacian: a_lm -> -l(l+1) a_lm.
inline ScalarField laplacian(const ScalarField& f) {
  SHCoefficients c = analyze(f);
  for (int l = 0; l <= c.band_limit; ++l)
    for (int m = -l; m <= l; ++m) c(l, m) *= -double(l) * (l + 1);
  return synthesize(c, f.grid);
}

// Relative mean tolerance for Poisson sources (design constant).
inline constexpr double kPoissonMeanTol = 1e-8;

// Unique mean-free solution of lap Phi = f - mean(f). A source whose mean
// exceeds kPoissonMeanTol * ||f|| is rejected: the caller passed a raw F
// instead of F - Fbar.
inline ScalarField solve_poisson(const ScalarField& f) {
  SHCoefficients c = analyze(f);
  const double fbar = c(0, 0) / std::sqrt(4.0 * std::numbers::pi);
  const double fnorm = l2_norm(f);
  if (fnorm > 0.0 && std::abs(fbar) > kPoissonMeanTol * fnorm)
    throw NonMeanFreeSourceError(
        "source mean " + std::to_string(fbar) +
        " exceeds tolerance; pass F - mean(F), not F");
  c(0, 0) = 0.0;
  for (int l = 1; l <= c.band_limit; ++l)
    for (int m = -l; m <= l; ++m) c(l, m) /= -double(l) * (l + 1);
  return synthesize(c, f.grid);
}

// ----- 1-form calculus -----------------------------------------------------
//
// Hodge split V = grad f + *grad g with the in-plane rotation
// (*V)_theta = -V_phi, (*V)_phi = V_theta, and mean-free potentials.

struct OneFormPotentials {
  SHCoefficients electric;  // f: V_grad = grad f
  SHCoefficients magnetic;  // g: V_curl = *grad g
};

inline OneFormField gradient(const ScalarField& f) {
  SHCoefficients c = analyze(f);
  const SphereGrid& g = f.grid;
  const BasisTable& bt = detail::basis_for(g);
  OneFormField v(g);
  for (std::size_t node = 0; node < g.n_nodes(); ++node) {
    double vt = 0.0, vp = 0.0;
    for (int l = 1; l <= c.band_limit; ++l)
      for (int m = -l; m <= l; ++m) {
        const double a = c(l, m);
        if (a == 0.0) continue;
        const BasisPoint& b = bt.at(node, l, m);
        vt += a * b.grad_theta;
        vp += a * b.grad_phi;
      }
    v.comp_theta[node] = vt;
    v.comp_phi[node] = vp;
  }
  return v;
}

inline OneFormField star(const OneFormField& v) {
  OneFormField w(v.grid);
  for (std::size_t n = 0; n < v.grid.n_nodes(); ++n) {
    w.comp_theta[n] = -v.comp_phi[n];
    w.comp_phi[n] = v.comp_theta[n];
  }
  return w;
}

// Synthesize grad f + *grad g from potentials.
inline OneFormField synthesize_oneform(const OneFormPotentials& pot,
                                       const SphereGrid& g) {
  const BasisTable& bt = detail::basis_for(g);
  OneFormField v(g);
  const int L = std::max(pot.electric.band_limit, pot.magnetic.band_limit);
  if (L > g.band_limit)
    throw ResolutionError("potential degree exceeds grid band limit");
  for (std::size_t node = 0; node < g.n_nodes(); ++node) {
    double vt = 0.0, vp = 0.0;
    for (int l = 1; l <= L; ++l)
      for (int m = -l; m <= l; ++m) {
        const BasisPoint& b = bt.at(node, l, m);
        if (l <= pot.electric.band_limit) {
          const double a = pot.electric(l, m);
          vt += a * b.grad_theta;
          vp += a * b.grad_phi;
        }
        if (l <= pot.magnetic.band_limit) {
          const double a = pot.magnetic(l, m);
          vt += a * (-b.grad_phi);  // (*grad)_theta
          vp += a * b.grad_theta;   // (*grad)_phi
        }
      }
    v.comp_theta[node] = vt;
    v.comp_phi[node] = vp;
  }
  return v;
}

// Project a 1-form onto its scalar potentials:
//   f_lm = <V, grad Y_lm> / (l(l+1)),   g_lm = <V, *grad Y_lm> / (l(l+1)).
inline OneFormPotentials decompose_oneform(const OneFormField& v) {
  const SphereGrid& g = v.grid;
  const int L = g.band_limit;
  const BasisTable& bt = detail::basis_for(g);
  OneFormPotentials pot{SHCoefficients(L), SHCoefficients(L)};
  const std::size_t np = g.n_phi();
  for (std::size_t j = 0; j < g.n_theta(); ++j) {
    const double w = g.node_weight(j);
    for (std::size_t k = 0; k < np; ++k) {
      const std::size_t node = j * np + k;
      const double vt = v.comp_theta[node] * w;
      const double vp = v.comp_phi[node] * w;
      for (int l = 1; l <= L; ++l)
        for (int m = -l; m <= l; ++m) {
          const BasisPoint& b = bt.at(node, l, m);
          pot.electric(l, m) += vt * b.grad_theta + vp * b.grad_phi;
          pot.magnetic(l, m) += vt * (-b.grad_phi) + vp * b.grad_theta;
        }
    }
  }
  for (int l = 1; l <= L; ++l)
    for (int m = -l; m <= l; ++m) {
      const double ll1 = double(l) * (l + 1);
      pot.electric(l, m) /= ll1;
      pot.magnetic(l, m) /= ll1;
    }
  return pot;
}

// div V: for V = grad f + *grad g this is lap f (exactly, in spectral space).
inline ScalarField divergence_oneform(const OneFormField& v) {
  OneFormPotentials pot = decompose_oneform(v);
  for (int l = 1; l <= pot.electric.band_limit; ++l)
    for (int m = -l; m <= l; ++m)
      pot.electric(l, m) *= -double(l) * (l + 1);
  return synthesize(pot.electric, v.grid);
}

// curl V = lap g of the magnetic potential; curl grad f = 0.
inline ScalarField curl_oneform(const OneFormField& v) {
  OneFormPotentials pot = decompose_oneform(v);
  for (int l = 1; l <= pot.magnetic.band_limit; ++l)
    for (int m = -l; m <= l; ++m)
      pot.magnetic(l, m) *= -double(l) * (l + 1);
  return synthesize(pot.magnetic, v.grid);
}

// ----- STT calculus --------------------------------------------------------

struct STTPotentials {
  SHCoefficients electric;        // supported on l >= 2
  SHCoefficients magnetic;        // supported on l >= 2
  double low_degree_residual = 0.0;  // l in {0,1} content removed (diagnostic)
};

// Measured per-degree operator constants. lambda_e/lambda_b are the
// divergence eigenvalues: div(De e) = grad(lambda_e,l e_l), and N_l the
// L^2 norm^2 of the unit-potential basis tensors. All values come from grid
// quadrature of the recurrence-evaluated basis, not from literature.
struct OperatorConstants {
  int band_limit = 0;
  std::vector<double> basis_norm2;  // N_l = <De Y_l0, De Y_l0>, l >= 2
  std::vector<double> lambda_e;
  std::vector<double> lambda_b;
};

inline OperatorConstants operator_constants(const SphereGrid& g) {
  const int L = g.band_limit;
  const BasisTable& bt = detail::basis_for(g);
  OperatorConstants oc;
  oc.band_limit = L;
  oc.basis_norm2.assign(L + 1, 0.0);
  oc.lambda_e.assign(L + 1, 0.0);
  oc.lambda_b.assign(L + 1, 0.0);
  const std::size_t np = g.n_phi();
  for (int l = 2; l <= L; ++l) {
    double n2 = 0.0;
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
      const double w = g.node_weight(j);
      for (std::size_t k = 0; k < np; ++k) {
        const BasisPoint& b = bt.at(j * np + k, l, 0);
        n2 += 2.0 * (b.e_tt * b.e_tt + b.e_tp * b.e_tp) * w;
      }
    }
    oc.basis_norm2[l] = n2;
    // Weak identity: <div(De Y), grad Y> = -<De Y, De Y>, and
    // div(De Y_l) = grad(lambda_l Y_l) gives lambda_l l(l+1) = -N_l.
    oc.lambda_e[l] = -n2 / (double(l) * (l + 1));
    oc.lambda_b[l] = oc.lambda_e[l];  // rotation preserves the norm
  }
  return oc;
}

inline STTField synthesize_stt(const STTPotentials& pot, const SphereGrid& g) {
  const int L = std::max(pot.electric.band_limit, pot.magnetic.band_limit);
  if (L > g.band_limit)
    throw ResolutionError("potential degree exceeds grid band limit");
  const BasisTable& bt = detail::basis_for(g);
  STTField t(g);
  for (std::size_t node = 0; node < g.n_nodes(); ++node) {
    double tt = 0.0, tp = 0.0;
    for (int l = 2; l <= L; ++l)
      for (int m = -l; m <= l; ++m) {
        const BasisPoint& b = bt.at(node, l, m);
        if (l <= pot.electric.band_limit) {
          const double a = pot.electric(l, m);
          tt += a * b.e_tt;
          tp += a * b.e_tp;
        }
        if (l <= pot.magnetic.band_limit) {
          const double a = pot.magnetic(l, m);
          tt += a * (-b.e_tp);  // magnetic = rotated electric
          tp += a * b.e_tt;
        }
      }
    t.comp_tt[node] = tt;
    t.comp_tp[node] = tp;
  }
  return t;
}

// Unique electric/magnetic potential split of an STT field (l >= 2). Content
// below l = 2 has no STT representation; its norm is reported as a
// truncation diagnostic, never an error.
inline STTPotentials decompose_stt(const STTField& t) {
  const SphereGrid& g = t.grid;
  const int L = g.band_limit;
  const BasisTable& bt = detail::basis_for(g);
  const OperatorConstants oc = operator_constants(g);
  STTPotentials pot{SHCoefficients(L), SHCoefficients(L), 0.0};
  const std::size_t np = g.n_phi();
  for (std::size_t j = 0; j < g.n_theta(); ++j) {
    const double w = g.node_weight(j);
    for (std::size_t k = 0; k < np; ++k) {
      const std::size_t node = j * np + k;
      const double tt = 2.0 * t.comp_tt[node] * w;
      const double tp = 2.0 * t.comp_tp[node] * w;
      for (int l = 2; l <= L; ++l)
        for (int m = -l; m <= l; ++m) {
          const BasisPoint& b = bt.at(node, l, m);
          pot.electric(l, m) += tt * b.e_tt + tp * b.e_tp;
          pot.magnetic(l, m) += tt * (-b.e_tp) + tp * b.e_tt;
        }
    }
  }
  for (int l = 2; l <= L; ++l)
    for (int m = -l; m <= l; ++m) {
      pot.electric(l, m) /= oc.basis_norm2[l];
      pot.magnetic(l, m) /= oc.basis_norm2[l];
    }
  // residual of the projection (includes any l<2-like content)
  STTField back = synthesize_stt(pot, g);
  double r2 = 0.0;
  for (std::size_t j = 0; j < g.n_theta(); ++j)
    for (std::size_t k = 0; k < np; ++k) {
      const std::size_t node = j * np + k;
      const double dtt = t.comp_tt[node] - back.comp_tt[node];
      const double dtp = t.comp_tp[node] - back.comp_tp[node];
      r2 += 2.0 * (dtt * dtt + dtp * dtp) * g.node_weight(j);
    }
  pot.low_degree_residual = std::sqrt(std::max(0.0, r2));
  return pot;
}

// div T through the potentials: div(De e) = grad(Lambda_e e),
// div(Db b) = *grad(Lambda_b b) with the measured per-l constants.
inline OneFormField divergence_stt(const STTField& t) {
  STTPotentials pot = decompose_stt(t);
  const OperatorConstants oc = operator_constants(t.grid);
  OneFormPotentials vp{SHCoefficients(pot.electric.band_limit),
                       SHCoefficients(pot.magnetic.band_limit)};
  for (int l = 2; l <= pot.electric.band_limit; ++l)
    for (int m = -l; m <= l; ++m) {
      vp.electric(l, m) = oc.lambda_e[l] * pot.electric(l, m);
      vp.magnetic(l, m) = oc.lambda_b[l] * pot.magnetic(l, m);
    }
  return synthesize_oneform(vp, t.grid);
}

// Relative tolerance for inadmissible content in invert_div_stt sources.
inline constexpr double kInvertSourceTol = 1e-8;

struct InvertDivReport {
  double magnetic_fraction = 0.0;  // |magnetic potential| / |electric|
  double l1_fraction = 0.0;        // projected-out l=1 gradient content
};

// Invert div T = V for the unique electric-parity l >= 2 STT field.
// V must be a pure gradient; l <= 1 content has no STT preimage.
inline STTField invert_div_stt(const OneFormField& v,
                               InvertDivReport* report = nullptr) {
  OneFormPotentials pot = decompose_oneform(v);
  const OperatorConstants oc = operator_constants(v.grid);
  const double vnorm = l2_norm(v);

  double mag2 = 0.0, l1_2 = 0.0, ele2 = 0.0;
  for (int l = 1; l <= pot.magnetic.band_limit; ++l)
    for (int m = -l; m <= l; ++m) {
      const double ll1 = double(l) * (l + 1);
      mag2 += ll1 * pot.magnetic(l, m) * pot.magnetic(l, m);
      ele2 += ll1 * pot.electric(l, m) * pot.electric(l, m);
      if (l == 1) l1_2 += ll1 * pot.electric(l, m) * pot.electric(l, m);
    }
  if (report != nullptr) {
    report->magnetic_fraction = vnorm > 0 ? std::sqrt(mag2) / vnorm : 0.0;
    report->l1_fraction = vnorm > 0 ? std::sqrt(l1_2) / vnorm : 0.0;
  }
  if (vnorm > 0.0 && std::sqrt(mag2) > kInvertSourceTol * vnorm)
    throw NonElectricSourceError(
        "1-form source has magnetic (curl) content; no electric STT preimage");
  if (vnorm > 0.0 && std::sqrt(l1_2) > kInvertSourceTol * vnorm &&
      report == nullptr)
    throw KernelObstructionError(
        "l=1 gradient content has no symmetric traceless preimage");

  STTPotentials tp{SHCoefficients(v.grid.band_limit),
                   SHCoefficients(v.grid.band_limit), 0.0};
  for (int l = 2; l <= v.grid.band_limit; ++l)
    for (int m = -l; m <= l; ++m)
      tp.electric(l, m) = pot.electric(l, m) / oc.lambda_e[l];
  return synthesize_stt(tp, v.grid);
}

}  // namespace nullrad::sphere
