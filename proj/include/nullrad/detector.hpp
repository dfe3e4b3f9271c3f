#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "nullrad/errors.hpp"
#include "nullrad/radiation.hpp"
#include "nullrad/sphere/fields.hpp"

namespace nullrad {

// Test-mass configuration: initial arm separation d0, source distance r,
// source direction (theta, phi) on the sphere grid. Index convention for
// the traces below: x[B][A] is coordinate A of mass B, with the 2x2
// symmetric traceless drive A_AB acting in the horizontal plane spanned by
// the dyad {e_theta, e_phi} at the source direction.
struct DetectorConfig {
  double d0 = 1.0;
  double r = 100.0;
  double theta = 0.5 * std::numbers::pi;
  double phi = 0.0;
  bool include_em_correction = false;
};

struct DetectorTrace {
  std::vector<double> t_grid;
  std::array<std::array<std::vector<double>, 2>, 2> x;  // x[B][A]
  std::array<std::array<std::vector<double>, 2>, 2> v;
  std::vector<double> x3;          // vertical component, zero at leading order
  double dx[2][2] = {{0, 0}, {0, 0}};  // permanent displacement
};

struct DriveSeries {
  std::vector<double> u_grid;
  std::vector<double> a_tt, a_tp;  // 2x2 STT drive components at the direction
  std::vector<double> af_norm2;    // |A_F|^2 at the direction, for the EM term
};

namespace detail {

// Bilinear interpolation on the sphere grid in (cos theta, phi); phi is
// periodic, theta is clamped to the Gauss node range near the poles.
inline double bilinear(const sphere::SphereGrid& g,
                       const std::vector<double>& vals, double theta,
                       double phi) {
  if (!(theta >= 0.0) || !(theta <= std::numbers::pi))
    throw RangeError("direction colatitude outside [0, pi]");
  const double ct = std::cos(theta);
  const std::size_t nt = g.n_theta(), np = g.n_phi();

  // colatitude bracket (cos_theta is descending in theta-ascending order)
  std::size_t j0 = 0;
  while (j0 + 2 < nt && g.cos_theta[j0 + 1] > ct) ++j0;
  const double c0 = g.cos_theta[j0], c1 = g.cos_theta[j0 + 1];
  double wt = (c0 - ct) / (c0 - c1);
  wt = std::clamp(wt, 0.0, 1.0);

  const double dphi = 2.0 * std::numbers::pi / double(np);
  double pw = phi / dphi;
  pw -= std::floor(pw / double(np)) * double(np);
  const std::size_t k0 = std::size_t(std::floor(pw)) % np;
  const std::size_t k1 = (k0 + 1) % np;
  const double wp = pw - std::floor(pw);

  const double a = vals[j0 * np + k0] * (1 - wp) + vals[j0 * np + k1] * wp;
  const double b =
      vals[(j0 + 1) * np + k0] * (1 - wp) + vals[(j0 + 1) * np + k1] * wp;
  return a * (1 - wt) + b * wt;
}

// 4-point Lagrange interpolation of a uniformly indexed series at real
// index s (grid may be non-uniform in u; interpolation is in u directly).
inline double lagrange4(const std::vector<double>& ug,
                        const std::vector<double>& f, double u) {
  const std::size_t n = ug.size();
  const auto it = std::upper_bound(ug.begin(), ug.end(), u);
  std::size_t i = it == ug.begin() ? 0 : std::size_t(it - ug.begin()) - 1;
  i = std::min(i, n - 2);
  const std::size_t lo = i >= 1 ? std::min(i - 1, n - 4) : 0;
  double acc = 0.0;
  for (std::size_t a = lo; a < lo + 4; ++a) {
    double w = 1.0;
    for (std::size_t b = lo; b < lo + 4; ++b)
      if (b != a) w *= (u - ug[b]) / (ug[a] - ug[b]);
    acc += w * f[a];
  }
  return acc;
}

}  // namespace detail

// The 2x2 drive A_AB(u) at the source direction: taken from the stored A_W
// when present, otherwise -4 times a centered finite difference of Xi.
inline DriveSeries drive_tensor(const RadiativePayload& p, double theta,
                                double phi) {
  p.validate();
  const std::size_t n = p.n_u();
  if (n < 3) throw RangeError("drive needs at least 3 u samples");
  DriveSeries d;
  d.u_grid = p.u_grid;
  d.a_tt.resize(n);
  d.a_tp.resize(n);
  d.af_norm2.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double at = detail::bilinear(p.grid, p.a_f[i].comp_theta, theta, phi);
    const double ap = detail::bilinear(p.grid, p.a_f[i].comp_phi, theta, phi);
    d.af_norm2[i] = at * at + ap * ap;
  }

  if (p.has_a_w()) {
    for (std::size_t i = 0; i < n; ++i) {
      d.a_tt[i] = detail::bilinear(p.grid, p.a_w[i].comp_tt, theta, phi);
      d.a_tp[i] = detail::bilinear(p.grid, p.a_w[i].comp_tp, theta, phi);
    }
    return d;
  }

  std::vector<double> xtt(n), xtp(n);
  for (std::size_t i = 0; i < n; ++i) {
    xtt[i] = detail::bilinear(p.grid, p.xi[i].comp_tt, theta, phi);
    xtp[i] = detail::bilinear(p.grid, p.xi[i].comp_tp, theta, phi);
  }
  auto fd = [&](const std::vector<double>& f, std::size_t i) {
    if (i == 0) return (f[1] - f[0]) / (p.u_grid[1] - p.u_grid[0]);
    if (i == n - 1)
      return (f[n - 1] - f[n - 2]) / (p.u_grid[n - 1] - p.u_grid[n - 2]);
    return (f[i + 1] - f[i - 1]) / (p.u_grid[i + 1] - p.u_grid[i - 1]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    d.a_tt[i] = -4.0 * fd(xtt, i);
    d.a_tp[i] = -4.0 * fd(xtp, i);
  }
  return d;
}

// Integrates the linearized Jacobi equation
//   xdd^A_(B) = -1/(4r) A_AB x^B - 1/(8r^2) |A_F|^2 x^A + ...
// with the initial positions d0 delta substituted on the right side, from
// rest. Classical RK4 with 4-point Lagrange drive interpolation; the step
// is halved until the final positions stabilize to 0.1%.
inline DetectorTrace integrate_jacobi(const DetectorConfig& cfg,
                                      const DriveSeries& drive) {
  if (!(cfg.d0 > 0.0) || !(cfg.r > 0.0)) throw DomainError("need d0, r > 0");
  const std::size_t n = drive.u_grid.size();
  if (n < 4) throw RangeError("drive needs at least 4 samples");

  // forcing per mass B, coordinate A, at time u (positions linearized)
  auto force = [&](double u, int A, int B) {
    const double att = detail::lagrange4(drive.u_grid, drive.a_tt, u);
    const double atp = detail::lagrange4(drive.u_grid, drive.a_tp, u);
    const double aab = (A == B) ? (A == 0 ? att : -att) : atp;
    double f = -cfg.d0 / (4.0 * cfg.r) * aab;
    if (cfg.include_em_correction && A == B) {
      const double af2 = detail::lagrange4(drive.u_grid, drive.af_norm2, u);
      f -= cfg.d0 / (8.0 * cfg.r * cfg.r) * af2;
    }
    return f;
  };

  auto run = [&](int refine, DetectorTrace* out) {
    std::array<std::array<double, 2>, 2> pos{}, vel{};
    std::array<std::array<double, 2>, 2> final_pos{};
    if (out) {
      out->t_grid = drive.u_grid;
      for (int B = 0; B < 2; ++B)
        for (int A = 0; A < 2; ++A) {
          out->x[B][A].assign(n, 0.0);
          out->v[B][A].assign(n, 0.0);
        }
      out->x3.assign(n, 0.0);
    }
    for (int B = 0; B < 2; ++B)
      for (int A = 0; A < 2; ++A) pos[B][A] = A == B ? cfg.d0 : 0.0;
    if (out)
      for (int B = 0; B < 2; ++B)
        for (int A = 0; A < 2; ++A) out->x[B][A][0] = pos[B][A];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = (drive.u_grid[i + 1] - drive.u_grid[i]) / refine;
      for (int s = 0; s < refine; ++s) {
        const double t = drive.u_grid[i] + s * h;
        for (int B = 0; B < 2; ++B)
          for (int A = 0; A < 2; ++A) {
            const double f1 = force(t, A, B);
            const double f2 = force(t + 0.5 * h, A, B);
            const double f3 = force(t + h, A, B);
            const double x0 = pos[B][A], v0 = vel[B][A];
            // RK4 for xdd = f(t): position and velocity updates
            pos[B][A] = x0 + h * v0 + h * h / 6.0 * (f1 + 2.0 * f2);
            vel[B][A] = v0 + h / 6.0 * (f1 + 4.0 * f2 + f3);
          }
      }
      if (out)
        for (int B = 0; B < 2; ++B)
          for (int A = 0; A < 2; ++A) {
            out->x[B][A][i + 1] = pos[B][A];
            out->v[B][A][i + 1] = vel[B][A];
          }
    }
    for (int B = 0; B < 2; ++B)
      for (int A = 0; A < 2; ++A) final_pos[B][A] = pos[B][A];
    return final_pos;
  };

  // displacement scale for the relative convergence test
  double scale = 0.0;
  auto prev = run(1, nullptr);
  int refine = 2;
  bool converged = false;
  for (int iter = 0; iter < 10; ++iter) {
    auto cur = run(refine, nullptr);
    double diff = 0.0;
    scale = 0.0;
    for (int B = 0; B < 2; ++B)
      for (int A = 0; A < 2; ++A) {
        diff = std::max(diff, std::abs(cur[B][A] - prev[B][A]));
        scale = std::max(scale,
                         std::abs(cur[B][A] - (A == B ? cfg.d0 : 0.0)));
      }
    if (diff <= 1e-3 * std::max(scale, 1e-300 * cfg.d0) || diff == 0.0) {
      converged = true;
      break;
    }
    prev = cur;
    refine *= 2;
  }
  if (!converged)
    throw IntegratorError("step halving failed to stabilize to 0.1%");

  DetectorTrace trace;
  run(refine, &trace);
  for (int B = 0; B < 2; ++B)
    for (int A = 0; A < 2; ++A)
      trace.dx[B][A] = trace.x[B][A].back() - trace.x[B][A].front();
  return trace;
}

// The closed forms: velocities (d0/r) Xi_AB(t) and positions
// d0 delta - (d0/r) (Sigma_AB(t) - Sigma^-_AB).
inline DetectorTrace closed_form_trace(const DetectorConfig& cfg,
                                       const RadiativePayload& p) {
  if (!(cfg.d0 > 0.0) || !(cfg.r > 0.0)) throw DomainError("need d0, r > 0");
  p.validate();
  const std::size_t n = p.n_u();
  const SigmaSeries ss = sigma_from_xi(p);

  DetectorTrace trace;
  trace.t_grid = p.u_grid;
  trace.x3.assign(n, 0.0);
  const double s = cfg.d0 / cfg.r;
  for (int B = 0; B < 2; ++B)
    for (int A = 0; A < 2; ++A) {
      trace.x[B][A].resize(n);
      trace.v[B][A].resize(n);
    }
  for (std::size_t i = 0; i < n; ++i) {
    const double xtt =
        detail::bilinear(p.grid, p.xi[i].comp_tt, cfg.theta, cfg.phi);
    const double xtp =
        detail::bilinear(p.grid, p.xi[i].comp_tp, cfg.theta, cfg.phi);
    const double stt =
        detail::bilinear(p.grid, ss.sigma[i].comp_tt, cfg.theta, cfg.phi) -
        detail::bilinear(p.grid, ss.sigma[0].comp_tt, cfg.theta, cfg.phi);
    const double stp =
        detail::bilinear(p.grid, ss.sigma[i].comp_tp, cfg.theta, cfg.phi) -
        detail::bilinear(p.grid, ss.sigma[0].comp_tp, cfg.theta, cfg.phi);
    const double xi_ab[2][2] = {{xtt, xtp}, {xtp, -xtt}};
    const double sg_ab[2][2] = {{stt, stp}, {stp, -stt}};
    for (int B = 0; B < 2; ++B)
      for (int A = 0; A < 2; ++A) {
        trace.v[B][A][i] = s * xi_ab[A][B];
        trace.x[B][A][i] = (A == B ? cfg.d0 : 0.0) - s * sg_ab[A][B];
      }
  }
  for (int B = 0; B < 2; ++B)
    for (int A = 0; A < 2; ++A)
      trace.dx[B][A] = trace.x[B][A].back() - trace.x[B][A].front();
  return trace;
}

}  // namespace nullrad
