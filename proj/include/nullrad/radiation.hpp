#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "nullrad/errors.hpp"
#include "nullrad/sphere/fields.hpp"
#include "nullrad/sphere/grid.hpp"

namespace nullrad {

// Radiative data at null infinity sampled over retarded time u. Xi and A_F
// are the mandatory radiative fields; the remaining series are optional and
// empty when absent. All fields share one grid and one u_grid.
struct RadiativePayload {
  sphere::SphereGrid grid;
  std::vector<double> u_grid;

  std::vector<sphere::STTField> xi;
  std::vector<sphere::OneFormField> a_f;

  std::vector<sphere::STTField> a_w;
  std::vector<sphere::OneFormField> b_w;
  std::vector<sphere::ScalarField> p_w, q_w, p_f, q_f;

  sphere::STTField sigma_minus;
  double m_minus = 0.0;

  bool has_a_w() const { return !a_w.empty(); }

  std::size_t n_u() const { return u_grid.size(); }

  void validate() const {
    if (u_grid.size() < 2) throw RangeError("u_grid needs at least 2 samples");
    for (std::size_t i = 1; i < u_grid.size(); ++i)
      if (!(u_grid[i] > u_grid[i - 1]))
        throw RangeError("u_grid must be strictly increasing");
    if (xi.size() != u_grid.size() || a_f.size() != u_grid.size())
      throw RangeError("Xi and A_F series must match u_grid length");
    auto check_len = [&](std::size_t n, const char* what) {
      if (n != 0 && n != u_grid.size())
        throw RangeError(std::string(what) + " series length mismatch");
    };
    check_len(a_w.size(), "A_W");
    check_len(b_w.size(), "B_W");
    check_len(p_w.size(), "P_W");
    check_len(q_w.size(), "Q_W");
    check_len(p_f.size(), "P_F");
    check_len(q_f.size(), "Q_F");
    for (const auto& t : xi)
      if (!t.grid.same_layout(grid)) throw RangeError("Xi grid mismatch");
    for (const auto& v : a_f)
      if (!v.grid.same_layout(grid)) throw RangeError("A_F grid mismatch");
  }

  std::size_t index_of(double u) const {
    const auto it = std::lower_bound(u_grid.begin(), u_grid.end(), u - 1e-12);
    if (it == u_grid.end() || std::abs(*it - u) > 1e-12)
      throw RangeError("u is not a grid sample");
    return std::size_t(it - u_grid.begin());
  }
};

struct MassCurve {
  std::vector<double> u_grid;
  std::vector<double> m;
  double m_minus = 0.0;
  double m_plus = 0.0;
  // power-law tail contributions beyond the grid ends, reported separately
  double tail_minus = 0.0;
  double tail_plus = 0.0;
};

struct DecayFit {
  std::string quantity;
  double exponent = 0.0;  // fitted slope of log sup-norm vs log(1+|u|)
  double constant = 0.0;  // fitted envelope constant C
  double residual = 0.0;  // rms log-space fit residual
  double bound = 0.0;     // required envelope exponent (positive number)
  bool pass = false;
  bool degenerate = false;  // field is identically zero on the fit window
};

struct DecayReport {
  std::vector<DecayFit> fits;
  bool all_pass() const {
    for (const auto& f : fits)
      if (!f.pass) return false;
    return true;
  }
};

// dM/du at one u sample: (1/8pi) int (|Xi|^2 + 1/2 |A_F|^2) dmu.
inline double mass_loss_rate(const RadiativePayload& p, std::size_t i) {
  if (i >= p.n_u()) throw RangeError("u index out of range");
  const auto& g = p.grid;
  double s = 0.0;
  const std::size_t np = g.n_phi();
  for (std::size_t j = 0; j < g.n_theta(); ++j) {
    double row = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      const std::size_t n = j * np + k;
      row += p.xi[i].norm2_at(n) + 0.5 * p.a_f[i].norm2_at(n);
    }
    s += row * g.node_weight(j);
  }
  return s / (8.0 * std::numbers::pi);
}

inline double mass_loss_rate(const RadiativePayload& p, double u) {
  return mass_loss_rate(p, p.index_of(u));
}

namespace detail {

// Least-squares fit y = a + b x; returns (a, b, rms residual).
inline void linear_fit(const std::vector<double>& x,
                       const std::vector<double>& y, double& a, double& b,
                       double& rms) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = double(n) * sxx - sx * sx;
  b = det != 0.0 ? (double(n) * sxy - sx * sy) / det : 0.0;
  a = (sy - b * sx) / double(n);
  double r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - a - b * x[i];
    r2 += e * e;
  }
  rms = std::sqrt(r2 / double(n));
}

// Fit the decay exponent of a positive sample series against (1+|u|); used
// both by decay_report and by the mass-curve tail model.
inline bool fit_envelope(const std::vector<double>& u,
                         const std::vector<double>& s, double& exponent,
                         double& constant, double& rms) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (s[i] > 1e-300) {
      lx.push_back(std::log1p(std::abs(u[i])));
      ly.push_back(std::log(s[i]));
    }
  if (lx.size() < 4) return false;
  double a = 0.0;
  linear_fit(lx, ly, a, exponent, rms);
  constant = std::exp(a);
  return true;
}

}  // namespace detail

// Cumulative trapezoid of the mass-loss rate; optional power-law tail
// extrapolation beyond the grid ends from per-side envelope fits.
inline MassCurve mass_curve(const RadiativePayload& p, bool tail_model = false) {
  p.validate();
  const std::size_t n = p.n_u();
  std::vector<double> rate(n);
  for (std::size_t i = 0; i < n; ++i) rate[i] = mass_loss_rate(p, i);

  MassCurve mc;
  mc.u_grid = p.u_grid;
  mc.m.resize(n);
  mc.m_minus = p.m_minus;

  if (tail_model) {
    // fit the rate on the outer quarter of each side and integrate the
    // fitted power law analytically past the grid end
    auto side_tail = [&](bool right) -> double {
      const double span = std::abs(p.u_grid[right ? n - 1 : 0]);
      std::vector<double> us, rs;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = p.u_grid[i];
        if ((right && u >= 0.75 * span) || (!right && u <= -0.75 * span)) {
          us.push_back(u);
          rs.push_back(rate[i]);
        }
      }
      double q = 0, c = 0, rms = 0;
      if (!detail::fit_envelope(us, rs, q, c, rms)) return 0.0;
      if (q >= -1.0) return 0.0;  // non-integrable tail; refuse to extrapolate
      const double edge = 1.0 + span;
      return c * std::pow(edge, q + 1.0) / (-(q + 1.0));
    };
    mc.tail_minus = side_tail(false);
    mc.tail_plus = side_tail(true);
  }

  mc.m[0] = p.m_minus + mc.tail_minus;
  for (std::size_t i = 1; i < n; ++i)
    mc.m[i] = mc.m[i - 1] + 0.5 * (rate[i] + rate[i - 1]) *
                                (p.u_grid[i] - p.u_grid[i - 1]);
  mc.m_plus = mc.m[n - 1] + mc.tail_plus;

  for (std::size_t i = 1; i < n; ++i)
    if (mc.m[i] < mc.m[i - 1])
      throw InternalError("mass curve is non-monotone");
  return mc;
}

// F(omega)/4pi with F = 1/8 int (|Xi|^2 + 1/2 |A_F|^2) du: energy radiated
// per unit solid angle.
inline sphere::ScalarField flux_per_solid_angle(const RadiativePayload& p) {
  p.validate();
  sphere::ScalarField out(p.grid);
  const std::size_t nn = p.grid.n_nodes();
  for (std::size_t i = 1; i < p.n_u(); ++i) {
    const double hw = 0.5 * (p.u_grid[i] - p.u_grid[i - 1]);
    for (std::size_t n = 0; n < nn; ++n) {
      const double a = p.xi[i - 1].norm2_at(n) + 0.5 * p.a_f[i - 1].norm2_at(n);
      const double b = p.xi[i].norm2_at(n) + 0.5 * p.a_f[i].norm2_at(n);
      out.values[n] += hw * (a + b);
    }
  }
  const double scale = 1.0 / (32.0 * std::numbers::pi);
  for (double& v : out.values) v *= scale;
  return out;
}

// The un-normalized angular flux functional F(omega) = int (|Xi|^2 +
// 1/2 |A_F|^2) du feeding the memory solve; equals 32 pi times
// flux_per_solid_angle by construction.
inline sphere::ScalarField memory_source(const RadiativePayload& p) {
  sphere::ScalarField out = flux_per_solid_angle(p);
  for (double& v : out.values) v *= 32.0 * std::numbers::pi;
  return out;
}

struct SigmaSeries {
  std::vector<sphere::STTField> sigma;
  sphere::STTField sigma_plus;
};

// Sigma(u) = Sigma^- - int_{-inf}^u Xi du' by cumulative trapezoid.
inline SigmaSeries sigma_from_xi(const RadiativePayload& p) {
  p.validate();
  SigmaSeries out;
  const std::size_t n = p.n_u();
  const std::size_t nn = p.grid.n_nodes();
  out.sigma.reserve(n);
  sphere::STTField cur = p.sigma_minus.grid.same_layout(p.grid)
                             ? p.sigma_minus
                             : sphere::STTField(p.grid);
  out.sigma.push_back(cur);
  for (std::size_t i = 1; i < n; ++i) {
    const double hw = 0.5 * (p.u_grid[i] - p.u_grid[i - 1]);
    for (std::size_t k = 0; k < nn; ++k) {
      cur.comp_tt[k] -= hw * (p.xi[i - 1].comp_tt[k] + p.xi[i].comp_tt[k]);
      cur.comp_tp[k] -= hw * (p.xi[i - 1].comp_tp[k] + p.xi[i].comp_tp[k]);
    }
    out.sigma.push_back(cur);
  }
  out.sigma_plus = out.sigma.back();
  return out;
}

// Xi(u) = -1/4 int_{-inf}^u A_W du' with Xi -> 0 as u -> -inf.
inline std::vector<sphere::STTField> xi_from_aw(const RadiativePayload& p) {
  if (!p.has_a_w()) throw AbsentFieldError("A_W is not present in the payload");
  p.validate();
  const std::size_t n = p.n_u();
  const std::size_t nn = p.grid.n_nodes();
  std::vector<sphere::STTField> out;
  out.reserve(n);
  sphere::STTField cur(p.grid);
  out.push_back(cur);
  for (std::size_t i = 1; i < n; ++i) {
    const double hw = 0.125 * (p.u_grid[i] - p.u_grid[i - 1]);
    for (std::size_t k = 0; k < nn; ++k) {
      cur.comp_tt[k] -= hw * (p.a_w[i - 1].comp_tt[k] + p.a_w[i].comp_tt[k]);
      cur.comp_tp[k] -= hw * (p.a_w[i - 1].comp_tp[k] + p.a_w[i].comp_tp[k]);
    }
    out.push_back(cur);
  }
  return out;
}

// Log-log envelope fits over the outer half of the u grid, checked against
// the required decay exponents: |Xi|, |A_F| <= C (1+|u|)^{-3/2}, |B_W| the
// same, |A_W| <= C (1+|u|)^{-5/2}.
inline DecayReport decay_report(const RadiativePayload& p) {
  p.validate();
  const double span =
      std::max(std::abs(p.u_grid.front()), std::abs(p.u_grid.back()));
  if (span < 10.0) throw RangeError("u grid must reach |u| >= 10");

  auto fit_one = [&](const std::string& name, double bound,
                     const std::vector<double>& sup) {
    DecayFit f;
    f.quantity = name;
    f.bound = bound;
    std::vector<double> us, ss;
    for (std::size_t i = 0; i < p.n_u(); ++i)
      if (std::abs(p.u_grid[i]) >= 0.5 * span) {
        us.push_back(p.u_grid[i]);
        ss.push_back(sup[i]);
      }
    if (!detail::fit_envelope(us, ss, f.exponent, f.constant, f.residual)) {
      f.degenerate = true;
      f.pass = true;
      return f;
    }
    f.pass = f.exponent <= -bound + 0.1;
    return f;
  };

  DecayReport rep;
  const std::size_t n = p.n_u();
  {
    std::vector<double> sup(n);
    for (std::size_t i = 0; i < n; ++i)
      sup[i] = sphere::sup_pointwise_norm(p.xi[i]);
    rep.fits.push_back(fit_one("Xi", 1.5, sup));
  }
  {
    std::vector<double> sup(n);
    for (std::size_t i = 0; i < n; ++i)
      sup[i] = sphere::sup_pointwise_norm(p.a_f[i]);
    rep.fits.push_back(fit_one("A_F", 1.5, sup));
  }
  if (p.has_a_w()) {
    std::vector<double> sup(n);
    for (std::size_t i = 0; i < n; ++i)
      sup[i] = sphere::sup_pointwise_norm(p.a_w[i]);
    rep.fits.push_back(fit_one("A_W", 2.5, sup));
  }
  if (!p.b_w.empty()) {
    std::vector<double> sup(n);
    for (std::size_t i = 0; i < n; ++i)
      sup[i] = sphere::sup_pointwise_norm(p.b_w[i]);
    rep.fits.push_back(fit_one("B_W", 1.5, sup));
  }
  return rep;
}

struct RadiusTrajectory {
  std::vector<double> t;
  std::vector<double> r;
  double log_coefficient = 0.0;  // fit of r - t against log t, last decade
  int steps = 0;                 // step count of the converged integration
};

// Integrates dr/dt = 1 - 2 M_inf / r with classical RK4, halving the step
// until the fitted log coefficient changes by less than 0.1%. The fit of
// r - t against log t over the last decade of t recovers -2 M_inf.
inline RadiusTrajectory area_radius(double m_inf, double r0, double t0,
                                    double t1) {
  if (!(r0 > 4.0 * m_inf)) throw DomainError("need r0 > 4 M_inf");
  if (!(t1 > t0) || !(t0 > 0.0)) throw DomainError("need 0 < t0 < t1");

  auto rhs = [m_inf](double r) { return 1.0 - 2.0 * m_inf / r; };

  auto run = [&](int steps, RadiusTrajectory* traj) -> double {
    const double h = (t1 - t0) / steps;
    const int keep_every = std::max(1, steps / 4096);
    double r = r0, t = t0;
    std::vector<double> ft, fr;
    if (traj) {
      traj->t.push_back(t);
      traj->r.push_back(r);
    }
    for (int i = 0; i < steps; ++i) {
      const double k1 = rhs(r);
      const double k2 = rhs(r + 0.5 * h * k1);
      const double k3 = rhs(r + 0.5 * h * k2);
      const double k4 = rhs(r + h * k3);
      r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = t0 + (i + 1) * h;
      if (r <= 2.0 * m_inf)
        throw DomainError("trajectory crossed r = 2 M_inf");
      if (traj && ((i + 1) % keep_every == 0 || i + 1 == steps)) {
        traj->t.push_back(t);
        traj->r.push_back(r);
      }
      if (t >= t1 / 10.0) {
        ft.push_back(std::log(t));
        fr.push_back(r - t);
      }
    }
    if (ft.size() < 4) return 0.0;
    double a = 0, b = 0, rms = 0;
    detail::linear_fit(ft, fr, a, b, rms);
    return b;
  };

  int steps = 4096;
  double coef = run(steps, nullptr);
  for (int iter = 0; iter < 12; ++iter) {
    const double next = run(steps * 2, nullptr);
    if (std::abs(next - coef) <= 1e-3 * std::abs(next) + 1e-9) {
      coef = next;
      steps *= 2;
      break;
    }
    coef = next;
    steps *= 2;
    if (iter == 11) throw IntegratorError("radius ODE failed to converge");
  }

  RadiusTrajectory traj;
  traj.log_coefficient = run(steps, &traj);
  traj.steps = steps;
  return traj;
}

}  // namespace nullrad
