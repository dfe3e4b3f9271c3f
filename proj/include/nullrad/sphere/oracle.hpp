#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "nullrad/sphere/grid.hpp"
#include "nullrad/sphere/harmonics.hpp"

namespace nullrad::sphere::oracle {

// Dense-quadrature / finite-difference route for the divergence constants
// of the traceless second-derivative operators. Everything here touches
// only pointwise evaluation of Y_lm; none of the spectral transform
// machinery is used, so it can check that machinery.

namespace detail {

// 4th-order central differences of a scalar function of one angle.
template <typename F>
double d1(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) /
         (12.0 * h);
}

template <typename F>
double d2(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) -
          f(x - 2 * h)) /
         (12.0 * h * h);
}

struct TensorValue {
  double tt, tp;
};

// Electric traceless second-derivative tensor of Y_lm by finite differences:
//   T_tt = 1/2 (d^2Y/dt^2 - cot t dY/dt - (1/sin^2 t) d^2Y/dp^2)
//   T_tp = d/dt ( (1/sin t) dY/dp )
inline TensorValue electric_fd(int l, int m, double theta, double phi,
                               double h) {
  auto y_t = [&](double t) { return eval_harmonic(l, m, std::cos(t), phi); };
  auto y_p = [&](double p) { return eval_harmonic(l, m, std::cos(theta), p); };
  auto dyp_over_sin = [&](double t) {
    auto yp = [&](double p) { return eval_harmonic(l, m, std::cos(t), p); };
    return d1(yp, phi, h) / std::sin(t);
  };
  const double cot = std::cos(theta) / std::sin(theta);
  TensorValue v;
  v.tt = 0.5 * (d2(y_t, theta, h) - cot * d1(y_t, theta, h) -
                d2(y_p, phi, h) / (std::sin(theta) * std::sin(theta)));
  v.tp = d1(dyp_over_sin, theta, h);
  return v;
}

}  // namespace detail

struct DivergenceConstants {
  double lambda_e = 0.0;
  double lambda_b = 0.0;
};

// Measure lambda_{e,l}, lambda_{b,l} defined by
//   div(De Y_lm) = grad(lambda_e Y_lm),  div(Db Y_lm) = *grad(lambda_b Y_lm)
// by integrating the finite-difference divergence of the basis tensors
// against grad Y_lm and *grad Y_lm over a dense Gauss grid:
//   lambda l(l+1) = <div T, W>.
// The in-plane divergence of a traceless symmetric tensor is
//   (div T)_t = dT_tt/dt + (1/sin t) dT_tp/dp + 2 cot t T_tt
//   (div T)_p = dT_tp/dt - (1/sin t) dT_tt/dp + 2 cot t T_tp.
inline DivergenceConstants stt_divergence_constants(int l, int n_theta = 0,
                                                    double h = 2e-3) {
  if (n_theta == 0) n_theta = 2 * l + 24;
  const int n_phi = 4 * l + 8;
  const int m = 0;  // the constants are degree-only; m = 0 suffices

  std::vector<double> gx, gw;
  sphere::detail::gauss_legendre(n_theta, gx, gw);

  auto e_at = [&](double t, double p) {
    return detail::electric_fd(l, m, t, p, h);
  };

  double acc_e = 0.0, acc_b = 0.0;
  const double wphi = 2.0 * std::numbers::pi / n_phi;
  for (int j = 0; j < n_theta; ++j) {
    const double theta = std::acos(gx[j]);
    const double st = std::sin(theta);
    const double cot = gx[j] / st;
    for (int k = 0; k < n_phi; ++k) {
      const double phi = wphi * (k + 0.37);  // keep clear of symmetry axes
      // divergence of the electric tensor by outer finite differences
      auto tt_t = [&](double t) { return e_at(t, phi).tt; };
      auto tp_t = [&](double t) { return e_at(t, phi).tp; };
      auto tt_p = [&](double p) { return e_at(theta, p).tt; };
      auto tp_p = [&](double p) { return e_at(theta, p).tp; };
      const detail::TensorValue T = e_at(theta, phi);
      const double div_t = detail::d1(tt_t, theta, h) +
                           detail::d1(tp_p, phi, h) / st + 2.0 * cot * T.tt;
      const double div_p = detail::d1(tp_t, theta, h) -
                           detail::d1(tt_p, phi, h) / st + 2.0 * cot * T.tp;
      // magnetic tensor (B_tt, B_tp) = (-T_tp, T_tt), differenced directly
      const double divb_t = detail::d1([&](double t) { return -e_at(t, phi).tp; },
                                       theta, h) +
                            detail::d1([&](double p) { return e_at(theta, p).tt; },
                                       phi, h) /
                                st +
                            2.0 * cot * (-T.tp);
      const double divb_p = detail::d1([&](double t) { return e_at(t, phi).tt; },
                                       theta, h) -
                            detail::d1([&](double p) { return -e_at(theta, p).tp; },
                                       phi, h) /
                                st +
                            2.0 * cot * T.tt;
      // grad Y and *grad Y by finite differences of Y
      auto y_t = [&](double t) { return eval_harmonic(l, m, std::cos(t), phi); };
      auto y_p = [&](double p) { return eval_harmonic(l, m, std::cos(theta), p); };
      const double gt = detail::d1(y_t, theta, h);
      const double gp = detail::d1(y_p, phi, h) / st;
      const double w = gw[j] * wphi;
      acc_e += (div_t * gt + div_p * gp) * w;
      acc_b += (divb_t * (-gp) + divb_p * gt) * w;
    }
  }
  DivergenceConstants out;
  out.lambda_e = acc_e / (double(l) * (l + 1));
  out.lambda_b = acc_b / (double(l) * (l + 1));
  return out;
}

}  // namespace nullrad::sphere::oracle
