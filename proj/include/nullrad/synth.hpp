#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "nullrad/errors.hpp"
#include "nullrad/radiation.hpp"
#include "nullrad/sphere/transforms.hpp"

namespace nullrad {

enum class ProfileFamily { gaussian, power_law_tail, custom };

struct ModeWeight {
  int l = 2;
  int m = 0;
  double weight = 1.0;
};

// Synthetic-payload recipe: a retarded-time profile times fixed angular
// shapes built from listed (l, m, weight) modes. Decay exponents default to
// the required envelope bounds (3/2 for Xi and A_F; A_W gains one power by
// differentiation).
struct SynthSpec {
  ProfileFamily profile = ProfileFamily::gaussian;
  double amplitude = 1.0;
  double width = 1.0;

  int band_limit = 16;
  int n_u = 401;
  double u_min = -20.0;
  double u_max = 20.0;

  std::vector<ModeWeight> xi_electric, xi_magnetic;
  std::vector<ModeWeight> af_electric, af_magnetic;

  double xi_decay = 1.5;
  double af_decay = 1.5;

  unsigned seed = 0;
  int random_modes = 0;  // per field list, drawn deterministically from seed

  std::vector<double> custom_profile;  // length n_u for the custom family

  bool emit_a_w = true;
};

namespace detail {

inline void check_modes(const std::vector<ModeWeight>& modes, int lmin,
                        int band_limit, const char* what) {
  for (const auto& mw : modes) {
    if (mw.l < lmin || mw.l > band_limit || std::abs(mw.m) > mw.l)
      throw SpecError(std::string(what) + ": mode (l, m) outside the valid range");
  }
}

inline void add_random_modes(std::vector<ModeWeight>& modes, int lmin,
                             int band_limit, int count, std::mt19937& rng) {
  std::uniform_int_distribution<int> ld(lmin, band_limit);
  std::uniform_real_distribution<double> wd(-1.0, 1.0);
  for (int i = 0; i < count; ++i) {
    ModeWeight mw;
    mw.l = ld(rng);
    std::uniform_int_distribution<int> md(-mw.l, mw.l);
    mw.m = md(rng);
    mw.weight = wd(rng);
    modes.push_back(mw);
  }
}

}  // namespace detail

inline RadiativePayload synth(const SynthSpec& spec) {
  if (spec.band_limit < 2) throw SpecError("band_limit must be >= 2");
  if (spec.n_u < 2) throw SpecError("n_u must be >= 2");
  if (!(spec.u_max > spec.u_min)) throw SpecError("u_max must exceed u_min");
  if (!(spec.width > 0.0)) throw SpecError("width must be positive");
  if (spec.profile == ProfileFamily::custom &&
      int(spec.custom_profile.size()) != spec.n_u)
    throw SpecError("custom_profile length must equal n_u");

  SynthSpec s = spec;
  if (s.random_modes > 0) {
    std::mt19937 rng(s.seed);
    detail::add_random_modes(s.xi_electric, 2, s.band_limit, s.random_modes, rng);
    detail::add_random_modes(s.xi_magnetic, 2, s.band_limit, s.random_modes, rng);
    detail::add_random_modes(s.af_electric, 1, s.band_limit, s.random_modes, rng);
    detail::add_random_modes(s.af_magnetic, 1, s.band_limit, s.random_modes, rng);
  }
  detail::check_modes(s.xi_electric, 2, s.band_limit, "xi_electric");
  detail::check_modes(s.xi_magnetic, 2, s.band_limit, "xi_magnetic");
  detail::check_modes(s.af_electric, 1, s.band_limit, "af_electric");
  detail::check_modes(s.af_magnetic, 1, s.band_limit, "af_magnetic");

  const sphere::SphereGrid grid = sphere::make_grid(s.band_limit);

  // fixed angular shapes
  sphere::STTPotentials xp;
  xp.electric = sphere::SHCoefficients(s.band_limit);
  xp.magnetic = sphere::SHCoefficients(s.band_limit);
  for (const auto& mw : s.xi_electric) xp.electric(mw.l, mw.m) += mw.weight;
  for (const auto& mw : s.xi_magnetic) xp.magnetic(mw.l, mw.m) += mw.weight;
  const sphere::STTField xi_shape = sphere::synthesize_stt(xp, grid);

  sphere::OneFormPotentials ap;
  ap.electric = sphere::SHCoefficients(s.band_limit);
  ap.magnetic = sphere::SHCoefficients(s.band_limit);
  for (const auto& mw : s.af_electric) ap.electric(mw.l, mw.m) += mw.weight;
  for (const auto& mw : s.af_magnetic) ap.magnetic(mw.l, mw.m) += mw.weight;
  const sphere::OneFormField af_shape = sphere::synthesize_oneform(ap, grid);

  // retarded-time profiles and the analytic derivative of the Xi profile
  auto profile_xi = [&](double u) -> double {
    switch (s.profile) {
      case ProfileFamily::gaussian:
        return s.amplitude * std::exp(-(u / s.width) * (u / s.width));
      case ProfileFamily::power_law_tail:
        return s.amplitude * std::pow(1.0 + std::abs(u), -s.xi_decay);
      case ProfileFamily::custom:
        return 0.0;  // handled by table lookup below
    }
    return 0.0;
  };
  auto profile_xi_du = [&](double u) -> double {
    switch (s.profile) {
      case ProfileFamily::gaussian:
        return -2.0 * u / (s.width * s.width) * profile_xi(u);
      case ProfileFamily::power_law_tail:
        return -s.xi_decay * (u >= 0.0 ? 1.0 : -1.0) * s.amplitude *
               std::pow(1.0 + std::abs(u), -s.xi_decay - 1.0);
      case ProfileFamily::custom:
        return 0.0;
    }
    return 0.0;
  };
  auto profile_af = [&](double u) -> double {
    if (s.profile == ProfileFamily::power_law_tail)
      return s.amplitude * std::pow(1.0 + std::abs(u), -s.af_decay);
    return profile_xi(u);
  };

  RadiativePayload p;
  p.grid = grid;
  p.sigma_minus = sphere::STTField(grid);
  p.u_grid.resize(s.n_u);
  const double du = (s.u_max - s.u_min) / double(s.n_u - 1);
  for (int i = 0; i < s.n_u; ++i) p.u_grid[i] = s.u_min + du * i;

  const std::size_t nn = grid.n_nodes();
  p.xi.reserve(s.n_u);
  p.a_f.reserve(s.n_u);
  if (s.emit_a_w) p.a_w.reserve(s.n_u);
  for (int i = 0; i < s.n_u; ++i) {
    const double u = p.u_grid[i];
    double gx, ga, gdx;
    if (s.profile == ProfileFamily::custom) {
      gx = ga = s.custom_profile[i];
      const int il = i == 0 ? 0 : i - 1;
      const int ir = i == s.n_u - 1 ? s.n_u - 1 : i + 1;
      gdx = (s.custom_profile[ir] - s.custom_profile[il]) /
            (p.u_grid[ir] - p.u_grid[il]);
    } else {
      gx = profile_xi(u);
      ga = profile_af(u);
      gdx = profile_xi_du(u);
    }
    sphere::STTField xi(grid);
    sphere::OneFormField af(grid);
    for (std::size_t k = 0; k < nn; ++k) {
      xi.comp_tt[k] = gx * xi_shape.comp_tt[k];
      xi.comp_tp[k] = gx * xi_shape.comp_tp[k];
      af.comp_theta[k] = ga * af_shape.comp_theta[k];
      af.comp_phi[k] = ga * af_shape.comp_phi[k];
    }
    p.xi.push_back(std::move(xi));
    p.a_f.push_back(std::move(af));
    if (s.emit_a_w) {
      sphere::STTField aw(grid);
      for (std::size_t k = 0; k < nn; ++k) {
        aw.comp_tt[k] = -4.0 * gdx * xi_shape.comp_tt[k];
        aw.comp_tp[k] = -4.0 * gdx * xi_shape.comp_tp[k];
      }
      p.a_w.push_back(std::move(aw));
    }
  }
  p.validate();
  return p;
}

}  // namespace nullrad
