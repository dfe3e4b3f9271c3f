// Command-line front end. Every command is a thin shell over the library
// operations: it loads an archive or spec, calls the module, and writes a
// plain-text report plus optional CSV. No numerical logic lives here.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nullrad/bondi.hpp"
#include "nullrad/detector.hpp"
#include "nullrad/io/archive.hpp"
#include "nullrad/memory_effect.hpp"
#include "nullrad/radiation.hpp"
#include "nullrad/sphere/kernel.hpp"
#include "nullrad/sphere/transforms.hpp"
#include "nullrad/synth.hpp"

using namespace nullrad;
using nlohmann::json;

namespace {

struct Report {
  std::ofstream out;
  bool timestamp = true;

  void open(const std::string& path) {
    out.open(path);
    if (!out) throw LoadError("cannot open report file " + path);
    if (timestamp) {
      const auto now = std::chrono::system_clock::now();
      const std::time_t t = std::chrono::system_clock::to_time_t(now);
      char buf[64];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
      out << "# generated " << buf << "\n";
    }
  }
  template <typename T>
  Report& operator<<(const T& v) {
    out << v;
    return *this;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SynthSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open spec file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec JSON parse failure: ") + e.what());
  }

  SynthSpec s;
  const std::string prof = j.value("profile", "gaussian");
  if (prof == "gaussian")
    s.profile = ProfileFamily::gaussian;
  else if (prof == "power-law-tail")
    s.profile = ProfileFamily::power_law_tail;
  else if (prof == "custom")
    s.profile = ProfileFamily::custom;
  else
    throw SpecError("unknown profile family " + prof);

  s.amplitude = j.value("amplitude", 1.0);
  s.width = j.value("width", 1.0);
  s.band_limit = j.value("band_limit", 16);
  s.n_u = j.value("n_u", 401);
  s.u_min = j.value("u_min", -20.0);
  s.u_max = j.value("u_max", 20.0);
  s.xi_decay = j.value("xi_decay", 1.5);
  s.af_decay = j.value("af_decay", 1.5);
  s.seed = j.value("seed", 0u);
  s.random_modes = j.value("random_modes", 0);
  s.emit_a_w = j.value("emit_a_w", true);
  if (j.contains("custom_profile"))
    s.custom_profile = j["custom_profile"].get<std::vector<double>>();

  auto modes = [&](const char* key) {
    std::vector<ModeWeight> out;
    if (!j.contains(key)) return out;
    for (const auto& e : j[key]) {
      if (!e.is_array() || e.size() != 3)
        throw SpecError(std::string(key) + " entries must be [l, m, weight]");
      out.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    return out;
  };
  s.xi_electric = modes("xi_electric");
  s.xi_magnetic = modes("xi_magnetic");
  s.af_electric = modes("af_electric");
  s.af_magnetic = modes("af_magnetic");
  return s;
}

void write_field_csv(std::ofstream& csv, const sphere::ScalarField& f,
                     const std::string& name) {
  csv << "theta,phi," << name << "\n";
  for (std::size_t j = 0; j < f.grid.n_theta(); ++j)
    for (std::size_t k = 0; k < f.grid.n_phi(); ++k)
      csv << fmt(f.grid.theta[j]) << "," << fmt(f.grid.phi[k]) << ","
          << fmt(f.at(j, k)) << "\n";
}

void write_stt_csv(std::ofstream& csv, const sphere::STTField& t,
                   const std::string& name) {
  csv << "theta,phi," << name << "_tt," << name << "_tp\n";
  const std::size_t np = t.grid.n_phi();
  for (std::size_t j = 0; j < t.grid.n_theta(); ++j)
    for (std::size_t k = 0; k < np; ++k)
      csv << fmt(t.grid.theta[j]) << "," << fmt(t.grid.phi[k]) << ","
          << fmt(t.comp_tt[j * np + k]) << "," << fmt(t.comp_tp[j * np + k])
          << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"energy flux, mass loss, and memory for radiative data at "
               "null infinity"};
  app.require_subcommand(1);
  app.fallthrough();
  bool no_timestamp = false;
  app.add_flag("--no-timestamp", no_timestamp,
               "omit the timestamp line from reports");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic payload");
  std::string spec_path, out_dir;
  bool text_mode = false;
  synth_cmd->add_option("--spec", spec_path, "SynthSpec JSON file")->required();
  synth_cmd->add_option("--out", out_dir, "output archive directory")->required();
  synth_cmd->add_flag("--text", text_mode, "write text blocks instead of binary");

  // common archive input
  std::string in_dir, report_path, csv_path;
  auto add_io = [&](CLI::App* cmd, bool need_csv) {
    cmd->add_option("--in", in_dir, "input archive directory")->required();
    cmd->add_option("--report", report_path, "report file");
    if (need_csv) cmd->add_option("--csv", csv_path, "CSV output file");
  };

  auto* massloss_cmd = app.add_subcommand("massloss", "Bondi mass curve");
  bool tail_model = false;
  add_io(massloss_cmd, true);
  massloss_cmd->add_flag("--tail-model", tail_model,
                         "extrapolate power-law tails beyond the grid");

  auto* flux_cmd = app.add_subcommand("flux", "energy flux per solid angle");
  add_io(flux_cmd, true);

  auto* memory_cmd = app.add_subcommand("memory", "permanent memory tensor");
  std::string source = "both";
  add_io(memory_cmd, true);
  memory_cmd->add_option("--source", source,
                         "which jump tensor to emit: constraint|direct|both")
      ->check(CLI::IsMember({"constraint", "direct", "both"}));

  auto* detector_cmd = app.add_subcommand("detector", "test-mass traces");
  DetectorConfig det_cfg;
  std::string direction = "1.5707963267948966,0";
  bool em_correction = false, closed_form = false;
  add_io(detector_cmd, true);
  detector_cmd->add_option("--d0", det_cfg.d0, "initial arm separation");
  detector_cmd->add_option("--r", det_cfg.r, "source distance");
  detector_cmd->add_option("--direction", direction,
                           "source direction theta,phi");
  detector_cmd->add_flag("--em-correction", em_correction,
                         "include the O(r^-2) electromagnetic term");
  detector_cmd->add_flag("--closed-form", closed_form,
                         "emit the closed-form trace instead of integrating");

  auto* bondi_cmd = app.add_subcommand("bondi-check",
                                       "Bondi mass-loss equivalence");
  bondi_cmd->add_option("--in", in_dir, "Bondi archive directory")->required();
  bondi_cmd->add_option("--report", report_path, "report file");

  auto* radius_cmd = app.add_subcommand("radius", "area-radius asymptote");
  double mass = 1.0, r0 = 50.0;
  std::string t_span = "10,10000";
  radius_cmd->add_option("--mass", mass, "M(infinity)");
  radius_cmd->add_option("--r0", r0, "initial radius");
  radius_cmd->add_option("--t-span", t_span, "t0,t1");
  radius_cmd->add_option("--report", report_path, "report file");
  radius_cmd->add_option("--csv", csv_path, "CSV output file");

  auto* validate_cmd = app.add_subcommand("validate",
                                          "decay bounds and invariants");
  add_io(validate_cmd, false);

  auto* constants_cmd = app.add_subcommand(
      "constants", "emit the operator-constants table");
  int cl = 16;
  std::string const_out = "constants.txt";
  constants_cmd->add_option("--band-limit", cl, "band limit");
  constants_cmd->add_option("--out", const_out, "output table file");

  CLI11_PARSE(app, argc, argv);

  Report rep;
  rep.timestamp = !no_timestamp;
  auto open_report = [&]() -> Report* {
    if (report_path.empty()) return nullptr;
    rep.open(report_path);
    return &rep;
  };

  if (synth_cmd->parsed()) {
    const auto payload = synth(parse_spec(spec_path));
    io::save_archive(payload, out_dir, !text_mode);
    std::cout << "wrote " << out_dir << " (" << payload.n_u()
              << " u samples, L = " << payload.grid.band_limit << ")\n";
    return 0;
  }

  if (massloss_cmd->parsed()) {
    const auto p = io::load_archive(in_dir);
    const auto mc = mass_curve(p, tail_model);
    if (auto* r = open_report()) {
      *r << "command massloss\n";
      *r << "m_minus " << fmt(mc.m_minus) << "\n";
      *r << "m_plus " << fmt(mc.m_plus) << "\n";
      *r << "radiated " << fmt(mc.m_plus - mc.m_minus) << "\n";
      *r << "tail_minus " << fmt(mc.tail_minus) << "\n";
      *r << "tail_plus " << fmt(mc.tail_plus) << "\n";
    }
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      csv << "u,M\n";
      for (std::size_t i = 0; i < mc.u_grid.size(); ++i)
        csv << fmt(mc.u_grid[i]) << "," << fmt(mc.m[i]) << "\n";
    }
    std::cout << "radiated energy " << fmt(mc.m_plus - mc.m_minus) << "\n";
    return 0;
  }

  if (flux_cmd->parsed()) {
    const auto p = io::load_archive(in_dir);
    const auto f = flux_per_solid_angle(p);
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      write_field_csv(csv, f, "flux");
    }
    if (auto* r = open_report()) {
      *r << "command flux\n";
      *r << "total_energy " << fmt(sphere::integrate(f)) << "\n";
      *r << "max_flux " << fmt(*std::max_element(f.values.begin(),
                                                 f.values.end()))
         << "\n";
    }
    std::cout << "total energy " << fmt(sphere::integrate(f)) << "\n";
    return 0;
  }

  if (memory_cmd->parsed()) {
    const auto p = io::load_archive(in_dir);
    const auto mr = solve_memory(p);
    if (auto* r = open_report()) {
      *r << "command memory\n";
      *r << "constraint_residual " << fmt(mr.residual) << "\n";
      *r << "l1_projected_fraction " << fmt(mr.l1_projected_fraction) << "\n";
      const auto phic = sphere::analyze(mr.phi);
      *r << "phi coefficients (l m a_lm), |a| > 1e-14:\n";
      for (int l = 0; l <= phic.band_limit; ++l)
        for (int m = -l; m <= l; ++m)
          if (std::abs(phic(l, m)) > 1e-14)
            *r << l << " " << m << " " << fmt(phic(l, m)) << "\n";
      const auto pot = sphere::decompose_stt(mr.sigma_jump_constraint);
      *r << "sigma-jump electric potential (l m e_lm), |e| > 1e-14:\n";
      for (int l = 2; l <= pot.electric.band_limit; ++l)
        for (int m = -l; m <= l; ++m)
          if (std::abs(pot.electric(l, m)) > 1e-14)
            *r << l << " " << m << " " << fmt(pot.electric(l, m)) << "\n";
    }
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      if (source == "constraint" || source == "both")
        write_stt_csv(csv, mr.sigma_jump_constraint, "sigma_jump_constraint");
      if (source == "direct" || source == "both")
        write_stt_csv(csv, mr.sigma_jump_direct, "sigma_jump_direct");
    }
    std::cout << "constraint residual " << fmt(mr.residual) << "\n";
    return 0;
  }

  if (detector_cmd->parsed()) {
    const auto p = io::load_archive(in_dir);
    const auto comma = direction.find(',');
    if (comma == std::string::npos)
      throw RangeError("--direction expects theta,phi");
    det_cfg.theta = std::stod(direction.substr(0, comma));
    det_cfg.phi = std::stod(direction.substr(comma + 1));
    det_cfg.include_em_correction = em_correction;

    const DetectorTrace trace =
        closed_form
            ? closed_form_trace(det_cfg, p)
            : integrate_jacobi(det_cfg,
                               drive_tensor(p, det_cfg.theta, det_cfg.phi));
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      csv << "t,x1_1,x2_1,x1_2,x2_2,v1_1,v2_1,v1_2,v2_2,x3\n";
      for (std::size_t i = 0; i < trace.t_grid.size(); ++i) {
        csv << fmt(trace.t_grid[i]);
        for (int B = 0; B < 2; ++B)
          for (int A = 0; A < 2; ++A) csv << "," << fmt(trace.x[B][A][i]);
        for (int B = 0; B < 2; ++B)
          for (int A = 0; A < 2; ++A) csv << "," << fmt(trace.v[B][A][i]);
        csv << "," << fmt(trace.x3[i]) << "\n";
      }
    }
    if (auto* r = open_report()) {
      *r << "command detector\n";
      *r << "mode " << (closed_form ? "closed-form" : "integrated") << "\n";
      for (int B = 0; B < 2; ++B)
        for (int A = 0; A < 2; ++A)
          *r << "dx_" << (A + 1) << "_" << (B + 1) << " "
             << fmt(trace.dx[B][A]) << "\n";
    }
    std::cout << "permanent displacement dx_1_1 " << fmt(trace.dx[0][0])
              << "\n";
    return 0;
  }

  if (bondi_cmd->parsed()) {
    const auto b = io::load_bondi_archive(in_dir);
    const auto res = check_mass_loss_equivalence(b);
    if (auto* r = open_report()) {
      *r << "command bondi-check\n";
      *r << "max_pointwise_residual " << fmt(res.max_pointwise_residual)
         << "\n";
      *r << "integral_ratio " << fmt(res.integral_ratio) << "\n";
      *r << "declared_prefactor " << fmt(res.prefactor) << "\n";
      *r << "declared_sign " << fmt(res.sign) << "\n";
    }
    std::cout << "max pointwise residual " << fmt(res.max_pointwise_residual)
              << "\n";
    return 0;
  }

  if (radius_cmd->parsed()) {
    const auto comma = t_span.find(',');
    if (comma == std::string::npos)
      throw RangeError("--t-span expects t0,t1");
    const double t0 = std::stod(t_span.substr(0, comma));
    const double t1 = std::stod(t_span.substr(comma + 1));
    const auto traj = area_radius(mass, r0, t0, t1);
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      csv << "t,r\n";
      for (std::size_t i = 0; i < traj.t.size(); ++i)
        csv << fmt(traj.t[i]) << "," << fmt(traj.r[i]) << "\n";
    }
    if (auto* r = open_report()) {
      *r << "command radius\n";
      *r << "log_coefficient " << fmt(traj.log_coefficient) << "\n";
      *r << "expected " << fmt(-2.0 * mass) << "\n";
      *r << "steps " << traj.steps << "\n";
    }
    std::cout << "fitted log coefficient " << fmt(traj.log_coefficient)
              << "\n";
    return 0;
  }

  if (validate_cmd->parsed()) {
    const auto p = io::load_archive(in_dir);
    const auto drep = decay_report(p);
    bool evolution_ok = true;
    double evolution_resid = 0.0;
    if (p.has_a_w()) {
      // payload invariant: dXi/du + 1/4 A_W = 0 at interior nodes
      double worst = 0.0, scale = 0.0;
      for (std::size_t i = 1; i + 1 < p.n_u(); ++i) {
        const double du = p.u_grid[i + 1] - p.u_grid[i - 1];
        for (std::size_t k = 0; k < p.grid.n_nodes(); ++k) {
          const double fd =
              (p.xi[i + 1].comp_tt[k] - p.xi[i - 1].comp_tt[k]) / du;
          worst = std::max(worst, std::abs(fd + 0.25 * p.a_w[i].comp_tt[k]));
          scale = std::max(scale, std::abs(0.25 * p.a_w[i].comp_tt[k]));
        }
      }
      const double h = p.u_grid[1] - p.u_grid[0];
      evolution_resid = scale > 0.0 ? worst / scale : 0.0;
      evolution_ok = evolution_resid < 10.0 * h * h || scale == 0.0;
    }
    if (auto* r = open_report()) {
      *r << "command validate\n";
      for (const auto& f : drep.fits)
        *r << "decay " << f.quantity << " exponent " << fmt(f.exponent)
           << " bound " << fmt(-f.bound) << " residual " << fmt(f.residual)
           << (f.degenerate ? " degenerate" : "")
           << (f.pass ? " pass" : " fail") << "\n";
      *r << "evolution_relation "
         << (p.has_a_w()
                 ? (evolution_ok ? "pass " : "fail ") + fmt(evolution_resid)
                 : std::string("absent"))
         << "\n";
      *r << "overall " << (drep.all_pass() && evolution_ok ? "pass" : "fail")
         << "\n";
    }
    const bool ok = drep.all_pass() && evolution_ok;
    std::cout << "validation " << (ok ? "pass" : "fail") << "\n";
    return ok ? 0 : 1;
  }

  if (constants_cmd->parsed()) {
    const auto grid = sphere::make_grid(cl);
    const auto oc = sphere::operator_constants(grid);
    std::ofstream out(const_out);
    if (!out) throw LoadError("cannot open " + const_out + " for writing");
    out << "# operator constants, version " << io::kArchiveVersion
        << ", band limit " << cl << "\n";
    out << "# l lambda_e lambda_b mu\n";
    for (int l = 0; l <= cl; ++l)
      out << l << " " << fmt(l < 2 ? 0.0 : oc.lambda_e[l]) << " "
          << fmt(l < 2 ? 0.0 : oc.lambda_b[l]) << " "
          << fmt(sphere::kernel_eigenvalue_oracle(l)) << "\n";
    std::cout << "wrote " << const_out << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error category=" << e.category() << " " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error category=unexpected " << e.what() << "\n";
    return 3;
  }
}
