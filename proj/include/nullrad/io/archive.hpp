#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nullrad/bondi.hpp"
#include "nullrad/errors.hpp"
#include "nullrad/radiation.hpp"
#include "nullrad/sphere/grid.hpp"

namespace nullrad::io {

// Archive layout: a directory holding manifest.txt plus one file per field
// block. The manifest is plain key-value text; each `block` line names the
// field, its file, and its expected sample count. Blocks are flat arrays in
// row-major (u, theta, phi, component) order, either raw little-endian
// 64-bit floats (mode binary) or one decimal per line (mode text).

inline constexpr int kArchiveVersion = 1;

namespace detail {

inline void write_block(const std::filesystem::path& file,
                        const std::vector<double>& data, bool binary) {
  std::ofstream out(file, binary ? std::ios::binary : std::ios::out);
  if (!out) throw LoadError("cannot open " + file.string() + " for writing");
  if (binary) {
    out.write(reinterpret_cast<const char*>(data.data()),
              std::streamsize(data.size() * sizeof(double)));
  } else {
    char buf[40];
    for (double v : data) {
      std::snprintf(buf, sizeof buf, "%.17g\n", v);
      out << buf;
    }
  }
}

inline std::vector<double> read_block(const std::filesystem::path& file,
                                      const std::string& name,
                                      std::size_t expected, bool binary) {
  std::ifstream in(file, binary ? std::ios::binary : std::ios::in);
  if (!in) throw LoadError("missing block file for field " + name);
  std::vector<double> data;
  data.reserve(expected);
  if (binary) {
    data.resize(expected);
    in.read(reinterpret_cast<char*>(data.data()),
            std::streamsize(expected * sizeof(double)));
    if (std::size_t(in.gcount()) != expected * sizeof(double))
      throw LoadError("block truncated for field " + name);
    char extra;
    if (in.read(&extra, 1))
      throw LoadError("block longer than declared for field " + name);
  } else {
    double v;
    while (in >> v) data.push_back(v);
    if (data.size() != expected)
      throw LoadError("block length mismatch for field " + name);
  }
  for (double v : data)
    if (std::isnan(v)) throw LoadError("NaN in field " + name);
  return data;
}

// flatteners between field series and (u, theta, phi, component) arrays

inline std::vector<double> pack_stt(const std::vector<sphere::STTField>& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  const std::size_t nn = s[0].grid.n_nodes();
  out.reserve(s.size() * nn * 2);
  for (const auto& t : s)
    for (std::size_t k = 0; k < nn; ++k) {
      out.push_back(t.comp_tt[k]);
      out.push_back(t.comp_tp[k]);
    }
  return out;
}

inline std::vector<double> pack_oneform(
    const std::vector<sphere::OneFormField>& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  const std::size_t nn = s[0].grid.n_nodes();
  out.reserve(s.size() * nn * 2);
  for (const auto& v : s)
    for (std::size_t k = 0; k < nn; ++k) {
      out.push_back(v.comp_theta[k]);
      out.push_back(v.comp_phi[k]);
    }
  return out;
}

inline std::vector<double> pack_scalar(
    const std::vector<sphere::ScalarField>& s) {
  std::vector<double> out;
  for (const auto& f : s)
    out.insert(out.end(), f.values.begin(), f.values.end());
  return out;
}

inline std::vector<sphere::STTField> unpack_stt(const std::vector<double>& d,
                                                const sphere::SphereGrid& g,
                                                std::size_t nu) {
  std::vector<sphere::STTField> out;
  const std::size_t nn = g.n_nodes();
  out.reserve(nu);
  std::size_t p = 0;
  for (std::size_t i = 0; i < nu; ++i) {
    sphere::STTField t(g);
    for (std::size_t k = 0; k < nn; ++k) {
      t.comp_tt[k] = d[p++];
      t.comp_tp[k] = d[p++];
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<sphere::OneFormField> unpack_oneform(
    const std::vector<double>& d, const sphere::SphereGrid& g,
    std::size_t nu) {
  std::vector<sphere::OneFormField> out;
  const std::size_t nn = g.n_nodes();
  out.reserve(nu);
  std::size_t p = 0;
  for (std::size_t i = 0; i < nu; ++i) {
    sphere::OneFormField v(g);
    for (std::size_t k = 0; k < nn; ++k) {
      v.comp_theta[k] = d[p++];
      v.comp_phi[k] = d[p++];
    }
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<sphere::ScalarField> unpack_scalar(
    const std::vector<double>& d, const sphere::SphereGrid& g,
    std::size_t nu) {
  std::vector<sphere::ScalarField> out;
  const std::size_t nn = g.n_nodes();
  out.reserve(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    sphere::ScalarField f(g);
    std::copy(d.begin() + std::ptrdiff_t(i * nn),
              d.begin() + std::ptrdiff_t((i + 1) * nn), f.values.begin());
    out.push_back(std::move(f));
  }
  return out;
}

struct Manifest {
  int version = 0;
  std::string kind;
  int band_limit = 0;
  std::size_t n_theta = 0, n_phi = 0, n_u = 0;
  bool binary = true;
  double m_minus = 0.0;
  std::string units;
  struct Block {
    std::string file;
    std::size_t count = 0;
  };
  std::map<std::string, Block> blocks;
};

inline Manifest read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) throw LoadError("missing manifest.txt in " + dir.string());
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key.empty() || key[0] == '#') continue;
    if (key == "format_version")
      ls >> m.version;
    else if (key == "kind")
      ls >> m.kind;
    else if (key == "band_limit")
      ls >> m.band_limit;
    else if (key == "n_theta")
      ls >> m.n_theta;
    else if (key == "n_phi")
      ls >> m.n_phi;
    else if (key == "n_u")
      ls >> m.n_u;
    else if (key == "mode") {
      std::string mode;
      ls >> mode;
      m.binary = mode != "text";
    } else if (key == "m_minus")
      ls >> m.m_minus;
    else if (key == "units")
      std::getline(ls >> std::ws, m.units);
    else if (key == "block") {
      std::string name;
      Manifest::Block b;
      ls >> name >> b.file >> b.count;
      m.blocks[name] = b;
    }
  }
  if (m.version != kArchiveVersion)
    throw LoadError("unsupported archive format_version");
  if (m.band_limit < 2 || m.n_theta == 0 || m.n_phi == 0 || m.n_u == 0)
    throw LoadError("manifest grid description incomplete");
  return m;
}

}  // namespace detail

inline void save_archive(const RadiativePayload& p,
                         const std::filesystem::path& dir,
                         bool binary = true,
                         const std::string& units = "geometric (G=c=1)") {
  p.validate();
  std::filesystem::create_directories(dir);
  const std::string ext = binary ? ".bin" : ".csv";
  const std::size_t nn = p.grid.n_nodes();

  std::ofstream man(dir / "manifest.txt");
  man << "format_version " << kArchiveVersion << "\n";
  man << "kind radiative\n";
  man << "band_limit " << p.grid.band_limit << "\n";
  man << "n_theta " << p.grid.n_theta() << "\n";
  man << "n_phi " << p.grid.n_phi() << "\n";
  man << "n_u " << p.n_u() << "\n";
  man << "mode " << (binary ? "binary" : "text") << "\n";
  man << "units " << units << "\n";
  char mbuf[40];
  std::snprintf(mbuf, sizeof mbuf, "%.17g", p.m_minus);
  man << "m_minus " << mbuf << "\n";

  auto emit = [&](const std::string& name, const std::vector<double>& data) {
    if (data.empty()) return;
    const std::string file = name + ext;
    man << "block " << name << " " << file << " " << data.size() << "\n";
    detail::write_block(dir / file, data, binary);
  };
  emit("u", p.u_grid);
  emit("xi", detail::pack_stt(p.xi));
  emit("a_f", detail::pack_oneform(p.a_f));
  emit("a_w", detail::pack_stt(p.a_w));
  emit("b_w", detail::pack_oneform(p.b_w));
  emit("p_w", detail::pack_scalar(p.p_w));
  emit("q_w", detail::pack_scalar(p.q_w));
  emit("p_f", detail::pack_scalar(p.p_f));
  emit("q_f", detail::pack_scalar(p.q_f));
  if (sphere::l2_norm(p.sigma_minus) > 0.0 &&
      p.sigma_minus.grid.n_nodes() == nn)
    emit("sigma_minus", detail::pack_stt({p.sigma_minus}));
}

inline RadiativePayload load_archive(const std::filesystem::path& dir) {
  const detail::Manifest m = detail::read_manifest(dir);
  if (m.kind != "radiative")
    throw LoadError("archive kind is not radiative");

  RadiativePayload p;
  p.grid = sphere::make_grid(m.band_limit, int(m.n_theta), int(m.n_phi));
  p.m_minus = m.m_minus;
  const std::size_t nn = p.grid.n_nodes();
  const std::size_t nu = m.n_u;

  auto fetch = [&](const std::string& name, std::size_t expected,
                   bool required) -> std::vector<double> {
    auto it = m.blocks.find(name);
    if (it == m.blocks.end()) {
      if (required) throw LoadError("manifest is missing field " + name);
      return {};
    }
    if (it->second.count != expected)
      throw LoadError("declared count mismatch for field " + name);
    return detail::read_block(dir / it->second.file, name, expected, m.binary);
  };

  p.u_grid = fetch("u", nu, true);
  p.xi = detail::unpack_stt(fetch("xi", nu * nn * 2, true), p.grid, nu);
  p.a_f = detail::unpack_oneform(fetch("a_f", nu * nn * 2, true), p.grid, nu);
  if (m.blocks.count("a_w"))
    p.a_w = detail::unpack_stt(fetch("a_w", nu * nn * 2, false), p.grid, nu);
  if (m.blocks.count("b_w"))
    p.b_w = detail::unpack_oneform(fetch("b_w", nu * nn * 2, false), p.grid, nu);
  if (m.blocks.count("p_w"))
    p.p_w = detail::unpack_scalar(fetch("p_w", nu * nn, false), p.grid, nu);
  if (m.blocks.count("q_w"))
    p.q_w = detail::unpack_scalar(fetch("q_w", nu * nn, false), p.grid, nu);
  if (m.blocks.count("p_f"))
    p.p_f = detail::unpack_scalar(fetch("p_f", nu * nn, false), p.grid, nu);
  if (m.blocks.count("q_f"))
    p.q_f = detail::unpack_scalar(fetch("q_f", nu * nn, false), p.grid, nu);
  p.sigma_minus = sphere::STTField(p.grid);
  if (m.blocks.count("sigma_minus"))
    p.sigma_minus =
        detail::unpack_stt(fetch("sigma_minus", nn * 2, false), p.grid, 1)[0];
  p.validate();
  return p;
}

inline void save_bondi_archive(const BondiWaveform& b,
                               const std::filesystem::path& dir,
                               bool binary = true,
                               const std::string& units = "geometric (G=c=1)") {
  b.validate();
  std::filesystem::create_directories(dir);
  const std::string ext = binary ? ".bin" : ".csv";

  std::ofstream man(dir / "manifest.txt");
  man << "format_version " << kArchiveVersion << "\n";
  man << "kind bondi\n";
  man << "band_limit " << b.grid.band_limit << "\n";
  man << "n_theta " << b.grid.n_theta() << "\n";
  man << "n_phi " << b.grid.n_phi() << "\n";
  man << "n_u " << b.n_w() << "\n";
  man << "mode " << (binary ? "binary" : "text") << "\n";
  man << "units " << units << "\n";

  auto emit = [&](const std::string& name, const std::vector<double>& data) {
    const std::string file = name + ext;
    man << "block " << name << " " << file << " " << data.size() << "\n";
    detail::write_block(dir / file, data, binary);
  };
  emit("w", b.w_grid);
  emit("c", detail::pack_scalar(b.c));
  emit("d", detail::pack_scalar(b.d));
  emit("x", detail::pack_scalar(b.x));
  emit("y", detail::pack_scalar(b.y));
}

inline BondiWaveform load_bondi_archive(const std::filesystem::path& dir) {
  const detail::Manifest m = detail::read_manifest(dir);
  if (m.kind != "bondi") throw LoadError("archive kind is not bondi");

  BondiWaveform b;
  b.grid = sphere::make_grid(m.band_limit, int(m.n_theta), int(m.n_phi));
  const std::size_t nn = b.grid.n_nodes();
  const std::size_t nw = m.n_u;

  auto fetch = [&](const std::string& name, std::size_t expected) {
    auto it = m.blocks.find(name);
    if (it == m.blocks.end())
      throw LoadError("manifest is missing field " + name);
    if (it->second.count != expected)
      throw LoadError("declared count mismatch for field " + name);
    return detail::read_block(dir / it->second.file, name, expected, m.binary);
  };
  b.w_grid = fetch("w", nw);
  b.c = detail::unpack_scalar(fetch("c", nw * nn), b.grid, nw);
  b.d = detail::unpack_scalar(fetch("d", nw * nn), b.grid, nw);
  b.x = detail::unpack_scalar(fetch("x", nw * nn), b.grid, nw);
  b.y = detail::unpack_scalar(fetch("y", nw * nn), b.grid, nw);
  b.validate();
  return b;
}

}  // namespace nullrad::io
