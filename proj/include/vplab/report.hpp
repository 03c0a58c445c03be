#pragma once

// JSON reports and CSV series files.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vplab/dispersion.hpp"
#include "vplab/error.hpp"
#include "vplab/modefit.hpp"
#include "vplab/phase_space.hpp"
#include "vplab/predictor.hpp"
#include "vplab/simulator.hpp"

namespace vplab::report {

using json = nlohmann::json;

inline json complex_json(complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline json root_report(const SpatialMode& m, const std::vector<double>& k, const RootSearchResult& r) {
  json roots = json::array();
  for (const auto& x : r.roots)
    roots.push_back({{"re", x.omega.real()}, {"im", x.omega.imag()}, {"multiplicity", x.multiplicity},
                     {"residual", x.residual}});
  json unresolved = json::array();
  for (const auto& u : r.unresolved)
    unresolved.push_back({{"box", {u.box.re_min, u.box.re_max, u.box.im_min, u.box.im_max}}, {"count", u.count}});
  double k2 = 0.0;
  for (double kj : k) k2 += kj * kj;
  return {{"k", m.index()},
          {"wavevector", k},
          {"k_abs", std::sqrt(k2)},
          {"box", {r.box.re_min, r.box.re_max, r.box.im_min, r.box.im_max}},
          {"count", r.total_count},
          {"roots", roots},
          {"unresolved", unresolved}};
}

inline json root_ref_json(const RootRef& r) {
  return {{"mode", r.mode.index()}, {"omega", complex_json(r.omega)}, {"multiplicity", r.multiplicity},
          {"rank", r.rank}, {"branch", r.branch > 0 ? "+" : "-"}};
}

inline json prediction_report(const TargetPredictions& tp) {
  json preds = json::array();
  for (const auto& p : tp.predictions) {
    json prov;
    switch (p.family) {
    case Family::J:
      prov = {{"root", root_ref_json(p.first)}};
      break;
    case Family::I:
      prov = {{"k1", p.first.mode.index()}, {"k2", p.partner->index()}, {"first", root_ref_json(p.first)},
              {"second", root_ref_json(*p.second)}, {"sigma", p.sigma}};
      break;
    case Family::B:
      prov = {{"k1", p.first.mode.index()}, {"k2", p.partner->index()}, {"root", root_ref_json(p.first)},
              {"gamma", p.gamma->to_string()}, {"factor", p.gamma->one_minus().to_string()}, {"nu", p.nu}};
      break;
    }
    preds.push_back({{"family", family_name(p.family)}, {"omega", complex_json(p.omega)},
                     {"max_degree", p.max_degree}, {"provenance", prov}});
  }
  return {{"target_mode", tp.target.index()}, {"predictions", preds}};
}

inline json fit_report(const FitResult& r) {
  json basis = json::array();
  for (const auto& b : r.basis) basis.push_back({{"omega", complex_json(b.omega)}, {"degree", b.degree}});
  json coeffs = json::array();
  for (const auto& z : r.coefficients) coeffs.push_back(complex_json(z));
  return {{"basis", basis},
          {"window", {{"t_min", r.window.t_min}, {"t_max", r.window.t_max}, {"lambda", r.window.lambda}}},
          {"coefficients", coeffs},
          {"residual", r.residual},
          {"condition", r.condition},
          {"samples", r.samples}};
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return json::parse(in);
}

// Shortest round-trip formatting, so rereading a CSV reproduces the doubles.
inline std::string fmt(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::string series_filename(const SpatialMode& m) {
  std::string s = "series_mode";
  for (std::size_t j = 0; j < m.dims(); ++j) s += "_" + std::to_string(m[j]);
  return s + ".csv";
}

inline void write_series(const std::filesystem::path& path, const ModeSeries& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,re,im\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << fmt(s.times()[i]) << ',' << fmt(s.values()[i].real()) << ',' << fmt(s.values()[i].imag()) << '\n';
}

inline ModeSeries read_series(const std::filesystem::path& path, const SpatialMode& mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing series file " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "t,re,im") throw ConfigError(path.string() + ": expected header t,re,im");
  ModeSeries s(mode);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
      throw ConfigError(path.string() + ":" + std::to_string(row) + ": malformed row");
    try {
      s.push_back(std::stod(a), {std::stod(b), std::stod(c)});
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(row) + ": " + e.what());
    }
  }
  return s;
}

inline void write_diagnostics(const std::filesystem::path& path, const std::vector<Diagnostics>& d) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "step,t,mass,l2,electric_energy,max_abs_E,poisson_residual\n";
  for (const auto& x : d)
    out << x.step << ',' << fmt(x.t) << ',' << fmt(x.mass) << ',' << fmt(x.l2) << ',' << fmt(x.electric_energy)
        << ',' << fmt(x.max_abs_E) << ',' << fmt(x.poisson_residual) << '\n';
}

} // namespace vplab::report
