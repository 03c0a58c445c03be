#pragma once

// Experiment configuration files (JSON).

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "vplab/dispersion.hpp"
#include "vplab/equilibrium.hpp"
#include "vplab/error.hpp"
#include "vplab/interpolation.hpp"
#include "vplab/modefit.hpp"
#include "vplab/phase_space.hpp"
#include "vplab/predictor.hpp"
#include "vplab/simulator.hpp"
#include "vplab/splitting.hpp"

namespace vplab {

using json = nlohmann::json;

// Selects one zero of D_m: its rank (0 = least damped pair) and the sign of
// its real part.
struct RootSelector {
  std::optional<SpatialMode> mode;
  int rank = 0;
  int branch = 1;

  bool matches(const RootRef& r) const {
    if (mode && !(*mode == r.mode)) return false;
    return r.rank == rank && r.branch == branch;
  }
};

// One basis entry of a fit: either a literal frequency or a reference into
// the predictions for the fitted mode.
struct BasisRef {
  std::optional<complex> omega;
  std::optional<Family> family;
  RootSelector first;
  std::optional<RootSelector> second;
  std::optional<int> degree;
  std::string text; // as written, for error messages

  bool matches(const FrequencyPrediction& p) const {
    if (!family || p.family != *family) return false;
    switch (*family) {
    case Family::J:
    case Family::B:
      return first.matches(p.first);
    case Family::I:
      if (!p.second || !second) return false;
      return (first.matches(p.first) && second->matches(*p.second)) ||
             (first.matches(*p.second) && second->matches(p.first));
    }
    return false;
  }
};

struct FitStageConfig {
  FitWindow window;
  std::vector<BasisRef> basis;
};

struct FitConfig {
  std::string name;
  SpatialMode mode;
  double scale = 1.0;
  complex phase = 1.0; // "real" -> 1, "imag" -> -i
  SolveMethod method = SolveMethod::Orthogonal;
  std::vector<FitStageConfig> stages;
};

struct ExperimentConfig {
  std::string name;
  TorusSpec torus;
  GridSpec grid;
  EquilibriumSpec equilibrium;
  PerturbationSpec perturbation;
  SplittingScheme scheme = strang();
  InterpolatorSpec interpolator{};
  Boundary velocity_boundary = Boundary::Periodic;
  double t_final = 0.0;
  RecordSource source = RecordSource::ElectricField;
  std::vector<SpatialMode> recorded_modes;
  SearchBox box{};
  RootSearchOptions root_options{};
  PredictOptions predict_options{};
  std::vector<FitConfig> fits;
  std::string output = "out";

  std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_final / grid.dt)); }
  SimulationOptions simulation_options() const {
    SimulationOptions o;
    o.scheme = scheme;
    o.interpolator = interpolator;
    o.velocity_boundary = velocity_boundary;
    o.recorded_modes = recorded_modes;
    o.source = source;
    o.dt = grid.dt;
    return o;
  }
};

namespace config_detail {

// Numbers, or strings such as "2pi", "20pi", "pi/2", "0.5".
inline double parse_length(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ConfigError(where + ": expected a number or a string like \"2pi\"");
  const std::string s = j.get<std::string>();
  static const std::regex re(R"(^\s*([0-9]*\.?[0-9]*(?:[eE][-+]?[0-9]+)?)\s*(\*?\s*pi)?\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re) || (m[1].str().empty() && !m[2].matched))
    throw ConfigError(where + ": cannot parse '" + s + "'");
  double v = m[1].str().empty() ? 1.0 : std::stod(m[1].str());
  if (m[2].matched) v *= std::numbers::pi;
  if (m[3].matched) v /= std::stod(m[3].str());
  return v;
}

inline SpatialMode parse_mode(const json& j, const std::string& where) {
  if (j.is_number_integer()) return SpatialMode{j.get<int>()};
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": a mode is an integer or an array of integers");
  std::vector<int> m;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw ConfigError(where + ": mode indices must be integers");
    m.push_back(e.get<int>());
  }
  return SpatialMode(std::move(m));
}

inline json mode_json(const SpatialMode& m) { return json(m.index()); }

inline std::vector<GaussianTerm> parse_terms(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of {amplitude, sigmas}");
  std::vector<GaussianTerm> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& t = j[i];
    const std::string w = where + "[" + std::to_string(i) + "]";
    GaussianTerm g;
    g.amplitude = t.contains("amplitude") ? parse_length(t["amplitude"], w + ".amplitude") : 1.0;
    if (!t.contains("sigmas")) throw ConfigError(w + ": missing sigmas");
    for (const auto& s : t["sigmas"]) g.sigmas.push_back(parse_length(s, w + ".sigmas"));
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<double> parse_vector(const json& j, const std::string& where) {
  std::vector<double> v;
  if (!j.is_array()) v.push_back(parse_length(j, where));
  else
    for (const auto& e : j) v.push_back(parse_length(e, where));
  return v;
}

inline int parse_branch(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+") return 1;
    if (s == "-") return -1;
  } else if (j.is_number_integer()) {
    const int b = j.get<int>();
    if (b == 1 || b == -1) return b;
  }
  throw ConfigError(where + ": branch must be \"+\" or \"-\"");
}

inline RootSelector parse_selector(const json& j, const std::string& where) {
  RootSelector r;
  if (j.contains("mode")) r.mode = parse_mode(j["mode"], where + ".mode");
  if (j.contains("source")) r.mode = parse_mode(j["source"], where + ".source");
  if (j.contains("rank")) r.rank = j["rank"].get<int>();
  if (j.contains("branch")) r.branch = parse_branch(j["branch"], where + ".branch");
  return r;
}

inline BasisRef parse_basis_ref(const json& j, const std::string& where) {
  BasisRef b;
  b.text = j.dump();
  if (j.contains("degree")) b.degree = j["degree"].get<int>();
  if (j.contains("omega")) {
    const auto& w = j["omega"];
    b.omega = complex(w.at("re").get<double>(), w.at("im").get<double>());
    return b;
  }
  if (!j.contains("family")) throw ConfigError(where + ": basis entries need 'family' or 'omega'");
  try {
    b.family = parse_family(j["family"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (*b.family == Family::I) {
    if (!j.contains("first") || !j.contains("second"))
      throw ConfigError(where + ": family I needs 'first' and 'second' root selectors");
    b.first = parse_selector(j["first"], where + ".first");
    b.second = parse_selector(j["second"], where + ".second");
  } else {
    b.first = parse_selector(j, where);
  }
  return b;
}

inline Boundary parse_boundary(const std::string& s, const std::string& where) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "zero") return Boundary::Zero;
  throw ConfigError(where + ": velocity_boundary must be 'periodic' or 'zero'");
}

inline SplittingScheme parse_scheme(const json& sim, const std::string& where) {
  const std::string name = sim.value("scheme", std::string("strang"));
  if (name != "custom") {
    try {
      return scheme_by_name(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (!sim.contains("stages")) throw ConfigError(where + ": a custom scheme needs 'stages'");
  SplittingScheme s{"custom", {}, sim.value("order", 0)};
  for (const auto& st : sim["stages"]) {
    const std::string k = st.at("stage").get<std::string>();
    if (k != "X" && k != "V") throw ConfigError(where + ": stage must be X or V");
    s.stages.push_back({k == "X" ? StageKind::X : StageKind::V, parse_length(st.at("c"), where + ".stages")});
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return s;
}

} // namespace config_detail

inline ExperimentConfig parse_config(const json& j) {
  using namespace config_detail;
  ExperimentConfig c;
  try {
    c.name = j.value("name", std::string("experiment"));
    c.output = j.value("output", std::string("out/") + c.name);

    for (const auto& l : j.at("torus").at("lengths")) c.torus.lengths.push_back(parse_length(l, "torus.lengths"));
    const std::size_t d = c.torus.dims();

    const auto& g = j.at("grid");
    for (const auto& n : g.at("nx")) c.grid.nx.push_back(n.get<int>());
    for (const auto& n : g.at("nv")) c.grid.nv.push_back(n.get<int>());
    c.grid.vmax = parse_vector(g.at("vmax"), "grid.vmax");
    if (c.grid.vmax.size() == 1 && d > 1) c.grid.vmax.assign(d, c.grid.vmax[0]);
    c.grid.dt = g.at("dt").get<double>();

    c.equilibrium.terms = parse_terms(j.at("equilibrium"), "equilibrium");

    if (j.contains("perturbation")) {
      const auto& p = j["perturbation"];
      c.perturbation.epsilon = p.value("epsilon", 0.0);
      for (std::size_t i = 0; i < p.value("components", json::array()).size(); ++i) {
        const auto& pc = p["components"][i];
        const std::string w = "perturbation.components[" + std::to_string(i) + "]";
        PerturbationComponent comp;
        comp.mode = parse_mode(pc.at("mode"), w + ".mode");
        const std::string ph = pc.value("phase", std::string("cos"));
        if (ph != "cos" && ph != "sin") throw ConfigError(w + ".phase: expected cos or sin");
        comp.phase = ph == "cos" ? Phase::Cos : Phase::Sin;
        if (pc.contains("profile") && pc["profile"].is_string() && pc["profile"].get<std::string>() == "equilibrium")
          comp.profile = c.equilibrium.terms;
        else
          comp.profile = parse_terms(pc.at("profile"), w + ".profile");
        c.perturbation.components.push_back(std::move(comp));
      }
    }

    if (j.contains("simulation")) {
      const auto& s = j["simulation"];
      c.scheme = parse_scheme(s, "simulation");
      c.interpolator.degree = s.value("interpolation_degree", 17);
      c.velocity_boundary = parse_boundary(s.value("velocity_boundary", std::string("periodic")), "simulation");
      c.t_final = s.value("t_final", 0.0);
      const std::string src = s.value("record_source", std::string(d == 1 ? "E" : "rho"));
      if (src != "E" && src != "rho") throw ConfigError("simulation.record_source: expected E or rho");
      c.source = src == "E" ? RecordSource::ElectricField : RecordSource::Density;
      for (const auto& m : s.value("record_modes", json::array()))
        c.recorded_modes.push_back(parse_mode(m, "simulation.record_modes"));
    }

    if (j.contains("dispersion")) {
      const auto& ds = j["dispersion"];
      if (ds.contains("box")) {
        const auto b = ds["box"].get<std::vector<double>>();
        if (b.size() != 4) throw ConfigError("dispersion.box: expected [re_min, re_max, im_min, im_max]");
        c.box = {b[0], b[1], b[2], b[3]};
      }
      c.root_options.tol = ds.value("tol", c.root_options.tol);
    }
    if (j.contains("predictor")) c.predict_options.lambda_floor = j["predictor"].value("lambda_floor", -3.0);

    for (std::size_t i = 0; i < j.value("fits", json::array()).size(); ++i) {
      const auto& f = j["fits"][i];
      const std::string w = "fits[" + std::to_string(i) + "]";
      FitConfig fc;
      fc.name = f.value("name", "fit" + std::to_string(i));
      fc.mode = parse_mode(f.at("mode"), w + ".mode");
      fc.scale = f.contains("scale") ? parse_length(f["scale"], w + ".scale") : 1.0;
      const std::string q = f.value("quadrature", std::string("real"));
      if (q != "real" && q != "imag") throw ConfigError(w + ".quadrature: expected real or imag");
      fc.phase = q == "real" ? complex(1.0, 0.0) : complex(0.0, -1.0);
      const std::string meth = f.value("method", std::string("orthogonal"));
      if (meth != "orthogonal" && meth != "normal_equations")
        throw ConfigError(w + ".method: expected orthogonal or normal_equations");
      fc.method = meth == "orthogonal" ? SolveMethod::Orthogonal : SolveMethod::NormalEquations;
      const auto& stages = f.at("stages");
      for (std::size_t s = 0; s < stages.size(); ++s) {
        const std::string ws = w + ".stages[" + std::to_string(s) + "]";
        FitStageConfig st;
        const auto& win = stages[s].at("window");
        st.window = {win.at("t_min").get<double>(), win.at("t_max").get<double>(), win.value("lambda", 0.0)};
        const auto& basis = stages[s].at("basis");
        for (std::size_t b = 0; b < basis.size(); ++b)
          st.basis.push_back(parse_basis_ref(basis[b], ws + ".basis[" + std::to_string(b) + "]"));
        fc.stages.push_back(std::move(st));
      }
      c.fits.push_back(std::move(fc));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }

  try {
    c.torus.validate();
    c.grid.validate();
    if (c.grid.dims() != c.torus.dims()) throw std::invalid_argument("grid and torus dimensions differ");
    c.equilibrium.validate();
    if (c.equilibrium.dims() != c.torus.dims()) throw std::invalid_argument("equilibrium and torus dimensions differ");
    c.perturbation.validate(c.torus.dims());
    c.interpolator.validate();
    c.box.validate();
    if (c.t_final < 0.0) throw std::invalid_argument("simulation.t_final must be nonnegative");
    if (c.t_final > 0.0 && std::abs(static_cast<double>(c.steps()) * c.grid.dt - c.t_final) > 1e-9 * c.t_final)
      throw std::invalid_argument("simulation.t_final must be a multiple of grid.dt");
    for (const auto& f : c.fits) {
      if (f.mode.dims() != c.torus.dims()) throw std::invalid_argument("fit '" + f.name + "': mode dimension mismatch");
      if (f.stages.empty()) throw std::invalid_argument("fit '" + f.name + "' has no stages");
      for (const auto& st : f.stages) st.window.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return parse_config(j);
}

// Resolve one fit's basis references against the predictions for its mode.
inline FitBasis resolve_basis(const std::vector<BasisRef>& refs, const SpatialMode& target,
                              const std::vector<TargetPredictions>& predictions) {
  const std::vector<FrequencyPrediction>* list = nullptr;
  for (const auto& tp : predictions)
    if (tp.target == target) list = &tp.predictions;
  FitBasis basis;
  for (const auto& r : refs) {
    if (r.omega) {
      basis.push_back({*r.omega, r.degree.value_or(0)});
      continue;
    }
    const FrequencyPrediction* hit = nullptr;
    if (list)
      for (const auto& p : *list)
        if (r.matches(p)) {
          hit = &p;
          break;
        }
    if (!hit)
      throw ConfigError("basis entry " + r.text + " names no predicted frequency for mode " + target.to_string());
    basis.push_back({hit->omega, r.degree.value_or(hit->max_degree)});
  }
  return basis;
}

} // namespace vplab
