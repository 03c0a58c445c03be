#pragma once

// roots -> predict -> simulate -> fit for one experiment config.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vplab/config.hpp"
#include "vplab/dispersion.hpp"
#include "vplab/modefit.hpp"
#include "vplab/predictor.hpp"
#include "vplab/report.hpp"
#include "vplab/simulator.hpp"

namespace vplab {

struct RootStage {
  RootTable table;
  nlohmann::json report = nlohmann::json::array();
  std::size_t unresolved = 0;
};

// Roots for every mode predict() reads. D_{-k} = D_k, so only one of each
// +-m pair is searched.
inline RootStage compute_roots(const ExperimentConfig& cfg) {
  RootStage out;
  const auto K = cfg.perturbation.mode_set();
  for (const auto& m : required_root_modes(K, cfg.torus)) {
    if (out.table.contains(m)) continue;
    const auto k = m.wavevector(cfg.torus);
    DispersionFunction disp(cfg.equilibrium, k);
    RootSearchResult r = find_roots(disp, cfg.box, cfg.root_options);
    out.unresolved += r.unresolved.size();
    out.report.push_back(report::root_report(m, k, r));
    out.table.insert(m, std::move(r.roots));
  }
  return out;
}

inline std::vector<TargetPredictions> compute_predictions(const ExperimentConfig& cfg, const RootTable& table) {
  return predict(cfg.perturbation.mode_set(), table, cfg.torus, cfg.predict_options);
}

inline nlohmann::json predictions_json(const std::vector<TargetPredictions>& preds) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& tp : preds) j.push_back(report::prediction_report(tp));
  return j;
}

inline Simulation make_simulation(const ExperimentConfig& cfg) {
  const PhaseGrid grid = make_grid(cfg.torus, cfg.grid);
  return Simulation(build_initial_field(cfg.equilibrium, cfg.perturbation, grid), cfg.simulation_options());
}

struct SimulationSummary {
  double max_mass_drift = 0.0;     // max_n |M_n - M_0| / |M_0|
  double max_poisson_residual = 0.0;
  double max_abs_E = 0.0;
  std::size_t steps = 0;
};

inline SimulationSummary summarize(const Simulation& sim) {
  SimulationSummary s;
  const auto& d = sim.diagnostics();
  s.steps = sim.steps();
  for (const auto& x : d) {
    s.max_mass_drift = std::max(s.max_mass_drift, std::abs(x.mass - d.front().mass) / std::abs(d.front().mass));
    s.max_poisson_residual = std::max(s.max_poisson_residual, x.poisson_residual);
    s.max_abs_E = std::max(s.max_abs_E, x.max_abs_E);
  }
  return s;
}

struct FitOutcome {
  std::string name;
  SpatialMode mode;
  Signal signal;
  std::vector<FitResult> stages;
};

inline FitOutcome run_fit(const FitConfig& fc, const ModeSeries& series,
                          const std::vector<TargetPredictions>& predictions) {
  FitOutcome out{fc.name, fc.mode, real_signal(series, fc.scale, fc.phase), {}};
  std::vector<FitStage> stages;
  for (const auto& st : fc.stages) stages.push_back({resolve_basis(st.basis, fc.mode, predictions), st.window});
  out.stages = fit_sequential(out.signal, stages, fc.method);
  return out;
}

inline nlohmann::json fit_outcome_json(const FitOutcome& f) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& r : f.stages) stages.push_back(report::fit_report(r));
  return {{"name", f.name}, {"mode", f.mode.index()}, {"stages", stages}};
}

// Per stage: t, model_re, residual_re, where the residual is what is left
// after subtracting this and all earlier stages. The curves file carries
// the absolute values used for semilog plots.
inline void write_fit_artifacts(const std::filesystem::path& dir, const FitOutcome& f) {
  namespace fs = std::filesystem;
  report::write_json(dir / ("fit_" + f.name + ".json"), fit_outcome_json(f));
  const std::size_t n = f.signal.t.size();
  std::vector<double> rest = f.signal.y;
  std::vector<std::vector<double>> models, residuals;
  for (std::size_t s = 0; s < f.stages.size(); ++s) {
    const auto& r = f.stages[s];
    std::vector<double> model(n);
    for (std::size_t i = 0; i < n; ++i) {
      model[i] = evaluate_model(r.basis, r.coefficients, f.signal.t[i]).real();
      rest[i] -= model[i];
    }
    std::ofstream out(dir / ("fit_" + f.name + "_stage" + std::to_string(s + 1) + "_residual.csv"));
    out << "t,model_re,residual_re\n";
    for (std::size_t i = 0; i < n; ++i)
      out << report::fmt(f.signal.t[i]) << ',' << report::fmt(model[i]) << ',' << report::fmt(rest[i]) << '\n';
    models.push_back(model);
    residuals.push_back(rest);
  }
  std::ofstream out(dir / ("fit_" + f.name + "_curves.csv"));
  out << "t,abs_data";
  for (std::size_t s = 0; s < f.stages.size(); ++s)
    out << ",abs_model_stage" << s + 1 << ",abs_residual_stage" << s + 1;
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << report::fmt(f.signal.t[i]) << ',' << report::fmt(std::abs(f.signal.y[i]));
    for (std::size_t s = 0; s < f.stages.size(); ++s)
      out << ',' << report::fmt(std::abs(models[s][i])) << ',' << report::fmt(std::abs(residuals[s][i]));
    out << '\n';
  }
}

} // namespace vplab
