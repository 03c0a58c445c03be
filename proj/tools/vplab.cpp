// vplab: dispersion roots, frequency prediction, Vlasov-Poisson runs and
// mode fits, driven by one JSON config per experiment.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vplab/config.hpp"
#include "vplab/error.hpp"
#include "vplab/pipeline.hpp"
#include "vplab/report.hpp"

namespace fs = std::filesystem;
using namespace vplab;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
  double tol = 0.0;
};

ExperimentConfig load(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_config(c.config);
  if (c.tol > 0.0) cfg.root_options.tol = c.tol;
  if (!c.out.empty()) cfg.output = c.out;
  return cfg;
}

fs::path out_dir(const ExperimentConfig& cfg) {
  fs::path d = cfg.output;
  fs::create_directories(d);
  return d;
}

SearchBox parse_box(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--box: cannot parse '" + item + "'");
    }
  }
  if (v.size() != 4) throw ConfigError("--box expects re_min,re_max,im_min,im_max");
  SearchBox b{v[0], v[1], v[2], v[3]};
  try {
    b.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--box: ") + e.what());
  }
  return b;
}

void print_roots(const SpatialMode* m, const std::vector<double>& k, const RootSearchResult& r) {
  std::printf("# k =");
  for (double x : k) std::printf(" %.10g", x);
  if (m) std::printf("  (mode %s)", m->to_string().c_str());
  std::printf("  zeros in box: %d\n", r.total_count);
  for (const auto& x : r.roots)
    std::printf("%+.10f %+.10fi  mult %d  |D| %.2e\n", x.omega.real(), x.omega.imag(), x.multiplicity, x.residual);
  for (const auto& u : r.unresolved)
    std::printf("unresolved: [%g, %g] x [%g, %g] holds %d\n", u.box.re_min, u.box.re_max, u.box.im_min, u.box.im_max,
                u.count);
}

struct RootsArgs {
  std::string equilibrium = "maxwell1d";
  std::vector<double> k;
  std::vector<int> k_index;
  std::string box;
};

int cmd_roots(const Common& c, const RootsArgs& a) {
  EquilibriumSpec eq;
  std::vector<std::pair<std::optional<SpatialMode>, std::vector<double>>> jobs;
  SearchBox box{};
  RootSearchOptions opt{};
  fs::path dir = c.out.empty() ? fs::path() : fs::path(c.out);

  if (!c.config.empty()) {
    const ExperimentConfig cfg = load(c);
    eq = cfg.equilibrium;
    box = cfg.box;
    opt = cfg.root_options;
    dir = out_dir(cfg);
    if (!a.k_index.empty()) {
      const SpatialMode m(a.k_index);
      if (m.dims() != cfg.torus.dims()) throw ConfigError("--k-index dimension differs from the torus");
      jobs.push_back({m, m.wavevector(cfg.torus)});
    } else if (!a.k.empty()) {
      jobs.push_back({std::nullopt, a.k});
    } else {
      for (const auto& m : required_root_modes(cfg.perturbation.mode_set(), cfg.torus))
        jobs.push_back({m, m.wavevector(cfg.torus)});
    }
  } else {
    if (a.equilibrium == "maxwell1d") eq = EquilibriumSpec::maxwellian_1d();
    else if (a.equilibrium == "maxwell2d") eq = EquilibriumSpec::normalized_maxwellian_2d();
    else throw ConfigError("--equilibrium must be maxwell1d or maxwell2d");
    if (a.k.empty()) throw ConfigError("--k is required without --config");
    if (a.k.size() != eq.dims())
      throw ConfigError("--k needs " + std::to_string(eq.dims()) + " component(s) for " + a.equilibrium);
    jobs.push_back({std::nullopt, a.k});
  }
  if (!a.box.empty()) box = parse_box(a.box);
  if (c.tol > 0.0) opt.tol = c.tol;

  json report = json::array();
  std::size_t unresolved = 0;
  for (const auto& [m, k] : jobs) {
    DispersionFunction disp(eq, k);
    const RootSearchResult r = find_roots(disp, box, opt);
    print_roots(m ? &*m : nullptr, k, r);
    unresolved += r.unresolved.size();
    report.push_back(report::root_report(m.value_or(SpatialMode{std::vector<int>(k.size(), 0)}), k, r));
  }
  if (!dir.empty()) {
    fs::create_directories(dir);
    report::write_json(dir / "roots.json", report);
  }
  if (unresolved) {
    std::fprintf(stderr, "error: %zu bracket(s) could not be resolved\n", unresolved);
    return kNumerical;
  }
  return kOk;
}

struct Prepared {
  RootStage roots;
  std::vector<TargetPredictions> predictions;
};

Prepared prepare(const ExperimentConfig& cfg, const fs::path& dir) {
  Prepared p;
  p.roots = compute_roots(cfg);
  report::write_json(dir / "roots.json", p.roots.report);
  if (p.roots.unresolved)
    throw NumericalError(std::to_string(p.roots.unresolved) + " root bracket(s) could not be resolved");
  p.predictions = compute_predictions(cfg, p.roots.table);
  report::write_json(dir / "predictions.json", predictions_json(p.predictions));
  return p;
}

int cmd_predict(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const fs::path dir = out_dir(cfg);
  const Prepared p = prepare(cfg, dir);
  for (const auto& tp : p.predictions) {
    std::printf("# target %s\n", tp.target.to_string().c_str());
    for (const auto& f : tp.predictions)
      std::printf("%s  %+.10f %+.10fi  deg %d\n", family_name(f.family), f.omega.real(), f.omega.imag(),
                  f.max_degree);
  }
  return kOk;
}

json scheme_json(const SplittingScheme& s) {
  json st = json::array();
  for (const auto& x : s.stages) st.push_back({{"stage", x.kind == StageKind::X ? "X" : "V"}, {"c", x.coefficient}});
  return {{"name", s.name}, {"order", s.order}, {"stages", st}};
}

json simulate(const ExperimentConfig& cfg, const fs::path& dir, const json& raw) {
  const auto t0 = std::chrono::steady_clock::now();
  Simulation sim = make_simulation(cfg);
  sim.run(cfg.steps());
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json files = json::array();
  for (const auto& s : sim.series()) {
    const std::string name = report::series_filename(s.mode());
    report::write_series(dir / name, s);
    files.push_back({{"mode", s.mode().index()}, {"file", name}});
  }
  report::write_diagnostics(dir / "diagnostics.csv", sim.diagnostics());
  const SimulationSummary sum = summarize(sim);
  const json manifest = {
      {"config", raw},
      {"grid", {{"nx", cfg.grid.nx}, {"nv", cfg.grid.nv}, {"vmax", cfg.grid.vmax}, {"dt", cfg.grid.dt}}},
      {"lengths", cfg.torus.lengths},
      {"scheme", scheme_json(cfg.scheme)},
      {"interpolation_degree", cfg.interpolator.degree},
      {"velocity_boundary", cfg.velocity_boundary == Boundary::Periodic ? "periodic" : "zero"},
      {"record_source", cfg.source == RecordSource::ElectricField ? "E" : "rho"},
      {"steps", sum.steps},
      {"t_final", sim.time()},
      {"series", files},
      {"diagnostics", "diagnostics.csv"},
      {"max_relative_mass_drift", sum.max_mass_drift},
      {"max_poisson_residual", sum.max_poisson_residual},
      {"max_abs_E", sum.max_abs_E}};
  report::write_json(dir / "manifest.json", manifest);
  // Wall time lives apart so that manifest.json is bit-reproducible.
  report::write_json(dir / "timing.json", {{"simulate_seconds", wall}});
  std::printf("simulated %zu steps in %.1f s; mass drift %.3e, max|E| %.3e\n", sum.steps, wall, sum.max_mass_drift,
              sum.max_abs_E);
  return manifest;
}

json raw_config(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in, nullptr, true, true);
}

int cmd_simulate(const Common& c) {
  const ExperimentConfig cfg = load(c);
  simulate(cfg, out_dir(cfg), raw_config(c.config));
  return kOk;
}

void fit_all(const ExperimentConfig& cfg, const Prepared& p, const fs::path& series_dir, const fs::path& dir) {
  for (const auto& fc : cfg.fits) {
    const ModeSeries s = report::read_series(series_dir / report::series_filename(fc.mode), fc.mode);
    const FitOutcome f = run_fit(fc, s, p.predictions);
    write_fit_artifacts(dir, f);
    std::printf("# fit %s (mode %s)\n", f.name.c_str(), f.mode.to_string().c_str());
    for (std::size_t st = 0; st < f.stages.size(); ++st) {
      const auto& r = f.stages[st];
      std::printf("stage %zu: [%g, %g] lambda %g  residual %.6e  cond %.3e\n", st + 1, r.window.t_min,
                  r.window.t_max, r.window.lambda, r.residual, r.condition);
      for (std::size_t i = 0; i < r.coefficients.size(); ++i)
        std::printf("  z%zu = %+.6e %+.6ei\n", i + 1, r.coefficients[i].real(), r.coefficients[i].imag());
    }
  }
}

int cmd_fit(const Common& c, const std::string& series) {
  const ExperimentConfig cfg = load(c);
  const fs::path dir = out_dir(cfg);
  const Prepared p = prepare(cfg, dir);
  fit_all(cfg, p, series.empty() ? dir : fs::path(series), dir);
  return kOk;
}

int cmd_pipeline(const Common& c, bool skip_simulate) {
  const ExperimentConfig cfg = load(c);
  const fs::path dir = out_dir(cfg);
  const Prepared p = prepare(cfg, dir);
  // Resolve every basis before the (long) simulation so that a bad
  // reference fails fast.
  for (const auto& fc : cfg.fits)
    for (const auto& st : fc.stages) resolve_basis(st.basis, fc.mode, p.predictions);
  if (!skip_simulate) simulate(cfg, dir, raw_config(c.config));
  fit_all(cfg, p, dir, dir);
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landau damping lab: dispersion roots, frequency prediction, simulation, mode fitting"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* o = sub->add_option("--config", common.config, "experiment config (JSON)");
    if (config_required) o->required();
    sub->add_option("--out", common.out, "output directory (overrides the config)");
    sub->add_option("--threads", common.threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", common.tol, "root-polish tolerance on |D|")->check(CLI::PositiveNumber);
  };

  RootsArgs ra;
  auto* roots = app.add_subcommand("roots", "zeros of the dispersion function in a box");
  add_common(roots, false);
  roots->add_option("--equilibrium", ra.equilibrium, "maxwell1d or maxwell2d (without --config)");
  roots->add_option("--k", ra.k, "physical wavevector components")->delimiter(',');
  roots->add_option("--k-index", ra.k_index, "mode index on the config torus")->delimiter(',');
  roots->add_option("--box", ra.box, "re_min,re_max,im_min,im_max");

  auto* pred = app.add_subcommand("predict", "frequencies predicted for every target mode");
  add_common(pred, true);
  auto* sim = app.add_subcommand("simulate", "run the semi-Lagrangian solver and record mode series");
  add_common(sim, true);
  std::string series_dir;
  auto* fit = app.add_subcommand("fit", "fit recorded series against predicted frequencies");
  add_common(fit, true);
  fit->add_option("--series", series_dir, "directory holding series CSVs (default: output directory)");
  bool skip = false;
  auto* pipe = app.add_subcommand("pipeline", "roots, predict, simulate and fit in one go");
  add_common(pipe, true);
  pipe->add_flag("--skip-simulate", skip, "re-fit existing series CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

#ifdef _OPENMP
  if (common.threads > 0) omp_set_num_threads(common.threads);
#endif

  try {
    if (*roots) return cmd_roots(common, ra);
    if (*pred) return cmd_predict(common);
    if (*sim) return cmd_simulate(common);
    if (*fit) return cmd_fit(common, series_dir);
    if (*pipe) return cmd_pipeline(common, skip);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
