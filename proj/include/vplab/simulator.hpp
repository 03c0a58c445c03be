#pragma once

// Split semi-Lagrangian solver for
//   f_t + v . grad_x f + E . grad_v f = 0,   E = -grad phi,   Delta phi = n - rho.
// X stages free-stream along each spatial axis; V stages accelerate along
// each velocity axis with E recomputed from the current density.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vplab/equilibrium.hpp"
#include "vplab/error.hpp"
#include "vplab/interpolation.hpp"
#include "vplab/phase_space.hpp"
#include "vplab/poisson.hpp"
#include "vplab/splitting.hpp"

namespace vplab {

enum class RecordSource { ElectricField, Density };

struct Diagnostics {
  std::size_t step = 0;
  double t = 0.0;
  double mass = 0.0;
  double l2 = 0.0;
  double electric_energy = 0.0; // (1/2) int |E|^2 dx
  double max_abs_E = 0.0;
  double poisson_residual = 0.0;
};

struct SimulationOptions {
  SplittingScheme scheme = strang();
  InterpolatorSpec interpolator{};
  Boundary velocity_boundary = Boundary::Periodic;
  std::vector<SpatialMode> recorded_modes;
  RecordSource source = RecordSource::ElectricField;
  double dt = 0.1;
};

class Simulation {
public:
  Simulation(PhaseSpaceField initial, SimulationOptions opt)
      : field_(std::move(initial)), opt_(std::move(opt)), poisson_(field_.grid()) {
    opt_.scheme.validate();
    opt_.interpolator.validate();
    if (!(opt_.dt > 0.0) || !std::isfinite(opt_.dt)) throw std::invalid_argument("time step must be positive");
    const auto& g = field_.grid();
    if (opt_.interpolator.width() > static_cast<int>(std::min(min_extent_x(g), min_extent_v(g))))
      throw std::invalid_argument("interpolation stencil is wider than the grid");
    for (const auto& m : opt_.recorded_modes) {
      if (m.dims() != g.dims()) throw std::invalid_argument("recorded mode dimension mismatch");
      if (!g.representable(m)) throw std::invalid_argument("recorded mode " + m.to_string() + " is not representable");
      series_.emplace_back(m);
    }
    extents_ = g.extents();
    refresh_field();
    record(0);
  }

  const PhaseSpaceField& field() const { return field_; }
  PhaseSpaceField& field() { return field_; }
  const PhaseGrid& grid() const { return field_.grid(); }
  double time() const { return static_cast<double>(steps_) * opt_.dt; }
  std::size_t steps() const { return steps_; }
  const SimulationOptions& options() const { return opt_; }
  const std::vector<ModeSeries>& series() const { return series_; }
  const std::vector<Diagnostics>& diagnostics() const { return diagnostics_; }
  const PoissonResult& potential() const { return potential_; }
  const std::vector<double>& rho() const { return rho_; }

  // Free streaming over dt_eff along every spatial axis.
  void advect_x(double dt_eff) {
    const auto& g = grid();
    const std::size_t d = g.dims();
    const std::size_t nvt = g.nv_total();
    for (std::size_t j = 0; j < d; ++j) {
      std::size_t vstride = 1;
      for (std::size_t l = j + 1; l < d; ++l) vstride *= g.nv(l);
      const auto& vj = g.v(j);
      const std::size_t nvj = g.nv(j);
      const double scale = dt_eff / g.dx(j);
      auto cells = [&](std::size_t, std::size_t r) { return vj[((r % nvt) / vstride) % nvj] * scale; };
      sweep_axis(field_.values(), extents_, j, cells, opt_.interpolator, Boundary::Periodic);
    }
  }

  // Acceleration over dt_eff with the field of the current density.
  void advect_v(double dt_eff) {
    refresh_field();
    accelerate(dt_eff);
  }

  // Acceleration with the stored field (no Poisson solve).
  void accelerate(double dt_eff) { accelerate(potential_.E, dt_eff); }

  // Acceleration with a given field, one x-grid vector per axis.
  void accelerate(const std::vector<std::vector<double>>& E, double dt_eff) {
    const auto& g = grid();
    const std::size_t d = g.dims();
    if (E.size() != d) throw std::invalid_argument("field needs one component per axis");
    for (std::size_t j = 0; j < d; ++j) {
      if (E[j].size() != g.nx_total()) throw std::invalid_argument("field component has the wrong size");
      std::size_t before = 1;
      for (std::size_t l = 0; l < j; ++l) before *= g.nv(l);
      const auto& Ej = E[j];
      const double scale = dt_eff / g.dv(j);
      auto cells = [&](std::size_t o, std::size_t) { return Ej[o / before] * scale; };
      sweep_axis(field_.values(), extents_, d + j, cells, opt_.interpolator, opt_.velocity_boundary);
    }
  }

  void step() {
    for (const auto& s : opt_.scheme.stages) {
      if (s.kind == StageKind::X) advect_x(s.coefficient * opt_.dt);
      else advect_v(s.coefficient * opt_.dt);
    }
    ++steps_;
    refresh_field();
    record(steps_);
    const auto& dg = diagnostics_.back();
    if (!std::isfinite(dg.mass) || !std::isfinite(dg.l2) || !std::isfinite(dg.electric_energy))
      throw NumericalError("non-finite values in the distribution at step " + std::to_string(steps_) +
                           " (t = " + std::to_string(dg.t) + ")");
  }

  void run(std::size_t n, const std::function<void(const Simulation&)>& observer = {}) {
    for (std::size_t i = 0; i < n; ++i) {
      step();
      if (observer) observer(*this);
    }
  }

private:
  static std::size_t min_extent_x(const PhaseGrid& g) {
    std::size_t m = g.nx(0);
    for (std::size_t j = 1; j < g.dims(); ++j) m = std::min(m, g.nx(j));
    return m;
  }
  static std::size_t min_extent_v(const PhaseGrid& g) {
    std::size_t m = g.nv(0);
    for (std::size_t j = 1; j < g.dims(); ++j) m = std::min(m, g.nv(j));
    return m;
  }

  void refresh_field() {
    rho_ = density(field_);
    poisson_.solve(rho_, potential_);
  }

  void record(std::size_t n) {
    const auto& g = grid();
    Diagnostics dg;
    dg.step = n;
    dg.t = static_cast<double>(n) * opt_.dt;
    dg.mass = field_.mass();
    dg.l2 = field_.l2_norm();
    double e2 = 0.0, emax = 0.0;
    for (const auto& Ej : potential_.E)
      for (double e : Ej) {
        e2 += e * e;
        emax = std::max(emax, std::abs(e));
      }
    dg.electric_energy = 0.5 * e2 * g.cell_volume_x();
    dg.max_abs_E = emax;
    dg.poisson_residual = poisson_.residual(rho_, potential_.phi);
    diagnostics_.push_back(dg);
    for (auto& s : series_) {
      const std::vector<double>& u = opt_.source == RecordSource::Density ? rho_ : potential_.E[0];
      s.push_back(dg.t, mode_extract(g, u, s.mode()));
    }
  }

  PhaseSpaceField field_;
  SimulationOptions opt_;
  PoissonSolver poisson_;
  std::vector<std::size_t> extents_;
  std::vector<double> rho_;
  PoissonResult potential_;
  std::vector<ModeSeries> series_;
  std::vector<Diagnostics> diagnostics_;
  std::size_t steps_ = 0;
};

} // namespace vplab
