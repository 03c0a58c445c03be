#pragma once

// Gaussian-class velocity distributions: finite sums of axis-aligned,
// centered Gaussians A * exp(-sum_j v_j^2 / (2 sigma_j^2)). Their Fourier
// transforms are closed-form, which the dispersion module relies on.
//
// No normalization is applied anywhere: e^{-v^2/2} and (1/2pi) e^{-|v|^2/2}
// are different equilibria with different dispersion roots.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "vplab/phase_space.hpp"

namespace vplab {

struct GaussianTerm {
  double amplitude = 1.0;
  std::vector<double> sigmas;

  std::size_t dims() const { return sigmas.size(); }

  void validate() const {
    if (sigmas.empty()) throw std::invalid_argument("Gaussian term needs at least one width");
    if (!std::isfinite(amplitude)) throw std::invalid_argument("Gaussian amplitude must be finite");
    for (double s : sigmas)
      if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("Gaussian widths must be positive");
  }

  double operator()(std::span<const double> v) const {
    double e = 0.0;
    for (std::size_t j = 0; j < sigmas.size(); ++j) e += v[j] * v[j] / (2.0 * sigmas[j] * sigmas[j]);
    return amplitude * std::exp(-e);
  }

  // Integral over R^d.
  double mass() const {
    double m = amplitude;
    for (double s : sigmas) m *= std::sqrt(2.0 * std::numbers::pi) * s;
    return m;
  }
};

inline double eval_terms(std::span<const GaussianTerm> terms, std::span<const double> v) {
  double s = 0.0;
  for (const auto& t : terms) s += t(v);
  return s;
}

struct EquilibriumSpec {
  std::vector<GaussianTerm> terms;

  std::size_t dims() const { return terms.empty() ? 0 : terms.front().dims(); }

  double mass() const {
    double m = 0.0;
    for (const auto& t : terms) m += t.mass();
    return m;
  }

  void validate() const {
    if (terms.empty()) throw std::invalid_argument("equilibrium needs at least one term");
    for (const auto& t : terms) {
      t.validate();
      if (t.dims() != dims()) throw std::invalid_argument("equilibrium terms differ in dimension");
    }
    if (!(mass() > 0.0)) throw std::invalid_argument("equilibrium must have positive mass");
  }

  static EquilibriumSpec maxwellian_1d() { return {{GaussianTerm{1.0, {1.0}}}}; }
  static EquilibriumSpec normalized_maxwellian_2d() {
    return {{GaussianTerm{1.0 / (2.0 * std::numbers::pi), {1.0, 1.0}}}};
  }
};

inline double eval_equilibrium(const EquilibriumSpec& eq, std::span<const double> v) {
  if (v.size() != eq.dims()) throw std::invalid_argument("velocity dimension mismatch");
  return eval_terms(eq.terms, v);
}

// tau -> F[f_eq](k tau) = sum_i weight_i * exp(-rate_i * tau^2), with
// F[u](xi) = int u(v) exp(-i v.xi) dv.
class DirectionalFourier {
public:
  struct Component {
    double weight; // A * prod_j sqrt(2 pi) sigma_j
    double rate;   // sum_j sigma_j^2 k_j^2 / 2
  };

  DirectionalFourier() = default;
  explicit DirectionalFourier(std::vector<Component> components) : components_(std::move(components)) {}

  double operator()(double tau) const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight * std::exp(-c.rate * tau * tau);
    return s;
  }

  const std::vector<Component>& components() const { return components_; }

private:
  std::vector<Component> components_;
};

inline DirectionalFourier directional_fourier(const EquilibriumSpec& eq, std::span<const double> k) {
  eq.validate();
  if (k.size() != eq.dims()) throw std::invalid_argument("wavevector dimension mismatch");
  double k2 = 0.0;
  for (double kj : k) k2 += kj * kj;
  if (!(k2 > 0.0)) throw std::invalid_argument("directional Fourier transform needs a nonzero wavevector");
  std::vector<DirectionalFourier::Component> comps;
  for (const auto& t : eq.terms) {
    double rate = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) rate += t.sigmas[j] * t.sigmas[j] * k[j] * k[j] / 2.0;
    comps.push_back({t.mass(), rate});
  }
  return DirectionalFourier(std::move(comps));
}

enum class Phase { Cos, Sin };

struct PerturbationComponent {
  SpatialMode mode;
  Phase phase = Phase::Cos;
  std::vector<GaussianTerm> profile;
};

struct PerturbationSpec {
  std::vector<PerturbationComponent> components;
  double epsilon = 0.0;

  // The finite mode set K of the initial perturbation, with the conjugate
  // modes included (a real cos/sin perturbation excites both m and -m).
  std::vector<SpatialMode> mode_set() const {
    std::vector<SpatialMode> k;
    for (const auto& c : components) {
      for (const auto& m : {c.mode, -c.mode})
        if (std::find(k.begin(), k.end(), m) == k.end()) k.push_back(m);
    }
    std::sort(k.begin(), k.end());
    return k;
  }

  void validate(std::size_t dims) const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be nonnegative");
    for (const auto& c : components) {
      if (c.mode.dims() != dims) throw std::invalid_argument("perturbation mode dimension mismatch");
      if (c.mode.is_zero()) throw std::invalid_argument("perturbation modes must be nonzero");
      for (const auto& t : c.profile) {
        t.validate();
        if (t.dims() != dims) throw std::invalid_argument("perturbation profile dimension mismatch");
      }
    }
  }
};

// f_0(x, v) = f_eq(v) + eps * sum_c [cos|sin](k_c . x) * profile_c(v).
inline PhaseSpaceField build_initial_field(const EquilibriumSpec& eq, const PerturbationSpec& pert,
                                           const PhaseGrid& grid) {
  eq.validate();
  const std::size_t d = grid.dims();
  if (eq.dims() != d) throw std::invalid_argument("equilibrium and grid dimensions differ");
  pert.validate(d);
  for (const auto& c : pert.components)
    if (!grid.representable(c.mode))
      throw std::invalid_argument("perturbation mode " + c.mode.to_string() + " is not representable on the grid");

  const std::size_t nxt = grid.nx_total();
  const std::size_t nvt = grid.nv_total();
  std::vector<double> feq(nvt);
  std::vector<std::vector<double>> profiles(pert.components.size(), std::vector<double>(nvt));
  std::vector<double> v(d), x(d);
  for (std::size_t j = 0; j < nvt; ++j) {
    grid.velocity_at(j, v);
    feq[j] = eval_terms(eq.terms, v);
    for (std::size_t c = 0; c < pert.components.size(); ++c)
      profiles[c][j] = eval_terms(pert.components[c].profile, v);
  }

  std::vector<std::vector<double>> kvec;
  for (const auto& c : pert.components) kvec.push_back(c.mode.wavevector(grid.torus()));

  PhaseSpaceField field(grid);
  std::vector<double> spatial(pert.components.size());
  for (std::size_t i = 0; i < nxt; ++i) {
    grid.position_at(i, x);
    for (std::size_t c = 0; c < pert.components.size(); ++c) {
      double phase = 0.0;
      for (std::size_t j = 0; j < d; ++j) phase += kvec[c][j] * x[j];
      spatial[c] = pert.components[c].phase == Phase::Cos ? std::cos(phase) : std::sin(phase);
    }
    for (std::size_t j = 0; j < nvt; ++j) {
      double g = 0.0;
      for (std::size_t c = 0; c < pert.components.size(); ++c) g += spatial[c] * profiles[c][j];
      field.at(i, j) = feq[j] + pert.epsilon * g;
    }
  }
  return field;
}

} // namespace vplab
