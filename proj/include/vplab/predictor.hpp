#pragma once

// Frequency content of the second-order potential on each target mode
// k = k1 + k2, k1, k2 in the initialized mode set K:
//   J  zeros of D_k,
//   I  sums w1 + w2 of zeros of D_k1 and D_k2,
//   B  Best frequencies (|k|/|k1|) w1 when k2 = -gamma k1 with 0 < gamma < 1.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vplab/dispersion.hpp"
#include "vplab/phase_space.hpp"

namespace vplab {

struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational make(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("zero denominator");
    if (d < 0) n = -n, d = -d;
    const long long g = std::gcd(n < 0 ? -n : n, d);
    return {n / (g ? g : 1), d / (g ? g : 1)};
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational one_minus() const { return make(den - num, den); }
  friend bool operator==(const Rational&, const Rational&) = default;
  std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }
};

// gamma in (0,1) with m2 = -gamma m1 componentwise, compared on integers.
inline std::optional<Rational> detect_resonance(const SpatialMode& m1, const SpatialMode& m2) {
  if (m1.dims() != m2.dims()) throw std::invalid_argument("mode dimension mismatch");
  if (m1.is_zero() || m2.is_zero()) throw std::invalid_argument("resonance test needs nonzero modes");
  std::optional<Rational> ratio;
  for (std::size_t j = 0; j < m1.dims(); ++j) {
    if ((m1[j] == 0) != (m2[j] == 0)) return std::nullopt;
    if (m1[j] == 0) continue;
    const Rational r = Rational::make(-static_cast<long long>(m2[j]), m1[j]);
    if (ratio && !(*ratio == r)) return std::nullopt;
    ratio = r;
  }
  if (!ratio || ratio->num <= 0 || ratio->num >= ratio->den) return std::nullopt;
  return ratio;
}

enum class Family { J, I, B };

inline const char* family_name(Family f) {
  switch (f) {
  case Family::J: return "J";
  case Family::I: return "I";
  case Family::B: return "B";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "J") return Family::J;
  if (s == "I") return Family::I;
  if (s == "B") return Family::B;
  throw std::invalid_argument("unknown frequency family '" + s + "' (expected J, I or B)");
}

// A zero of D_k with its position in the sorted root list: `rank` counts
// distinct imaginary parts from the top (0 = least damped pair), `branch` is
// the sign of the real part.
struct RootRef {
  SpatialMode mode;
  complex omega;
  int multiplicity = 1;
  int rank = 0;
  int branch = 1;
};

struct FrequencyPrediction {
  SpatialMode target;
  Family family = Family::J;
  complex omega;
  int max_degree = 0;
  RootRef first;                 // J: the root; I, B: the k1 root
  std::optional<RootRef> second; // I only
  std::optional<SpatialMode> partner; // k2, for I and B
  std::optional<Rational> gamma;      // B only
  int sigma = 0;
  int nu = 0;
};

struct TargetPredictions {
  SpatialMode target;
  std::vector<FrequencyPrediction> predictions;
};

// Roots per mode. D_{-k} = D_k for the Gaussian class, so a lookup falls back
// to the opposite mode.
class RootTable {
public:
  void insert(const SpatialMode& m, std::vector<DispersionRoot> roots) {
    std::sort(roots.begin(), roots.end(), detail::canonical_order);
    table_[m.index()] = std::move(roots);
  }

  bool contains(const SpatialMode& m) const {
    return table_.count(m.index()) != 0 || table_.count((-m).index()) != 0;
  }

  const std::vector<DispersionRoot>& at(const SpatialMode& m) const {
    auto it = table_.find(m.index());
    if (it == table_.end()) it = table_.find((-m).index());
    if (it == table_.end()) throw std::invalid_argument("no dispersion roots for mode " + m.to_string());
    return it->second;
  }

  std::vector<RootRef> refs(const SpatialMode& m) const {
    const auto& roots = at(m);
    std::vector<RootRef> out;
    int rank = -1;
    double last_im = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const double im = std::round(roots[i].omega.imag() * 1e9);
      if (i == 0 || im != last_im) ++rank;
      last_im = im;
      out.push_back({m, roots[i].omega, roots[i].multiplicity, rank, roots[i].omega.real() >= 0.0 ? 1 : -1});
    }
    return out;
  }

  // Multiplicity of w as a zero of D_m, or 0.
  int multiplicity_at(const SpatialMode& m, complex w, double tol) const {
    for (const auto& r : at(m))
      if (std::abs(r.omega - w) <= tol) return r.multiplicity;
    return 0;
  }

  std::size_t size() const { return table_.size(); }

private:
  std::map<std::vector<int>, std::vector<DispersionRoot>> table_;
};

// Target modes reachable from K, and every mode whose roots predict() reads.
inline std::vector<SpatialMode> target_modes(const std::vector<SpatialMode>& K, const TorusSpec& torus) {
  std::vector<SpatialMode> out;
  for (const auto& k1 : K)
    for (const auto& k2 : K) {
      const SpatialMode k = k1 + k2;
      if (k.is_zero() || physical_dot(k, k1, torus) == 0.0) continue;
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<SpatialMode> required_root_modes(const std::vector<SpatialMode>& K, const TorusSpec& torus) {
  std::vector<SpatialMode> out = target_modes(K, torus);
  for (const auto& k : K)
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

struct PredictOptions {
  double lambda_floor = -3.0;
  double coincidence_tol = 1e-8;
  double dedup_tol = 1e-10;
};

inline std::vector<TargetPredictions> predict(const std::vector<SpatialMode>& K, const RootTable& roots,
                                              const TorusSpec& torus, const PredictOptions& opt = {}) {
  const double lam = opt.lambda_floor;
  std::map<std::vector<int>, std::vector<FrequencyPrediction>> by_target;

  auto emit = [&](FrequencyPrediction p) {
    auto& list = by_target[p.target.index()];
    for (auto& q : list)
      if (q.family == p.family && std::abs(q.omega - p.omega) <= opt.dedup_tol) {
        q.max_degree = std::max(q.max_degree, p.max_degree);
        return;
      }
    list.push_back(std::move(p));
  };

  for (const auto& k1 : K)
    for (const auto& k2 : K) {
      const SpatialMode k = k1 + k2;
      if (k.is_zero() || physical_dot(k, k1, torus) == 0.0) continue;
      const auto rk = roots.refs(k);
      const auto r1 = roots.refs(k1);
      const auto r2 = roots.refs(k2);
      const auto gamma = detect_resonance(k1, k2);
      const std::optional<Rational> factor = gamma ? std::optional(gamma->one_minus()) : std::nullopt;
      const double fval = gamma ? static_cast<double>(gamma->den - gamma->num) / static_cast<double>(gamma->den) : 0.0;

      by_target[k.index()]; // a reachable target is listed even with no surviving frequency
      for (const auto& r : rk) {
        if (r.omega.imag() < lam) continue;
        FrequencyPrediction p{k, Family::J, r.omega, r.multiplicity - 1, r, std::nullopt, std::nullopt,
                              std::nullopt, 0, 0};
        emit(std::move(p));
      }

      for (const auto& a : r1)
        for (const auto& b : r2) {
          if (a.omega.imag() + b.omega.imag() < lam) continue;
          const complex w = a.omega + b.omega;
          const int nk = roots.multiplicity_at(k, w, opt.coincidence_tol);
          int sigma = nk > 0 ? nk - 1 : 0;
          if (factor && std::abs(w - fval * a.omega) <= opt.coincidence_tol) sigma += 2;
          FrequencyPrediction p{k, Family::I, w, a.multiplicity + b.multiplicity - 2 + sigma, a, b, k2,
                                std::nullopt, sigma, 0};
          emit(std::move(p));
        }

      if (factor) {
        for (const auto& a : r1) {
          const complex wb = fval * a.omega;
          if (wb.imag() < lam) continue;
          const int nk = roots.multiplicity_at(k, wb, opt.coincidence_tol);
          const int nu = nk > 0 ? nk - 1 : 0;
          FrequencyPrediction p{k, Family::B, wb, a.multiplicity + nu, a, std::nullopt, k2, gamma, 0, nu};
          emit(std::move(p));
        }
      }
    }

  std::vector<TargetPredictions> out;
  for (auto& [idx, list] : by_target) {
    std::stable_sort(list.begin(), list.end(), [](const FrequencyPrediction& a, const FrequencyPrediction& b) {
      if (a.family != b.family) return static_cast<int>(a.family) < static_cast<int>(b.family);
      const double ia = std::round(a.omega.imag() * 1e9), ib = std::round(b.omega.imag() * 1e9);
      if (ia != ib) return ia > ib;
      return a.omega.real() < b.omega.real();
    });
    out.push_back({SpatialMode(idx), std::move(list)});
  }
  return out;
}

} // namespace vplab
