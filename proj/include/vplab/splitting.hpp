#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace vplab {

enum class StageKind { X, V };

struct Stage {
  StageKind kind;
  double coefficient;
};

struct SplittingScheme {
  std::string name;
  std::vector<Stage> stages;
  int order = 0; // nominal, 0 if unknown

  void validate() const {
    if (stages.empty()) throw std::invalid_argument("splitting scheme '" + name + "' has no stages");
    double sx = 0.0, sv = 0.0;
    for (const auto& s : stages) (s.kind == StageKind::X ? sx : sv) += s.coefficient;
    if (std::abs(sx - 1.0) > 1e-12 || std::abs(sv - 1.0) > 1e-12)
      throw std::invalid_argument("splitting scheme '" + name + "': X and V coefficients must each sum to 1 (got " +
                                  std::to_string(sx) + ", " + std::to_string(sv) + ")");
  }

  std::size_t count(StageKind k) const {
    std::size_t n = 0;
    for (const auto& s : stages) n += s.kind == k;
    return n;
  }
};

// Product of Strang steps X(w/2) V(w) X(w/2) for each weight w, with
// adjacent X stages merged.
inline SplittingScheme compose_strang(std::string name, const std::vector<double>& weights, int order) {
  SplittingScheme s{std::move(name), {}, order};
  for (double w : weights) {
    if (!s.stages.empty() && s.stages.back().kind == StageKind::X) s.stages.back().coefficient += 0.5 * w;
    else s.stages.push_back({StageKind::X, 0.5 * w});
    s.stages.push_back({StageKind::V, w});
    s.stages.push_back({StageKind::X, 0.5 * w});
  }
  s.validate();
  return s;
}

inline SplittingScheme strang() { return compose_strang("strang", {1.0}, 2); }

// Yoshida's triple jump.
inline SplittingScheme triple_jump() {
  const double g1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double g0 = 1.0 - 2.0 * g1;
  return compose_strang("triple_jump", {g1, g0, g1}, 4);
}

// Yoshida's sixth-order composition (solution A).
inline SplittingScheme yoshida6() {
  const double w1 = -1.17767998417887100695;
  const double w2 = 0.23557321335935813368;
  const double w3 = 0.78451361047755726382;
  const double w0 = 1.0 - 2.0 * (w1 + w2 + w3);
  return compose_strang("yoshida6", {w3, w2, w1, w0, w1, w2, w3}, 6);
}

inline SplittingScheme scheme_by_name(const std::string& name) {
  if (name == "strang") return strang();
  if (name == "triple_jump") return triple_jump();
  if (name == "yoshida6") return yoshida6();
  throw std::invalid_argument("unknown splitting scheme '" + name + "' (expected strang, triple_jump, yoshida6 or custom)");
}

} // namespace vplab
