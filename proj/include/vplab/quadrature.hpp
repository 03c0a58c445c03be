#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <cstddef>
#include <numbers>
#include <vector>

#include "vplab/error.hpp"

namespace vplab::quadrature {

struct Rule {
  std::vector<double> nodes;   // on [-1, 1]
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule from Newton iteration on the three-term
// recurrence.
inline Rule gauss_legendre(std::size_t n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = pk;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

inline const Rule& gauss_legendre_20() {
  static const Rule rule = gauss_legendre(20);
  return rule;
}

// Fixed rule on [a, b].
template <class F>
auto apply_rule(const Rule& rule, F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  decltype(f(a)) s{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(c + h * rule.nodes[i]);
  return s * h;
}

// Composite rule with `panels` equal panels.
template <class F>
auto composite(const Rule& rule, F&& f, double a, double b, std::size_t panels) {
  const double h = (b - a) / static_cast<double>(panels);
  decltype(f(a)) s{};
  for (std::size_t p = 0; p < panels; ++p) s += apply_rule(rule, f, a + p * h, a + (p + 1) * h);
  return s;
}

struct AdaptiveOptions {
  double abs_tol = 1e-15;
  std::size_t initial_panels = 8;
  int max_depth = 40;
};

namespace detail {

template <class T>
struct PanelEstimate {
  T value;
  double magnitude; // integral of |f|, for the rounding floor
};

template <class F>
auto panel(const Rule& rule, F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  PanelEstimate<decltype(f(a))> e{{}, 0.0};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto fi = f(c + h * rule.nodes[i]);
    e.value += rule.weights[i] * fi;
    e.magnitude += rule.weights[i] * std::abs(fi);
  }
  e.value *= h;
  e.magnitude *= h;
  return e;
}

template <class F, class T>
T refine(const Rule& rule, F& f, double a, double b, T whole, double tol_per_length, int depth,
         const AdaptiveOptions& opt) {
  const double m = 0.5 * (a + b);
  const auto left = panel(rule, f, a, m);
  const auto right = panel(rule, f, m, b);
  const T both = left.value + right.value;
  const double floor = 64.0 * 2.220446049250313e-16 * (left.magnitude + right.magnitude);
  if (std::abs(both - whole) <= std::max(tol_per_length * (b - a), floor)) return both;
  if (depth >= opt.max_depth || !(m > a && b > m))
    throw NumericalError("adaptive quadrature: step underflow on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
  return refine(rule, f, a, m, left.value, tol_per_length, depth + 1, opt) +
         refine(rule, f, m, b, right.value, tol_per_length, depth + 1, opt);
}

} // namespace detail

// Adaptive composite Gauss-Legendre (20 points per panel). A panel is
// accepted once the two-half estimate agrees with the whole-panel estimate to
// the absolute tolerance apportioned by panel length. Panels are visited left
// to right, so the summation order is deterministic.
template <class F>
auto integrate(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
  using T = decltype(f(a));
  const Rule& rule = gauss_legendre_20();
  const double tol_per_length = opt.abs_tol / (b - a);
  const double h = (b - a) / static_cast<double>(opt.initial_panels);
  T s{};
  for (std::size_t p = 0; p < opt.initial_panels; ++p) {
    const double lo = a + p * h;
    const double hi = p + 1 == opt.initial_panels ? b : a + (p + 1) * h;
    s += detail::refine(rule, f, lo, hi, apply_rule(rule, f, lo, hi), tol_per_length, 0, opt);
  }
  return s;
}

} // namespace vplab::quadrature
