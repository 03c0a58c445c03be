#pragma once

// The Landau dispersion function
//
//   D_k(z) = 1 + int_0^inf t F[f_eq](k t) e^{i z t} dt
//
// for Gaussian-class equilibria, and a certified search for its zeros in a
// rectangle of the complex plane (argument principle + Newton).
//
// F[f_eq](k t) is a sum of Gaussians in t, so the integrand extends to an
// entire function of t that decays in the sector |arg t| < pi/4. The integral
// is evaluated along the ray t = s e^{i theta}, with theta chosen per z to
// keep the integrand's peak magnitude small. On the real ray (theta = 0) the
// integrand reaches ~e^{|Im z|^2 / (2|k|^2)} deep in the lower half plane,
// and the cancellation would destroy every digit of D.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vplab/equilibrium.hpp"
#include "vplab/error.hpp"
#include "vplab/phase_space.hpp"
#include "vplab/quadrature.hpp"

namespace vplab {

struct SearchBox {
  double re_min = -8.0, re_max = 8.0, im_min = -8.0, im_max = 8.0;

  void validate() const {
    if (!(re_min < re_max) || !(im_min < im_max))
      throw std::invalid_argument("search box needs re_min < re_max and im_min < im_max");
  }
  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double max_side() const { return std::max(width(), height()); }
  complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  bool contains(complex z, double margin = 0.0) const {
    return z.real() >= re_min - margin && z.real() <= re_max + margin && z.imag() >= im_min - margin &&
           z.imag() <= im_max + margin;
  }
  SearchBox inflated(double d) const { return {re_min - d, re_max + d, im_min - d, im_max + d}; }
};

struct DispersionRoot {
  complex omega;
  int multiplicity = 1;
  double residual = 0.0; // |D_k(omega)|
};

class DispersionFunction {
public:
  DispersionFunction(const EquilibriumSpec& eq, std::vector<double> k)
      : k_(std::move(k)), transform_(directional_fourier(eq, k_)) {
    double s = 0.0;
    for (double kj : k_) s += kj * kj;
    k_abs_ = std::sqrt(s);
  }

  const std::vector<double>& wavevector() const { return k_; }
  double k_abs() const { return k_abs_; }
  const DirectionalFourier& transform() const { return transform_; }

  complex value(complex z) const { return 1.0 + integral(z, 0, choose_angle(z, 0)); }

  // D_k(z) together with int |integrand|, which sets the attainable absolute
  // accuracy of the value (roughly eps times the magnitude).
  struct Evaluation {
    complex value;
    double magnitude;
  };
  Evaluation evaluate(complex z) const {
    double mag = 0.0;
    const complex v = 1.0 + integral(z, 0, choose_angle(z, 0), &mag);
    return {v, std::max(1.0, mag)};
  }
  complex derivative(complex z) const { return integral(z, 1, choose_angle(z, 1)); }
  complex operator()(complex z) const { return value(z); }

  // D_k(z) with the contour pinned to angle theta, |theta| < pi/4.
  complex value_on_ray(complex z, double theta) const { return 1.0 + integral(z, 0, theta); }

  static constexpr double max_angle = std::numbers::pi / 4.0 - 0.2;

private:
  struct RayPlan {
    double peak_log; // log of the integrand's peak magnitude along the ray
    double length;   // truncation point in s
  };

  // Envelope of |s^{1+order} w e^{-alpha s^2 + b s}| on the ray at theta.
  RayPlan plan_ray(complex z, int order, double theta) const {
    const double c2 = std::cos(2.0 * theta);
    const double b = -(z.real() * std::sin(theta) + z.imag() * std::cos(theta));
    const double p = 1.0 + order;
    double peak = -1e300;
    auto log_env = [&](const DirectionalFourier::Component& c, double s) {
      return std::log(std::abs(c.weight)) + p * std::log(s) - c.rate * c2 * s * s + b * s;
    };
    for (const auto& c : transform_.components()) {
      const double alpha = c.rate * c2;
      // Maximizer of p log s - alpha s^2 + b s.
      const double s_star = (b + std::sqrt(b * b + 8.0 * alpha * p)) / (4.0 * alpha);
      peak = std::max(peak, log_env(c, s_star));
    }
    const double cutoff = std::log(1e-18) + std::max(0.0, peak);
    double length = 0.0;
    for (const auto& c : transform_.components()) {
      const double alpha = c.rate * c2;
      double s = std::max(1.0, (b + std::sqrt(b * b + 8.0 * alpha * p)) / (4.0 * alpha));
      while (log_env(c, s) > cutoff) s *= 1.05;
      length = std::max(length, s);
    }
    return {peak, length};
  }

  double choose_angle(complex z, int order) const {
    constexpr int candidates = 41;
    double best_theta = 0.0;
    RayPlan best{1e300, 1e300};
    std::vector<RayPlan> plans(candidates);
    std::vector<double> thetas(candidates);
    double min_peak = 1e300;
    for (int i = 0; i < candidates; ++i) {
      thetas[i] = -max_angle + 2.0 * max_angle * i / (candidates - 1);
      plans[i] = plan_ray(z, order, thetas[i]);
      min_peak = std::min(min_peak, std::max(0.0, plans[i].peak_log));
    }
    for (int i = 0; i < candidates; ++i) {
      if (std::max(0.0, plans[i].peak_log) > min_peak + 0.5) continue;
      if (plans[i].length < best.length) {
        best = plans[i];
        best_theta = thetas[i];
      }
    }
    return best_theta;
  }

  // i^order e^{i(2+order)theta} int_0^T s^{1+order} G(s e^{i theta}) e^{i z s e^{i theta}} ds
  complex integral(complex z, int order, double theta, double* magnitude = nullptr) const {
    const RayPlan plan = plan_ray(z, order, theta);
    if (plan.peak_log > 650.0)
      throw NumericalError("dispersion integrand overflows double precision at z = " + std::to_string(z.real()) +
                           (z.imag() < 0 ? "" : "+") + std::to_string(z.imag()) + "i; shrink the search box");
    const complex ray = std::polar(1.0, theta);
    const complex ray2 = ray * ray;
    const complex izr = complex(0.0, 1.0) * z * ray;
    const auto& comps = transform_.components();
    auto integrand = [&](double s) {
      complex g{0.0, 0.0};
      for (const auto& c : comps) g += c.weight * std::exp(-c.rate * ray2 * (s * s) + izr * s);
      return order == 0 ? s * g : s * s * g;
    };
    quadrature::AdaptiveOptions opt;
    opt.abs_tol = 1e-15 * std::exp(std::max(0.0, plan.peak_log));
    opt.initial_panels = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(plan.length / 4.0)));
    complex result = quadrature::integrate(integrand, 0.0, plan.length, opt);
    if (magnitude) {
      auto abs_integrand = [&](double s) { return std::abs(integrand(s)); };
      *magnitude = quadrature::composite(quadrature::gauss_legendre_20(), abs_integrand, 0.0, plan.length,
                                         opt.initial_panels);
    }
    const complex jacobian = order == 0 ? ray2 : complex(0.0, 1.0) * ray2 * ray;
    return jacobian * result;
  }

  std::vector<double> k_;
  double k_abs_ = 0.0;
  DirectionalFourier transform_;
};

inline complex eval_D(const DispersionFunction& disp, complex z) { return disp.value(z); }
inline complex eval_D_prime(const DispersionFunction& disp, complex z) { return disp.derivative(z); }

namespace detail {

// A zero of f sits on (or numerically at) the contour.
struct ContourZero : NumericalError {
  using NumericalError::NumericalError;
};

// Total change of arg f along the closed polygon, divided by 2 pi. Each edge
// is sampled uniformly, then bisected until consecutive samples differ by
// less than half their modulus (which keeps each phase increment below
// ~0.5 rad, comfortably under pi/2).
template <class F>
double winding(const F& f, std::span<const complex> vertices, double spacing, double zero_floor = 1e-13) {
  const double two_pi = 2.0 * std::numbers::pi;
  double total = 0.0;
  double perimeter = 0.0;
  for (std::size_t e = 0; e < vertices.size(); ++e)
    perimeter += std::abs(vertices[(e + 1) % vertices.size()] - vertices[e]);
  const double min_len = 1e-11 * perimeter;

  // A segment is accepted when its endpoint values differ by less than
  // half their modulus and the midpoint value lies close to their mean, so
  // that a zero hiding just off the segment (which makes f sweep a full turn
  // between similar endpoint values) cannot go unnoticed.
  std::function<void(complex, complex, complex, complex, int)> segment =
      [&](complex a, complex fa, complex b, complex fb, int depth) {
        const double ma = std::abs(fa), mb = std::abs(fb);
        const complex m = 0.5 * (a + b);
        const complex fm = f(m);
        if (std::abs(fm) < zero_floor) throw ContourZero("dispersion function vanishes on the contour");
        const double lo = std::min({ma, mb, std::abs(fm)});
        if (std::abs(fb - fa) <= 0.5 * lo && std::abs(fm - 0.5 * (fa + fb)) <= 0.125 * lo) {
          total += std::arg(fm / fa) + std::arg(fb / fm);
          return;
        }
        if (std::abs(b - a) < min_len || depth > 60)
          throw ContourZero("zero of the dispersion function on the contour near " + std::to_string(a.real()) +
                            (a.imag() < 0 ? "" : "+") + std::to_string(a.imag()) + "i");
        segment(a, fa, m, fm, depth + 1);
        segment(m, fm, b, fb, depth + 1);
      };

  for (std::size_t e = 0; e < vertices.size(); ++e) {
    const complex p = vertices[e];
    const complex q = vertices[(e + 1) % vertices.size()];
    const int n = std::max(8, static_cast<int>(std::ceil(std::abs(q - p) / spacing)));
    complex prev = p;
    complex fprev = f(p);
    if (std::abs(fprev) < zero_floor) throw ContourZero("dispersion function vanishes on the contour");
    for (int i = 1; i <= n; ++i) {
      const complex cur = p + (q - p) * (static_cast<double>(i) / n);
      const complex fcur = f(cur);
      if (std::abs(fcur) < zero_floor) throw ContourZero("dispersion function vanishes on the contour");
      segment(prev, fprev, cur, fcur, 0);
      prev = cur;
      fprev = fcur;
    }
  }
  return total / two_pi;
}

template <class F>
int winding_count(const F& f, std::span<const complex> vertices, double spacing) {
  const double w = winding(f, vertices, spacing);
  const double r = std::round(w);
  if (std::abs(w - r) > 0.1) throw NumericalError("argument principle did not return an integer: " + std::to_string(w));
  return static_cast<int>(r);
}

inline std::vector<complex> rectangle(const SearchBox& b) {
  return {{b.re_min, b.im_min}, {b.re_max, b.im_min}, {b.re_max, b.im_max}, {b.re_min, b.im_max}};
}

inline double sample_spacing(const SearchBox& b) { return std::max(b.max_side() / 32.0, 1e-9); }

} // namespace detail

// Argument-principle count of zeros strictly inside the box (the box is the
// one actually walked: it is inflated by 1e-3 per retry when a zero lies on
// the boundary).
struct ZeroCount {
  int count = 0;
  SearchBox box;
};

inline ZeroCount count_zeros_detailed(const DispersionFunction& disp, SearchBox box, int max_retries = 5) {
  box.validate();
  for (int attempt = 0;; ++attempt) {
    try {
      // Two sampling densities must agree before the count is trusted.
      const auto poly = detail::rectangle(box);
      double spacing = std::min(0.1, detail::sample_spacing(box));
      int coarse = detail::winding_count(disp, poly, spacing);
      for (int pass = 0; pass < 4; ++pass) {
        spacing /= 4.0;
        const int fine = detail::winding_count(disp, poly, spacing);
        if (fine == coarse) return {fine, box};
        coarse = fine;
      }
      throw NumericalError("argument-principle count does not settle under refinement");
    } catch (const detail::ContourZero&) {
      if (attempt >= max_retries) throw;
      box = box.inflated(1e-3);
    }
  }
}

inline int count_zeros(const DispersionFunction& disp, const SearchBox& box) {
  return count_zeros_detailed(disp, box).count;
}

// Zeros inside a disk, on a 64-gon.
inline int count_zeros_in_disk(const DispersionFunction& disp, complex center, double radius) {
  std::vector<complex> poly(64);
  for (int i = 0; i < 64; ++i) poly[i] = center + std::polar(radius, 2.0 * std::numbers::pi * i / 64.0);
  return detail::winding_count(disp, poly, radius / 8.0);
}

struct RootSearchOptions {
  double tol = 1e-12;                    // Newton target for |D(omega)|
  double min_box = 1e-6;                 // stop bisecting below this side
  double dedup = 1e-8;                   // roots closer than this are one root
  double multiplicity_threshold = 1e-6;  // |D'| below this triggers the disk count
  double multiplicity_radius = 1e-4;
  int max_newton = 60;
};

struct UnresolvedBracket {
  SearchBox box;
  int count = 0;
};

struct RootSearchResult {
  std::vector<DispersionRoot> roots; // descending Im omega
  std::vector<UnresolvedBracket> unresolved;
  int total_count = 0;               // argument-principle count over `box`
  SearchBox box;                      // box actually searched
};

namespace detail {

struct NewtonOutcome {
  complex z;
  double residual;
  bool converged;
};

// Newton from z, restricted to `limit`. Converged means |D| <= tol, or, when
// the integrand is so large near z that tol is below the rounding floor,
// the iteration has stagnated with |D| at that floor.
inline NewtonOutcome newton(const DispersionFunction& disp, complex z, const SearchBox& limit,
                            const RootSearchOptions& opt) {
  constexpr double eps = 2.220446049250313e-16;
  auto ev = disp.evaluate(z);
  auto accept = [&](const DispersionFunction::Evaluation& e) {
    return std::abs(e.value) <= std::max(opt.tol, 1e3 * eps * e.magnitude);
  };
  for (int it = 0; it < opt.max_newton; ++it) {
    if (std::abs(ev.value) <= opt.tol) return {z, std::abs(ev.value), true};
    const complex dz = ev.value / disp.derivative(z);
    z -= dz;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !limit.contains(z))
      return {z, std::abs(ev.value), false};
    ev = disp.evaluate(z);
    if (std::abs(dz) <= 1e-14 * std::max(1.0, std::abs(z))) return {z, std::abs(ev.value), accept(ev)};
  }
  return {z, std::abs(ev.value), accept(ev)};
}

inline bool canonical_order(const DispersionRoot& a, const DispersionRoot& b) {
  // Imaginary parts of a +/- pair agree only to rounding; compare on a 1e-9 grid.
  const double ia = std::round(a.omega.imag() * 1e9), ib = std::round(b.omega.imag() * 1e9);
  if (ia != ib) return ia > ib;
  return a.omega.real() < b.omega.real();
}

class RootSearch {
public:
  RootSearch(const DispersionFunction& disp, const RootSearchOptions& opt) : disp_(disp), opt_(opt) {}

  void run(const SearchBox& box, int count) { process(box, count); }

  RootSearchResult take() && { return std::move(result_); }

private:
  void add_root(complex z, double residual, int multiplicity) {
    for (const auto& r : result_.roots)
      if (std::abs(r.omega - z) < opt_.dedup) return;
    result_.roots.push_back({z, multiplicity, residual});
  }

  // Multiplicity of a converged root.
  int multiplicity_at(complex z) const {
    if (std::abs(disp_.derivative(z)) >= opt_.multiplicity_threshold) return 1;
    return std::max(1, count_zeros_in_disk(disp_, z, opt_.multiplicity_radius));
  }

  bool try_resolve(const SearchBox& box, int count) {
    const double margin = 1e-9 * std::max(1.0, std::abs(box.center()));
    const NewtonOutcome n = newton(disp_, box.center(), box.inflated(0.5 * box.max_side()), opt_);
    if (!n.converged || !box.contains(n.z, margin)) return false;
    const int mult = multiplicity_at(n.z);
    if (mult != count) return false;
    add_root(n.z, n.residual, mult);
    return true;
  }

  void process(const SearchBox& box, int count) {
    if (count <= 0) return;
    if (count == 1 && try_resolve(box, 1)) return;
    if (count > 1 && box.max_side() < 1e3 * opt_.min_box && try_resolve(box, count)) return;
    if (box.max_side() < opt_.min_box) {
      result_.unresolved.push_back({box, count});
      return;
    }
    // Split the longer side; shift the cut if a zero sits on it.
    static constexpr double fractions[] = {0.5, 0.5137, 0.4781, 0.5419, 0.4523, 0.5711, 0.4289};
    for (double frac : fractions) {
      SearchBox a = box, b = box;
      if (box.width() >= box.height()) {
        const double cut = box.re_min + frac * box.width();
        a.re_max = cut;
        b.re_min = cut;
      } else {
        const double cut = box.im_min + frac * box.height();
        a.im_max = cut;
        b.im_min = cut;
      }
      int ca = 0, cb = 0;
      try {
        // Count both halves and check them against the parent; a mismatch
        // means a sampling pass missed a nearby zero, so recount finer.
        double spacing = std::min(0.1, sample_spacing(a));
        int parent = count;
        for (int pass = 0; pass < 3; ++pass) {
          ca = winding_count(disp_, rectangle(a), spacing);
          cb = winding_count(disp_, rectangle(b), spacing);
          if (ca >= 0 && cb >= 0 && ca + cb == parent) break;
          spacing /= 8.0;
          parent = winding_count(disp_, rectangle(box), spacing);
        }
        if (ca < 0 || cb < 0 || ca + cb != parent) continue;
      } catch (const ContourZero&) {
        continue;
      }
      process(a, ca);
      process(b, cb);
      return;
    }
    result_.unresolved.push_back({box, count});
  }

  const DispersionFunction& disp_;
  RootSearchOptions opt_;
  RootSearchResult result_;
};

} // namespace detail

// All zeros of D_k inside the box, with multiplicity, sorted by descending
// imaginary part. Boxes that hold zeros but defeat Newton refinement are
// reported in `unresolved`, never dropped.
inline RootSearchResult find_roots(const DispersionFunction& disp, const SearchBox& box,
                                   const RootSearchOptions& opt = {}) {
  const ZeroCount top = count_zeros_detailed(disp, box);
  detail::RootSearch search(disp, opt);
  search.run(top.box, top.count);
  RootSearchResult result = std::move(search).take();
  result.total_count = top.count;
  result.box = top.box;
  std::sort(result.roots.begin(), result.roots.end(), detail::canonical_order);
  return result;
}

} // namespace vplab
