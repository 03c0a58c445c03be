#pragma once

// Centered Lagrange interpolation along lines of a tensor array. A shift by
// delta moves content forward: u_new(x) = u(x - delta).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace vplab {

struct InterpolatorSpec {
  int degree = 17;

  void validate() const {
    if (degree < 1 || degree % 2 == 0) throw std::invalid_argument("interpolation degree must be odd and positive");
  }
  int width() const { return degree + 1; }
  // Stencil offsets run from first_offset() to first_offset() + degree.
  int first_offset() const { return -(degree - 1) / 2; }
};

enum class Boundary { Periodic, Zero };

// Lagrange basis on the nodes first_offset()..first_offset()+degree,
// evaluated at beta in [0, 1).
class LagrangeStencil {
public:
  explicit LagrangeStencil(InterpolatorSpec spec) : spec_(spec) {
    spec_.validate();
    const int n = spec_.width();
    inv_den_.resize(n);
    for (int j = 0; j < n; ++j) {
      double den = 1.0;
      for (int l = 0; l < n; ++l)
        if (l != j) den *= static_cast<double>(j - l);
      inv_den_[j] = 1.0 / den;
    }
    prefix_.resize(n + 1);
    suffix_.resize(n + 1);
  }

  const InterpolatorSpec& spec() const { return spec_; }
  int width() const { return spec_.width(); }

  // w[j] multiplies the value at node first_offset() + j.
  void weights(double beta, std::span<double> w) {
    const int n = spec_.width();
    if (beta == last_beta_ && w.data() == last_out_) return;
    last_beta_ = beta;
    last_out_ = w.data();
    const int o = spec_.first_offset();
    prefix_[0] = 1.0;
    for (int l = 0; l < n; ++l) prefix_[l + 1] = prefix_[l] * (beta - static_cast<double>(o + l));
    suffix_[n] = 1.0;
    for (int l = n; l-- > 0;) suffix_[l] = suffix_[l + 1] * (beta - static_cast<double>(o + l));
    for (int j = 0; j < n; ++j) w[j] = prefix_[j] * suffix_[j + 1] * inv_den_[j];
    // Absorb the rounding of sum(w) into the largest weight so that every
    // sweep preserves line sums without a systematic bias.
    int jmax = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(w[j]) > std::abs(w[jmax])) jmax = j;
    double rest = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != jmax) rest += w[j];
    w[jmax] = 1.0 - rest;
  }

private:
  InterpolatorSpec spec_;
  std::vector<double> inv_den_, prefix_, suffix_;
  double last_beta_ = -1.0;
  const double* last_out_ = nullptr;
};

inline std::vector<double> lagrange_weights(const InterpolatorSpec& spec, double beta) {
  LagrangeStencil s(spec);
  std::vector<double> w(spec.width());
  s.weights(beta, w);
  return w;
}

namespace detail {

// Split a shift of `cells` grid cells into the foot offset: the value at i
// comes from position i - cells = i + base + beta.
struct Foot {
  long long base;
  double beta;
};

inline Foot foot_of(double cells) {
  const double p = -cells;
  const double b = std::floor(p);
  double beta = p - b;
  long long base = static_cast<long long>(b);
  if (beta >= 1.0) { // p just below an integer
    beta = 0.0;
    ++base;
  }
  return {base, beta};
}

inline std::size_t wrap(long long i, long long n) { return static_cast<std::size_t>(((i % n) + n) % n); }

} // namespace detail

// Shift one contiguous line by `cells` grid cells into `out`. `pad` is
// scratch of at least n + width entries.
inline void shift_line(std::span<const double> in, std::span<double> out, double cells, LagrangeStencil& stencil,
                       Boundary boundary, std::span<double> w, std::span<double> pad) {
  const long long n = static_cast<long long>(in.size());
  const detail::Foot foot = detail::foot_of(cells);
  if (foot.beta == 0.0) {
    for (long long i = 0; i < n; ++i) {
      const long long src = i + foot.base;
      if (boundary == Boundary::Periodic) out[i] = in[detail::wrap(src, n)];
      else out[i] = (src >= 0 && src < n) ? in[src] : 0.0;
    }
    return;
  }
  stencil.weights(foot.beta, w);
  const int width = stencil.width();
  const long long start = foot.base + stencil.spec().first_offset();
  // pad[m] = u[start + m] for m in [0, n + width - 1)
  const long long len = n + width - 1;
  if (boundary == Boundary::Periodic) {
    std::size_t src = detail::wrap(start, n);
    for (long long m = 0; m < len; ++m) {
      pad[m] = in[src];
      if (++src == static_cast<std::size_t>(n)) src = 0;
    }
  } else {
    for (long long m = 0; m < len; ++m) {
      const long long src = start + m;
      pad[m] = (src >= 0 && src < n) ? in[src] : 0.0;
    }
  }
  double* o = out.data();
  const double* p = pad.data();
  for (long long i = 0; i < n; ++i) o[i] = w[0] * p[i];
  for (int j = 1; j < width; ++j) {
    const double wj = w[j];
    const double* pj = p + j;
    for (long long i = 0; i < n; ++i) o[i] += wj * pj[i];
  }
}

// Convenience form on a periodic line of spacing dx, displacement in
// physical units.
inline std::vector<double> interpolate_periodic_1d(std::span<const double> values, double delta, double dx,
                                                   const InterpolatorSpec& spec = {}) {
  LagrangeStencil stencil(spec);
  std::vector<double> out(values.size()), w(spec.width()), pad(values.size() + spec.width());
  shift_line(values, out, delta / dx, stencil, Boundary::Periodic, w, pad);
  return out;
}

// Shift every line of `data` along `axis`. `extents` is in storage order
// (row-major). `cells(outer, inner)` gives the shift in cells for the line
// whose coordinates before the axis flatten to `outer` and after it to
// `inner`.
template <class CellsFn>
void sweep_axis(std::span<double> data, std::span<const std::size_t> extents, std::size_t axis, CellsFn&& cells,
                const InterpolatorSpec& spec, Boundary boundary) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= extents[a];
  for (std::size_t a = axis + 1; a < extents.size(); ++a) inner *= extents[a];
  const std::size_t n = extents[axis];
  const std::size_t stride = inner;
  // Strided lines are moved through a small contiguous tile of `block`
  // neighbouring lines, so that reads and writes of the big array stay
  // sequential.
  const std::size_t block = std::min<std::size_t>(inner, 16);
  const std::size_t blocks_per_outer = (inner + block - 1) / block;
  const long long tasks = static_cast<long long>(outer * blocks_per_outer);

#pragma omp parallel
  {
    LagrangeStencil stencil(spec);
    std::vector<double> tile(n * block), line(n), shifted(n), w(spec.width()), pad(n + spec.width());
#pragma omp for schedule(static)
    for (long long task = 0; task < tasks; ++task) {
      const std::size_t o = static_cast<std::size_t>(task) / blocks_per_outer;
      const std::size_t r0 = (static_cast<std::size_t>(task) % blocks_per_outer) * block;
      const std::size_t nb = std::min(block, inner - r0);
      double* base = data.data() + o * n * stride + r0;
      if (nb == 1) {
        for (std::size_t i = 0; i < n; ++i) line[i] = base[i * stride];
        shift_line(line, shifted, cells(o, r0), stencil, boundary, w, pad);
        for (std::size_t i = 0; i < n; ++i) base[i * stride] = shifted[i];
        continue;
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t b = 0; b < nb; ++b) tile[b * n + i] = base[i * stride + b];
      for (std::size_t b = 0; b < nb; ++b) {
        std::span<double> col(tile.data() + b * n, n);
        shift_line(col, shifted, cells(o, r0 + b), stencil, boundary, w, pad);
        std::copy(shifted.begin(), shifted.end(), col.begin());
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t b = 0; b < nb; ++b) base[i * stride + b] = tile[b * n + i];
    }
  }
}

} // namespace vplab
