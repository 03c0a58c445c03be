#pragma once

// Tensor grids on T^d x [-vmax, vmax]^d, distribution fields, and the
// spectral helpers shared by the dispersion, simulator and fitting modules.
//
// Storage is row-major over extents (x_1..x_d, v_1..v_d): velocity indices
// vary fastest, so the velocity block at one spatial point is contiguous.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vplab {

using complex = std::complex<double>;

struct TorusSpec {
  std::vector<double> lengths;

  std::size_t dims() const { return lengths.size(); }

  void validate() const {
    if (lengths.empty() || lengths.size() > 2)
      throw std::invalid_argument("torus must have 1 or 2 dimensions");
    for (double l : lengths)
      if (!(l > 0.0) || !std::isfinite(l))
        throw std::invalid_argument("torus lengths must be positive");
  }
};

// Integer multi-index m on the dual lattice; k_j = 2*pi*m_j / L_j.
class SpatialMode {
public:
  SpatialMode() = default;
  explicit SpatialMode(std::vector<int> index) : index_(std::move(index)) {}
  SpatialMode(std::initializer_list<int> index) : index_(index) {}

  std::size_t dims() const { return index_.size(); }
  int operator[](std::size_t j) const { return index_[j]; }
  const std::vector<int>& index() const { return index_; }

  bool is_zero() const {
    return std::all_of(index_.begin(), index_.end(), [](int m) { return m == 0; });
  }

  std::vector<double> wavevector(const TorusSpec& torus) const {
    if (torus.dims() != dims())
      throw std::invalid_argument("mode and torus dimensions differ");
    std::vector<double> k(dims());
    for (std::size_t j = 0; j < dims(); ++j)
      k[j] = 2.0 * std::numbers::pi * index_[j] / torus.lengths[j];
    return k;
  }

  double wavenumber(const TorusSpec& torus) const {
    double s = 0.0;
    for (double kj : wavevector(torus)) s += kj * kj;
    return std::sqrt(s);
  }

  SpatialMode operator-() const {
    std::vector<int> m(index_);
    for (int& v : m) v = -v;
    return SpatialMode(std::move(m));
  }

  friend SpatialMode operator+(const SpatialMode& a, const SpatialMode& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("mode dimensions differ");
    std::vector<int> m(a.dims());
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = a[j] + b[j];
    return SpatialMode(std::move(m));
  }

  friend bool operator==(const SpatialMode&, const SpatialMode&) = default;
  friend auto operator<=>(const SpatialMode&, const SpatialMode&) = default;

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t j = 0; j < dims(); ++j) os << (j ? "," : "") << index_[j];
    os << ')';
    return os.str();
  }

private:
  std::vector<int> index_;
};

// k . k' with physical wavevectors.
inline double physical_dot(const SpatialMode& a, const SpatialMode& b, const TorusSpec& torus) {
  const auto ka = a.wavevector(torus);
  const auto kb = b.wavevector(torus);
  double s = 0.0;
  for (std::size_t j = 0; j < ka.size(); ++j) s += ka[j] * kb[j];
  return s;
}

struct GridSpec {
  std::vector<int> nx;      // cells per spatial dimension
  std::vector<int> nv;      // cells per velocity dimension
  std::vector<double> vmax; // velocity box half-width per dimension
  double dt = 0.1;

  std::size_t dims() const { return nx.size(); }

  void validate() const {
    if (nx.empty() || nx.size() > 2 || nv.size() != nx.size() || vmax.size() != nx.size())
      throw std::invalid_argument("grid needs matching nx, nv, vmax of dimension 1 or 2");
    auto cells_ok = [](int n) { return n >= 4 && n % 2 == 0; };
    for (int n : nx)
      if (!cells_ok(n)) throw std::invalid_argument("nx must be even and >= 4");
    for (int n : nv)
      if (!cells_ok(n)) throw std::invalid_argument("nv must be even and >= 4");
    for (double v : vmax)
      if (!(v > 0.0)) throw std::invalid_argument("vmax must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  }
};

// Coordinates and cell sizes of a validated torus/grid pair. Both x and v are
// cell-left: x_i = i*L/N, v_j = -vmax + j*2*vmax/N.
class PhaseGrid {
public:
  PhaseGrid() = default;

  PhaseGrid(TorusSpec torus, GridSpec spec) : torus_(std::move(torus)), spec_(std::move(spec)) {
    torus_.validate();
    spec_.validate();
    if (torus_.dims() != spec_.dims())
      throw std::invalid_argument("torus and grid dimensions differ");
    const std::size_t d = dims();
    x_.resize(d);
    v_.resize(d);
    dx_.resize(d);
    dv_.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      dx_[j] = torus_.lengths[j] / spec_.nx[j];
      dv_[j] = 2.0 * spec_.vmax[j] / spec_.nv[j];
      x_[j].resize(spec_.nx[j]);
      v_[j].resize(spec_.nv[j]);
      for (int i = 0; i < spec_.nx[j]; ++i) x_[j][i] = i * dx_[j];
      for (int i = 0; i < spec_.nv[j]; ++i) v_[j][i] = -spec_.vmax[j] + i * dv_[j];
    }
  }

  std::size_t dims() const { return spec_.dims(); }
  const TorusSpec& torus() const { return torus_; }
  const GridSpec& spec() const { return spec_; }

  std::size_t nx(std::size_t j) const { return static_cast<std::size_t>(spec_.nx[j]); }
  std::size_t nv(std::size_t j) const { return static_cast<std::size_t>(spec_.nv[j]); }
  double dx(std::size_t j) const { return dx_[j]; }
  double dv(std::size_t j) const { return dv_[j]; }
  const std::vector<double>& x(std::size_t j) const { return x_[j]; }
  const std::vector<double>& v(std::size_t j) const { return v_[j]; }

  std::size_t nx_total() const {
    std::size_t n = 1;
    for (int m : spec_.nx) n *= static_cast<std::size_t>(m);
    return n;
  }
  std::size_t nv_total() const {
    std::size_t n = 1;
    for (int m : spec_.nv) n *= static_cast<std::size_t>(m);
    return n;
  }
  std::size_t size() const { return nx_total() * nv_total(); }

  double cell_volume_x() const {
    double c = 1.0;
    for (double h : dx_) c *= h;
    return c;
  }
  double cell_volume_v() const {
    double c = 1.0;
    for (double h : dv_) c *= h;
    return c;
  }
  double torus_volume() const {
    double c = 1.0;
    for (double l : torus_.lengths) c *= l;
    return c;
  }

  // Extents in storage order (x_1..x_d, v_1..v_d).
  std::vector<std::size_t> extents() const {
    std::vector<std::size_t> e;
    for (int n : spec_.nx) e.push_back(static_cast<std::size_t>(n));
    for (int n : spec_.nv) e.push_back(static_cast<std::size_t>(n));
    return e;
  }

  // Velocity coordinates of a flat velocity-block index.
  void velocity_at(std::size_t flat_v, std::span<double> out) const {
    for (std::size_t j = dims(); j-- > 0;) {
      out[j] = v_[j][flat_v % nv(j)];
      flat_v /= nv(j);
    }
  }
  void position_at(std::size_t flat_x, std::span<double> out) const {
    for (std::size_t j = dims(); j-- > 0;) {
      out[j] = x_[j][flat_x % nx(j)];
      flat_x /= nx(j);
    }
  }

  bool representable(const SpatialMode& m) const {
    if (m.dims() != dims()) return false;
    for (std::size_t j = 0; j < dims(); ++j)
      if (2 * std::abs(m[j]) >= spec_.nx[j]) return false;
    return true;
  }

private:
  TorusSpec torus_;
  GridSpec spec_;
  std::vector<std::vector<double>> x_, v_;
  std::vector<double> dx_, dv_;
};

inline PhaseGrid make_grid(const TorusSpec& torus, const GridSpec& grid) {
  return PhaseGrid(torus, grid);
}

class PhaseSpaceField {
public:
  PhaseSpaceField() = default;
  explicit PhaseSpaceField(PhaseGrid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}
  PhaseSpaceField(PhaseGrid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("field extents do not match grid");
  }

  const PhaseGrid& grid() const { return grid_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& at(std::size_t flat_x, std::size_t flat_v) {
    return values_[flat_x * grid_.nv_total() + flat_v];
  }
  double at(std::size_t flat_x, std::size_t flat_v) const {
    return values_[flat_x * grid_.nv_total() + flat_v];
  }

  // Compensated (Neumaier) sum: plain summation over millions of cells
  // leaves ~1e-13 relative noise, which would swamp the drift being measured.
  double mass() const {
    double s = 0.0, c = 0.0;
    for (double f : values_) {
      const double t = s + f;
      c += std::abs(s) >= std::abs(f) ? (s - t) + f : (f - t) + s;
      s = t;
    }
    return (s + c) * grid_.cell_volume_x() * grid_.cell_volume_v();
  }

  double l2_norm() const {
    double s = 0.0;
    for (double f : values_) s += f * f;
    return std::sqrt(s * grid_.cell_volume_x() * grid_.cell_volume_v());
  }

private:
  PhaseGrid grid_;
  std::vector<double> values_;
};

// rho(x) = sum_j f(x, v_j) * dv over the truncated velocity box.
inline std::vector<double> density(const PhaseSpaceField& field) {
  const auto& g = field.grid();
  const std::size_t nvt = g.nv_total();
  const double dv = g.cell_volume_v();
  std::vector<double> rho(g.nx_total());
  auto f = field.values();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double s = 0.0;
    const double* line = f.data() + i * nvt;
    for (std::size_t j = 0; j < nvt; ++j) s += line[j];
    rho[i] = s * dv;
  }
  return rho;
}

// Normalized DFT coefficient (1/N) sum_i u(x_i) exp(-i k.x_i) of a field on
// the spatial grid.
inline complex mode_extract(const PhaseGrid& grid, std::span<const double> u, const SpatialMode& mode) {
  if (u.size() != grid.nx_total()) throw std::invalid_argument("field extents do not match grid");
  if (!grid.representable(mode))
    throw std::invalid_argument("mode " + mode.to_string() + " is outside the grid band");
  const std::size_t d = grid.dims();
  // Per-dimension twiddle tables indexed by (m_j * i_j) mod N_j.
  std::vector<std::vector<complex>> twiddle(d);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t n = grid.nx(j);
    twiddle[j].resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
      twiddle[j][r] = {std::cos(a), std::sin(a)};
    }
  }
  auto residue = [](long long a, long long n) { return static_cast<std::size_t>(((a % n) + n) % n); };
  complex sum{0.0, 0.0};
  if (d == 1) {
    const long long n = static_cast<long long>(grid.nx(0));
    for (std::size_t i = 0; i < u.size(); ++i)
      sum += u[i] * twiddle[0][residue(mode[0] * static_cast<long long>(i), n)];
  } else {
    const long long n0 = static_cast<long long>(grid.nx(0));
    const long long n1 = static_cast<long long>(grid.nx(1));
    for (long long i0 = 0; i0 < n0; ++i0) {
      const complex w0 = twiddle[0][residue(mode[0] * i0, n0)];
      complex row{0.0, 0.0};
      for (long long i1 = 0; i1 < n1; ++i1)
        row += u[static_cast<std::size_t>(i0 * n1 + i1)] * twiddle[1][residue(mode[1] * i1, n1)];
      sum += w0 * row;
    }
  }
  return sum / static_cast<double>(u.size());
}

// Complex time series of one Fourier mode, sampled at uniformly spaced times.
class ModeSeries {
public:
  ModeSeries() = default;
  explicit ModeSeries(SpatialMode mode) : mode_(std::move(mode)) {}

  const SpatialMode& mode() const { return mode_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<complex>& values() const { return values_; }
  std::size_t size() const { return times_.size(); }

  void push_back(double t, complex value) {
    if (!times_.empty() && !(t > times_.back()))
      throw std::invalid_argument("mode series times must be strictly increasing");
    times_.push_back(t);
    values_.push_back(value);
  }

  bool uniformly_spaced(double rel_tol = 1e-9) const {
    if (times_.size() < 3) return true;
    const double h = (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (std::abs((times_[i] - times_[i - 1]) - h) > rel_tol * std::max(1.0, std::abs(times_.back())))
        return false;
    return true;
  }

private:
  SpatialMode mode_;
  std::vector<double> times_;
  std::vector<complex> values_;
};

} // namespace vplab
