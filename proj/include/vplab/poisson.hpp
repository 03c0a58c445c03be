#pragma once

// Periodic Poisson solve  Delta phi = n - rho  with FFTW, zero-mean gauge,
// and E = -grad phi.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "vplab/phase_space.hpp"

namespace vplab {

namespace detail {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* ptr;
};

struct FftwRealBuffer {
  explicit FftwRealBuffer(std::size_t n) : ptr(fftw_alloc_real(n)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwRealBuffer() { fftw_free(ptr); }
  FftwRealBuffer(const FftwRealBuffer&) = delete;
  FftwRealBuffer& operator=(const FftwRealBuffer&) = delete;
  double* ptr;
};

struct FftwPlan {
  FftwPlan() = default;
  explicit FftwPlan(fftw_plan p) : plan(p) {
    if (!plan) throw std::runtime_error("FFTW planner failed");
  }
  ~FftwPlan() {
    if (plan) fftw_destroy_plan(plan);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  void execute() const { fftw_execute(plan); }
  fftw_plan plan = nullptr;
};

} // namespace detail

struct PoissonResult {
  std::vector<double> phi;                 // over the x-grid
  std::vector<std::vector<double>> E;      // one component per dimension
};

class PoissonSolver {
public:
  explicit PoissonSolver(const PhaseGrid& grid)
      : torus_(grid.torus()), n_(grid.dims()), real_(grid.nx_total()), spec_size_(1),
        rbuf_(grid.nx_total()) {
    for (std::size_t j = 0; j < n_.size(); ++j) n_[j] = static_cast<int>(grid.nx(j));
    for (std::size_t j = 0; j + 1 < n_.size(); ++j) spec_size_ *= static_cast<std::size_t>(n_[j]);
    spec_size_ *= static_cast<std::size_t>(n_.back() / 2 + 1);
    cbuf_ = std::make_unique<detail::FftwBuffer>(spec_size_);
    hat_.resize(spec_size_);
    const int rank = static_cast<int>(n_.size());
    forward_ = std::make_unique<detail::FftwPlan>(
        fftw_plan_dft_r2c(rank, n_.data(), rbuf_.ptr, cbuf_->ptr, FFTW_ESTIMATE));
    backward_ = std::make_unique<detail::FftwPlan>(
        fftw_plan_dft_c2r(rank, n_.data(), cbuf_->ptr, rbuf_.ptr, FFTW_ESTIMATE));

    // Physical wavenumbers per half-spectrum entry.
    kvec_.assign(n_.size(), std::vector<double>(spec_size_));
    nyquist_.assign(spec_size_, false);
    for (std::size_t s = 0; s < spec_size_; ++s) {
      std::size_t rem = s;
      for (std::size_t j = n_.size(); j-- > 0;) {
        const int nj = j + 1 == n_.size() ? n_[j] / 2 + 1 : n_[j];
        const int idx = static_cast<int>(rem % static_cast<std::size_t>(nj));
        rem /= static_cast<std::size_t>(nj);
        const int m = idx <= n_[j] / 2 ? idx : idx - n_[j];
        kvec_[j][s] = 2.0 * std::numbers::pi * m / torus_.lengths[j];
        if (2 * idx == n_[j]) nyquist_[s] = true;
      }
    }
  }

  std::size_t size() const { return real_; }

  PoissonResult solve(std::span<const double> rho) {
    PoissonResult r;
    solve(rho, r);
    return r;
  }

  void solve(std::span<const double> rho, PoissonResult& out) {
    if (rho.size() != real_) throw std::invalid_argument("density size does not match the grid");
    forward(rho);
    const double inv_n = 1.0 / static_cast<double>(real_);
    for (std::size_t s = 0; s < spec_size_; ++s) {
      double k2 = 0.0;
      for (const auto& kj : kvec_) k2 += kj[s] * kj[s];
      hat_[s] = k2 > 0.0 ? hat_[s] * (inv_n / k2) : complex(0.0, 0.0);
    }
    out.phi.resize(real_);
    backward(hat_, out.phi);
    out.E.resize(n_.size());
    std::vector<complex> e(spec_size_);
    for (std::size_t j = 0; j < n_.size(); ++j) {
      for (std::size_t s = 0; s < spec_size_; ++s)
        e[s] = nyquist_[s] ? complex(0.0, 0.0) : complex(0.0, -kvec_[j][s]) * hat_[s];
      out.E[j].resize(real_);
      backward(e, out.E[j]);
    }
  }

  // ||Delta phi - (mean(rho) - rho)|| / ||rho - mean(rho)||, evaluated
  // spectrally.
  double residual(std::span<const double> rho, std::span<const double> phi) {
    forward(rho);
    std::vector<complex> rh(hat_);
    forward(phi);
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < spec_size_; ++s) {
      double k2 = 0.0;
      for (const auto& kj : kvec_) k2 += kj[s] * kj[s];
      if (k2 == 0.0) continue;
      const complex lap = -k2 * hat_[s];
      const complex rhs = -rh[s];
      num += std::norm(lap - rhs);
      den += std::norm(rhs);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  }

private:
  void forward(std::span<const double> u) {
    for (std::size_t i = 0; i < real_; ++i) rbuf_.ptr[i] = u[i];
    forward_->execute();
    for (std::size_t s = 0; s < spec_size_; ++s) hat_[s] = {cbuf_->ptr[s][0], cbuf_->ptr[s][1]};
  }

  void backward(const std::vector<complex>& h, std::span<double> out) {
    for (std::size_t s = 0; s < spec_size_; ++s) {
      cbuf_->ptr[s][0] = h[s].real();
      cbuf_->ptr[s][1] = h[s].imag();
    }
    backward_->execute();
    for (std::size_t i = 0; i < real_; ++i) out[i] = rbuf_.ptr[i];
  }

  TorusSpec torus_;
  std::vector<int> n_;
  std::size_t real_;
  std::size_t spec_size_;
  detail::FftwRealBuffer rbuf_;
  std::unique_ptr<detail::FftwBuffer> cbuf_;
  std::unique_ptr<detail::FftwPlan> forward_, backward_;
  std::vector<complex> hat_;
  std::vector<std::vector<double>> kvec_;
  std::vector<bool> nyquist_;
};

inline PoissonResult poisson_solve(std::span<const double> rho, const PhaseGrid& grid) {
  PoissonSolver solver(grid);
  return solver.solve(rho);
}

} // namespace vplab
