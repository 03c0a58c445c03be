#pragma once

// Weighted linear least squares for
//   data(t) ~ Re( sum_j sum_{p <= deg_j} z_{j,p} t^p e^{-i omega_j t} )
// with row weights e^{lambda t}. Each complex unknown z = a + ib gives the
// column pair [Re(t^p e^{-i omega t}), -Im(t^p e^{-i omega t})].

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vplab/error.hpp"
#include "vplab/phase_space.hpp"

namespace vplab {

struct BasisTerm {
  complex omega;
  int degree = 0;
};

using FitBasis = std::vector<BasisTerm>;

inline std::size_t unknowns(const FitBasis& basis) {
  std::size_t n = 0;
  for (const auto& b : basis) n += static_cast<std::size_t>(b.degree) + 1;
  return n;
}

inline void validate_basis(const FitBasis& basis) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].degree < 0) throw std::invalid_argument("basis degree must be nonnegative");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(basis[i].omega - basis[j].omega) <= 1e-10)
        throw std::invalid_argument("basis frequency listed twice (terms " + std::to_string(j) + " and " +
                                    std::to_string(i) + "); raise the degree instead");
  }
}

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;
  double lambda = 0.0;

  void validate() const {
    if (!(t_min < t_max)) throw std::invalid_argument("fit window needs t_min < t_max");
    if (!std::isfinite(lambda)) throw std::invalid_argument("fit weight exponent must be finite");
  }
  bool contains(double t) const { return t >= t_min && t <= t_max; }
};

enum class SolveMethod { Orthogonal, NormalEquations };

struct FitResult {
  FitBasis basis;
  FitWindow window;
  std::vector<complex> coefficients; // term by term, p = 0..degree
  double residual = 0.0;             // weighted RMS on the window
  double condition = 0.0;            // 2-norm condition number of the design matrix
  std::size_t samples = 0;
};

// Complex model sum z t^p e^{-i omega t}; the fitted signal is its real part.
inline complex evaluate_model(const FitBasis& basis, std::span<const complex> coeffs, double t) {
  complex s{0.0, 0.0};
  std::size_t c = 0;
  for (const auto& b : basis) {
    const complex e = std::exp(complex(0.0, -1.0) * b.omega * t);
    double tp = 1.0;
    for (int p = 0; p <= b.degree; ++p, ++c) {
      s += coeffs[c] * tp * e;
      tp *= t;
    }
  }
  return s;
}

inline Eigen::MatrixXd design_matrix(const FitBasis& basis, std::span<const double> times, double lambda) {
  const std::size_t m = unknowns(basis);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(2 * m));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double w = std::exp(lambda * t);
    std::size_t c = 0;
    for (const auto& b : basis) {
      const complex e = std::exp(complex(0.0, -1.0) * b.omega * t);
      double tp = 1.0;
      for (int p = 0; p <= b.degree; ++p, ++c) {
        const complex v = tp * e;
        A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * c)) = w * v.real();
        A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * c + 1)) = -w * v.imag();
        tp *= t;
      }
    }
  }
  return A;
}

inline double condition_number(const Eigen::MatrixXd& M) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < M.cols(); ++c)
    if (M.col(c).cwiseAbs().maxCoeff() > 0.0) keep.push_back(c);
  Eigen::MatrixXd A(M.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) A.col(static_cast<Eigen::Index>(c)) = M.col(keep[c]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

// Columns that are identically zero (the imaginary part of a zero
// frequency) carry no information; their unknowns are set to 0, the
// minimum-norm choice.
inline Eigen::VectorXd solve_lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                 SolveMethod method = SolveMethod::Orthogonal) {
  if (A.rows() < A.cols())
    throw std::invalid_argument("under-determined fit: " + std::to_string(A.rows()) + " samples for " +
                                std::to_string(A.cols()) + " real unknowns");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < A.cols(); ++c)
    if (A.col(c).cwiseAbs().maxCoeff() > 0.0) keep.push_back(c);
  Eigen::MatrixXd R(A.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) R.col(static_cast<Eigen::Index>(c)) = A.col(keep[c]);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(R);
  qr.setThreshold(1e-13);
  if (qr.rank() < R.cols()) {
    const Eigen::Index col = keep[static_cast<std::size_t>(qr.colsPermutation().indices()(qr.rank()))];
    throw NumericalError("rank-deficient design matrix: column pair " + std::to_string(col / 2) +
                         " is (numerically) a combination of the others");
  }
  Eigen::VectorXd y;
  if (method == SolveMethod::Orthogonal) y = qr.solve(b);
  else y = (R.transpose() * R).ldlt().solve(R.transpose() * b);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
  for (std::size_t c = 0; c < keep.size(); ++c) x(keep[c]) = y(static_cast<Eigen::Index>(c));
  return x;
}

// Samples of a scalar real signal.
struct Signal {
  std::vector<double> t;
  std::vector<double> y;
};

// Real signal from a complex mode series: Re(scale * phase * value), where
// `phase` selects which quadrature is fitted (1 for the real part, -i for the
// imaginary part).
inline Signal real_signal(const ModeSeries& s, double scale = 1.0, complex phase = 1.0) {
  Signal out;
  out.t = s.times();
  out.y.reserve(s.size());
  for (const auto& v : s.values()) out.y.push_back((scale * phase * v).real());
  return out;
}

inline FitResult fit_joint(const Signal& sig, const FitBasis& basis, const FitWindow& window,
                           SolveMethod method = SolveMethod::Orthogonal) {
  validate_basis(basis);
  window.validate();
  if (sig.t.size() != sig.y.size()) throw std::invalid_argument("signal times and values differ in length");
  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t i = 0; i < sig.t.size(); ++i)
    if (window.contains(sig.t[i])) {
      t.push_back(sig.t[i]);
      y.push_back(sig.y[i]);
    }
  const std::size_t m = unknowns(basis);
  if (t.size() < 4 * m)
    throw std::invalid_argument("fit window holds " + std::to_string(t.size()) + " samples; need at least " +
                                std::to_string(4 * m) + " (twice the real unknowns)");

  FitResult r;
  r.basis = basis;
  r.window = window;
  r.samples = t.size();
  if (m == 0) {
    double ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double w = std::exp(window.lambda * t[i]) * y[i];
      ss += w * w;
    }
    r.residual = std::sqrt(ss / static_cast<double>(t.size()));
    return r;
  }

  const Eigen::MatrixXd A = design_matrix(basis, t, window.lambda);
  Eigen::VectorXd b(static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) b(static_cast<Eigen::Index>(i)) = std::exp(window.lambda * t[i]) * y[i];
  const Eigen::VectorXd x = solve_lsq(A, b, method);
  r.coefficients.resize(m);
  for (std::size_t c = 0; c < m; ++c)
    r.coefficients[c] = {x(static_cast<Eigen::Index>(2 * c)), x(static_cast<Eigen::Index>(2 * c + 1))};
  r.condition = condition_number(A);

  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = std::exp(window.lambda * t[i]) * (evaluate_model(basis, r.coefficients, t[i]).real() - y[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / static_cast<double>(t.size()));
  return r;
}

struct FitStage {
  FitBasis basis;
  FitWindow window;
};

// Each stage fits what the previous stages left; every stage's model is
// subtracted from the whole series before the next stage.
inline std::vector<FitResult> fit_sequential(const Signal& sig, const std::vector<FitStage>& stages,
                                             SolveMethod method = SolveMethod::Orthogonal) {
  if (stages.empty()) throw std::invalid_argument("sequential fit needs at least one stage");
  Signal rest = sig;
  std::vector<FitResult> out;
  for (const auto& st : stages) {
    FitResult r = fit_joint(rest, st.basis, st.window, method);
    for (std::size_t i = 0; i < rest.t.size(); ++i)
      rest.y[i] -= evaluate_model(r.basis, r.coefficients, rest.t[i]).real();
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace vplab
