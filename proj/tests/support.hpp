#pragma once

// Seeded generators and brute-force oracles shared by the unit tests and the
// acceptance binary.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "toda/core.hpp"
#include "toda/evolution.hpp"
#include "toda/flow.hpp"
#include "toda/hierarchy.hpp"
#include "toda/jacobi.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Window [n_min, n_min + len) with every site perturbed: a in
/// a0 * [0.6, 1.4], b in b0 + a0 * [-0.8, 0.8].
inline toda::LatticeState random_state(Rng& rng, int n_min, int len,
                                       double a0 = 0.5, double b0 = 0.0) {
  std::vector<double> a(static_cast<std::size_t>(len)), b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = a0 * uniform(rng, 0.6, 1.4);
    b[i] = b0 + a0 * uniform(rng, -0.8, 0.8);
  }
  return toda::LatticeState(n_min, std::move(a), std::move(b), a0, b0);
}

/// Background (1/2, 0) on [-(support/2 + pad), ...] with a random
/// perturbation of amplitude `amp` on `support` central sites.
inline toda::LatticeState random_compact(Rng& rng, int support, int pad,
                                         double amp = 0.2) {
  const int n_min = -(support / 2) - pad;
  const int len = support + 2 * pad;
  std::vector<double> a(static_cast<std::size_t>(len), 0.5), b(a.size(), 0.0);
  for (int i = pad; i < pad + support; ++i) {
    a[static_cast<std::size_t>(i)] = 0.5 * (1.0 + amp * uniform(rng, -1.0, 1.0));
    b[static_cast<std::size_t>(i)] = amp * uniform(rng, -1.0, 1.0);
  }
  return toda::LatticeState(n_min, std::move(a), std::move(b), 0.5, 0.0);
}

/// a(n) = 1/2 + amp e^{-n^2 / w}, b(n) = amp_b e^{-(n - shift)^2 / w} on
/// [-half, half].
inline toda::LatticeState gaussian_state(int half, double amp, double amp_b,
                                         double w = 1.0, double shift = 0.0) {
  const int len = 2 * half + 1;
  std::vector<double> a(static_cast<std::size_t>(len)), b(a.size());
  for (int i = 0; i < len; ++i) {
    const double n = -half + i;
    a[static_cast<std::size_t>(i)] = 0.5 + amp * std::exp(-n * n / w);
    b[static_cast<std::size_t>(i)] = amp_b * std::exp(-(n - shift) * (n - shift) / w);
  }
  return toda::LatticeState(-half, std::move(a), std::move(b), 0.5, 0.0);
}

/// Toda lattice right-hand side written out directly:
/// a_dot = a (b(n+1) - b(n)), b_dot = 2 (a(n)^2 - a(n-1)^2).
inline toda::FieldValues toda_rhs(const toda::LatticeState& s) {
  toda::FieldValues f;
  for (int n = s.n_min(); n <= s.n_max(); ++n) {
    f.a_dot.push_back(s.a(n) * (s.b(n + 1) - s.b(n)));
    f.b_dot.push_back(2.0 * (s.a(n) * s.a(n) - s.a(n - 1) * s.a(n - 1)));
  }
  return f;
}

/// Dense truncation of H on [lo, hi] built entry by entry.
inline Eigen::MatrixXd dense_oracle(const toda::LatticeState& s, int lo, int hi) {
  const int n = hi - lo + 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = s.b(lo + i);
    if (i + 1 < n) H(i, i + 1) = H(i + 1, i) = s.a(lo + i);
  }
  return H;
}

/// R_+(k) by solving the scattering problem on the sites [lo, hi] as one
/// dense complex linear system: outgoing tau k^{-n} on the left, incoming
/// k^{-n} plus reflected R k^{n} on the right.
inline std::complex<double> brute_force_R_plus(const toda::LatticeState& s,
                                               std::complex<double> k, int lo,
                                               int hi) {
  using C = std::complex<double>;
  const int n = hi - lo + 1;
  const C lambda = 0.5 * (k + 1.0 / k);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const int site = lo + i;
    A(i, i) = s.b(site) - lambda;
    if (i > 0) A(i, i - 1) = s.a(site - 1);
    if (i + 1 < n) A(i, i + 1) = s.a(site);
  }
  // psi(lo - 1) = k psi(lo).
  A(0, 0) += s.a(lo - 1) * k;
  // psi(hi + 1) = k psi(hi) + k^{-hi-1} - k^{1-hi}.
  A(n - 1, n - 1) += s.a(hi) * k;
  rhs(n - 1) = -s.a(hi) * (std::pow(k, -hi - 1) - std::pow(k, 1 - hi));
  const Eigen::VectorXcd psi = A.partialPivLu().solve(rhs);
  return (psi(n - 1) - std::pow(k, -hi)) / std::pow(k, hi);
}

/// Relative Lax defect max|dH/dt - [P, H]| / max|[P, H]| over interior
/// entries, with dH/dt from a centered difference along the integrated flow.
inline double lax_defect(const toda::LatticeState& s,
                         const toda::HierarchyCoeffs& coeffs, double h = 1e-4) {
  toda::FlowConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-15;
  cfg.guard_band = coeffs.r() + 2;
  cfg.max_step = 1e-2;
  const auto fwd = toda::integrate(s, coeffs, s.t() + h, cfg).final_state();
  const auto bwd = toda::integrate(s, coeffs, s.t() - h, cfg).final_state();
  const int pad = 2 * coeffs.r() + 4;
  const int lo = s.n_min() - pad, hi = s.n_max() + pad;
  const Eigen::MatrixXd dH = (dense_oracle(fwd, lo, hi) - dense_oracle(bwd, lo, hi)) / (2 * h);
  const Eigen::MatrixXd H = dense_oracle(s, lo, hi);
  const Eigen::MatrixXd P = toda::lax_operator(s, coeffs, lo, hi).P;
  const Eigen::MatrixXd comm = P * H - H * P;
  const int cut = coeffs.r() + 2;
  const int n = hi - lo + 1;
  const auto inner = comm.block(cut, cut, n - 2 * cut, n - 2 * cut);
  const auto diff = (dH - comm).block(cut, cut, n - 2 * cut, n - 2 * cut);
  return diff.cwiseAbs().maxCoeff() / inner.cwiseAbs().maxCoeff();
}

/// Entire functions of exponential type, given by their logarithms:
/// e^{2z}, e^{-z/2}, e^{iz}, (z + 3.3 + 0.7i) e^{(1 + i/2) z} and cosh z.
inline std::vector<toda::LogFunction> indicator_family() {
  using C = std::complex<double>;
  return {
      [](C z) { return 2.0 * z; },
      [](C z) { return -0.5 * z; },
      [](C z) { return C(0.0, 1.0) * z; },
      [](C z) { return C(1.0, 0.5) * z + std::log(z + C(3.3, 0.7)); },
      toda::log_sum([](C z) { return z - std::log(2.0); },
                    [](C z) { return -z - std::log(2.0); }),
  };
}

}  // namespace testing
