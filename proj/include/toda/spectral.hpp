#pragma once

#include <complex>
#include <vector>

#include "toda/core.hpp"
#include "toda/jacobi.hpp"

namespace toda {

using cplx = std::complex<double>;

/// Eigenvalue of H outside [-1, 1] together with its norming constants.
/// k lies in (-1, 1) \ {0}, lambda = (k + 1/k) / 2.
struct BoundState {
  double k = 0.0;
  double lambda = 0.0;
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
};

/// Reflection coefficients on unit-circle samples plus the discrete
/// spectrum, for a state with normalized background (1/2, 0).
struct ScatteringData {
  double t = 0.0;
  std::vector<cplx> k_grid;
  std::vector<cplx> R_plus;
  std::vector<cplx> R_minus;
  std::vector<BoundState> bound_states;
};

/// Scattering quantities at one unit-circle point.
struct ScatteringPoint {
  cplx R_plus;
  cplx R_minus;
  cplx T;
};

enum class Side { left, right };

inline constexpr double kBandEdgeExclusion = 1e-3;
inline constexpr double kSpectralMargin = 1e-8;
inline constexpr int kDefaultTruncationMargin = 50;

/// Jacobi operator of a state whose background is (1/2, 0).
/// Throws UnnormalizedBackground otherwise.
JacobiOperator build_jacobi(const LatticeState& state);

/// 256 (by default) equispaced points on the upper unit semicircle,
/// keeping an angular distance kBandEdgeExclusion from k = +-1.
std::vector<cplx> default_k_grid(int points = 256);

/// lambda = (k + 1/k)/2 and its inverse on |lambda| > 1 with |k| < 1.
double lambda_from_k(double k);
double k_from_lambda(double lambda);

/// Eigenvalues of the dense truncation [n_min - margin, n_max + margin]
/// that lie outside [-1 - kSpectralMargin, 1 + kSpectralMargin], sorted by
/// lambda. Norming constants are left at zero.
std::vector<BoundState> bound_states(const JacobiOperator& H,
                                     int margin = kDefaultTruncationMargin);

/// R_+, R_- and T at |k| = 1 by propagating the Jost solutions across the
/// window with the three-term recurrence.
ScatteringPoint scattering_point(const JacobiOperator& H, cplx k);

/// R_+ for Side::right (Jost solution normalized at +infinity), R_- for
/// Side::left.
cplx jost_and_reflection(const JacobiOperator& H, cplx k, Side side);

/// Fills gamma_plus / gamma_minus: gamma_pm^{-1} = sum_n f_pm(k_l, n)^2 with
/// f_pm ~ k_l^{pm n} as n -> +-infinity.
std::vector<BoundState> norming_constants(const JacobiOperator& H,
                                          std::vector<BoundState> states,
                                          int margin = kDefaultTruncationMargin);

/// Truncation margin large enough that every bound state decays below
/// 1e-12 in amplitude before the truncation edge. The eigenvalues are located
/// on a 500-site probe margin and the slowest |k| sets the result, which is
/// never smaller than kDefaultTruncationMargin.
int auto_margin(const JacobiOperator& H);

/// Full forward scattering map on a grid. The per-k loop runs in parallel.
ScatteringData scattering_data(const JacobiOperator& H,
                               const std::vector<cplx>& grid,
                               int margin = kDefaultTruncationMargin);

namespace reference {

ScatteringData scattering_data_serial(const JacobiOperator& H,
                                      const std::vector<cplx>& grid,
                                      int margin = kDefaultTruncationMargin);

}  // namespace reference

}  // namespace toda
