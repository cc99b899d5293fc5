#pragma once

#include <vector>

#include "toda/core.hpp"

namespace toda {

/// One eigenvalue to insert: k in (-1, 1) \ {0} (lambda = (k + 1/k)/2)
/// and the norming constant gamma_+ > 0 it should carry.
struct SolitonParam {
  double k = 0.0;
  double gamma = 1.0;
};

struct SolitonSpec {
  std::vector<SolitonParam> bound_states;
  double t = 0.0;
};

/// Reflectionless state with exactly the given bound states on the
/// background (1/2, 0), built by inserting each eigenvalue into the current
/// operator with a double commutation step. The gamma of each parameter is
/// the gamma_+ of the result. Throws WindowTooSmall when a soliton tail
/// would not fall below 1e-14 inside [n_lo, n_hi].
LatticeState build_soliton(const SolitonSpec& spec, int n_lo, int n_hi);

/// One double commutation step on a state with normalized background.
LatticeState insert_eigenvalue(const LatticeState& state, double k,
                               double gamma);

struct TailRates {
  double rate_plus = 0.0;   // right of the peak
  double rate_minus = 0.0;  // left of the peak
};

/// Least-squares slope of log|a(n) - a0| against 2|n - peak| over the tail
/// sites whose deviation lies in [1e-12, 1e-4], separately on each side.
TailRates tail_rate(const LatticeState& state);

}  // namespace toda
