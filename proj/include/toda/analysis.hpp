#pragma once

#include <array>
#include <string>
#include <vector>

#include "toda/core.hpp"
#include "toda/flow.hpp"
#include "toda/hierarchy.hpp"

namespace toda {

/// M -> C * M^{-(1+delta) 2M}.
struct DecayBound {
  double C = 10.0;
  double delta = 0.1;

  double value(int M) const;
};

inline constexpr double kNoiseFloor = 1e-13;

/// sum_{n >= M} |a(n)-a0| + |b(n)-b0|.
double tail_sum(const LatticeState& state, int M);

/// sum_n |n| (|a(n)-a0| + |b(n)-b0|).
double first_moment(const LatticeState& state);

struct SuperfastRow {
  int M = 0;
  double tail_sum = 0.0;
  double bound = 0.0;
  bool satisfied = false;
};

std::vector<SuperfastRow> superfast_check(const LatticeState& state,
                                          const DecayBound& bound, int M_lo,
                                          int M_hi);

/// Largest M whose bound value is still above the noise floor; comparisons
/// beyond it are vacuous in double precision.
int superfast_max_M(const DecayBound& bound, double noise_floor = kNoiseFloor);

/// True unless the bound fails at two or more consecutive M.
bool is_superfast(const std::vector<SuperfastRow>& rows);

enum class DecayClass { superfast, gaussian, exponential, polynomial, none };

const char* to_string(DecayClass cls);

struct DecayFit {
  DecayClass cls = DecayClass::none;
  // Per model (superfast, gaussian, exponential, polynomial): RMS residual of
  // log tail_sum(M) ~ c0 + c1 * phi(M), and the fitted slope c1.
  std::array<double, 4> residuals{};
  std::array<double, 4> slopes{};
  int points = 0;
};

/// Picks the log-tail model with the smallest least-squares residual over
/// M = 1.. while tail_sum(M) stays above the noise floor.
DecayFit classify_decay(const LatticeState& state);

struct DecayReport {
  double t = 0.0;
  std::vector<SuperfastRow> rows;
  double first_moment = 0.0;
  DecayClass fitted_class = DecayClass::none;
  bool superfast = false;
};

DecayReport decay_report(const LatticeState& state, const DecayBound& bound,
                         int M_lo, int M_hi);

struct TheoremScenario {
  double t0 = 0.0;
  double t1 = 1.0;
  LatticeState initial;
  HierarchyCoeffs coeffs = HierarchyCoeffs::homogeneous(0);
  DecayBound bound;
};

enum class Verdict { trivial, dichotomy, hypothesis_not_met };

const char* to_string(Verdict v);

struct WitnessResult {
  DecayReport at_t0;
  DecayReport at_t1;
  Verdict verdict = Verdict::hypothesis_not_met;
  std::string text;
  int M_lo = 2;
  int M_hi = 2;
};

/// Integrates the scenario from t0 to t1 and classifies the outcome:
/// constant data stays super-fast (trivial), nonconstant data that is
/// super-fast at t0 loses it by t1 (dichotomy), or the hypothesis fails at
/// t0. Super-fast decay at both times with nonconstant data raises
/// NumericalContradiction.
WitnessResult theorem_witness(const TheoremScenario& scenario,
                              const FlowConfig& config = {});

}  // namespace toda
