#pragma once

#include <array>
#include <vector>

#include "toda/core.hpp"
#include "toda/hierarchy.hpp"

namespace toda {

struct FlowConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.1;
  // Minimum number of background sites between the perturbation and either
  // window edge. Must be at least r + 2.
  int guard_band = 8;
  // When nonempty, snapshots are taken exactly at these times (plus the
  // start and end); otherwise every accepted step is recorded.
  std::vector<double> output_times;
  long max_steps = 1000000;
};

/// One row of the conservation log, written at every accepted step.
struct ConservationRecord {
  double t = 0.0;
  // sum_n <delta_n, H^k delta_n> - background, k = 1..4.
  std::array<double, 4> traces{};
  double min_a = 0.0;
  int tail_margin = 0;
};

template <class State>
struct BasicTrajectory {
  std::vector<State> states;
  std::vector<ConservationRecord> log;

  const State& initial() const { return states.front(); }
  const State& final_state() const { return states.back(); }
};

using Trajectory = BasicTrajectory<LatticeState>;
using KvMTrajectory = BasicTrajectory<KvMState>;

/// Traces of H^k relative to the constant background, k = 1..4. Exact for
/// the window convention (finite sums).
std::array<double, 4> trace_invariants(const LatticeState& state);

/// Distance from the outermost site where |a-a0|+|b-b0| > threshold to the
/// nearer window edge. The window length when no site exceeds it.
int tail_margin(const LatticeState& state, double threshold);

/// Integrates TL_r from state.t() to t_final (either direction) with an
/// embedded 5(4) Runge-Kutta pair.
Trajectory integrate(const LatticeState& state, const HierarchyCoeffs& coeffs,
                     double t_final, const FlowConfig& config = {});

/// Kac-van Moerbeke flow; the conservation log uses the b = 0 embedding.
KvMTrajectory integrate_kvm(const KvMState& state, double t_final,
                            const FlowConfig& config = {});

}  // namespace toda
