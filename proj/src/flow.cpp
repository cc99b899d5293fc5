#include "toda/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace toda {

namespace {

namespace odeint = boost::numeric::odeint;
using Vec = std::vector<double>;

LatticeState unpack(const LatticeState& shape, const Vec& x, double t) {
  const std::size_t len = shape.size();
  Vec a(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(len));
  Vec b(x.begin() + static_cast<std::ptrdiff_t>(len), x.end());
  return LatticeState(shape.n_min(), std::move(a), std::move(b), shape.a0(),
                      shape.b0(), t);
}

Vec pack(const LatticeState& s) {
  Vec x(s.a_values().begin(), s.a_values().end());
  x.insert(x.end(), s.b_values().begin(), s.b_values().end());
  return x;
}

ConservationRecord conservation(const LatticeState& s, double threshold) {
  ConservationRecord rec;
  rec.t = s.t();
  rec.traces = trace_invariants(s);
  rec.min_a = *std::min_element(s.a_values().begin(), s.a_values().end());
  rec.tail_margin = tail_margin(s, threshold);
  return rec;
}

void check_margin(int margin, int guard, double t) {
  if (margin < guard) {
    std::ostringstream os;
    os << "perturbation reached the window guard band at t = " << t
       << " (margin " << margin << " < " << guard << ")";
    throw GuardBandViolation(os.str());
  }
}

// Generic adaptive driver. `rhs` evaluates the vector field, `make` turns a
// raw vector into a time-stamped state (throws on invalid values), and
// `observe` validates and logs each accepted state.
template <class State, class Rhs, class Make, class Observe>
BasicTrajectory<State> drive(const State& start, Vec x, double t_final,
                             const FlowConfig& config, Rhs rhs, Make make,
                             Observe observe) {
  if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0) ||
      !(config.max_step > 0.0))
    throw InvalidState("flow tolerances and max_step must be positive");

  BasicTrajectory<State> traj;
  traj.states.push_back(start);
  traj.log.push_back(observe(start));

  double t = start.t();
  if (t_final == t) return traj;
  const double dir = t_final > t ? 1.0 : -1.0;

  std::vector<double> stops;
  for (double s : config.output_times)
    if (dir * (s - t) > 0.0 && dir * (t_final - s) > 0.0) stops.push_back(s);
  std::sort(stops.begin(), stops.end());
  if (dir < 0.0) std::reverse(stops.begin(), stops.end());
  stops.push_back(t_final);
  std::size_t next_stop = 0;

  auto stepper = odeint::make_controlled(config.abs_tol, config.rel_tol,
                                         odeint::runge_kutta_dopri5<Vec>());
  auto system = [&](const Vec& y, Vec& dydt, double tt) {
    try {
      rhs(y, dydt, tt);
    } catch (const InvalidState& e) {
      // A stage left the admissible set; poison the step so the controller
      // rejects it and shrinks dt.
      std::fill(dydt.begin(), dydt.end(),
                std::numeric_limits<double>::quiet_NaN());
    }
  };

  double dt = dir * std::min(config.max_step, 1e-3);
  int rejections = 0;
  for (long step = 0; step < config.max_steps; ++step) {
    const double target = stops[next_stop];
    const double remaining = target - t;
    bool hits_target = false;
    if (std::abs(dt) > config.max_step) dt = dir * config.max_step;
    const double proposal = dt;
    if (std::abs(dt) >= std::abs(remaining)) {
      dt = remaining;
      hits_target = true;
    }
    Vec trial = x;
    double t_trial = t;
    double dt_trial = dt;
    const auto res = stepper.try_step(system, trial, t_trial, dt_trial);
    const bool finite = std::all_of(trial.begin(), trial.end(),
                                    [](double v) { return std::isfinite(v); });
    if (res == odeint::fail || !finite) {
      dt = (res == odeint::fail && std::isfinite(dt_trial)) ? dt_trial : dt / 4;
      if (++rejections > 200 ||
          std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t))) {
        std::ostringstream os;
        os << "step size underflow at t = " << t
           << " (tolerance unreachable; coefficients may be degenerating)";
        throw StepFailure(os.str());
      }
      continue;
    }
    rejections = 0;
    x = std::move(trial);
    // A step that lands within rounding of the stop counts as reaching it.
    if (!hits_target &&
        std::abs(target - t_trial) <= 1e-13 * std::max(1.0, std::abs(target)))
      hits_target = true;
    t = hits_target ? target : t_trial;
    // Clamping to a stop shortens the step; do not let that throttle the
    // next one.
    dt = hits_target ? dir * std::max(std::abs(dt_trial), std::abs(proposal))
                     : dt_trial;

    State s = [&] {
      try {
        return make(x, t);
      } catch (const InvalidState& e) {
        throw StepFailure(std::string("accepted step left the admissible set: ") +
                          e.what());
      }
    }();
    ConservationRecord rec = observe(s);
    traj.log.push_back(rec);
    const bool record = config.output_times.empty() || hits_target;
    if (hits_target) ++next_stop;
    if (record) traj.states.push_back(std::move(s));
    if (next_stop == stops.size()) return traj;
  }
  throw StepFailure("maximum number of steps exceeded");
}

}  // namespace

std::array<double, 4> trace_invariants(const LatticeState& state) {
  const LatticeState background =
      LatticeState::constant(0, 1, state.a0(), state.b0());
  std::array<double, 4> bg{};
  for (int k = 1; k <= 4; ++k)
    bg[static_cast<std::size_t>(k - 1)] = matrix_element(background, k, 0, 0);
  std::array<double, 4> out{};
  for (int n = state.n_min() - 2; n <= state.n_max() + 2; ++n)
    for (int k = 1; k <= 4; ++k)
      out[static_cast<std::size_t>(k - 1)] +=
          matrix_element(state, k, n, n) - bg[static_cast<std::size_t>(k - 1)];
  return out;
}

int tail_margin(const LatticeState& state, double threshold) {
  int first = -1, last = -1;
  for (int n = state.n_min(); n <= state.n_max(); ++n) {
    const double dev =
        std::abs(state.a(n) - state.a0()) + std::abs(state.b(n) - state.b0());
    if (dev > threshold) {
      if (first < 0) first = n;
      last = n;
    }
  }
  if (first < 0) return static_cast<int>(state.size());
  return std::min(first - state.n_min(), state.n_max() - last);
}

Trajectory integrate(const LatticeState& state, const HierarchyCoeffs& coeffs,
                     double t_final, const FlowConfig& config) {
  if (config.guard_band < coeffs.r() + 2) {
    std::ostringstream os;
    os << "guard band " << config.guard_band << " is below r + 2 = "
       << coeffs.r() + 2;
    throw InvalidState(os.str());
  }
  const double threshold = 10.0 * config.abs_tol;
  check_margin(tail_margin(state, threshold), config.guard_band, state.t());

  const std::size_t len = state.size();
  auto rhs = [&](const Vec& y, Vec& dydt, double t) {
    const FieldValues f = tl_field(unpack(state, y, t), coeffs);
    std::copy(f.a_dot.begin(), f.a_dot.end(), dydt.begin());
    std::copy(f.b_dot.begin(), f.b_dot.end(),
              dydt.begin() + static_cast<std::ptrdiff_t>(len));
  };
  auto make = [&](const Vec& y, double t) { return unpack(state, y, t); };
  auto observe = [&](const LatticeState& s) {
    ConservationRecord rec = conservation(s, threshold);
    check_margin(rec.tail_margin, config.guard_band, s.t());
    return rec;
  };
  return drive<LatticeState>(state, pack(state), t_final, config, rhs, make,
                             observe);
}

KvMTrajectory integrate_kvm(const KvMState& state, double t_final,
                            const FlowConfig& config) {
  // TL_1 is the reference order for the reduction.
  if (config.guard_band < 3) throw InvalidState("guard band must be >= 3");
  const double threshold = 10.0 * config.abs_tol;
  auto embed = [](const KvMState& s) {
    std::vector<double> a(s.rho_values().begin(), s.rho_values().end());
    std::vector<double> b(a.size(), 0.0);
    return LatticeState(s.n_min(), std::move(a), std::move(b), s.rho0(), 0.0,
                        s.t());
  };
  check_margin(tail_margin(embed(state), threshold), config.guard_band,
               state.t());

  auto rhs = [&](const Vec& y, Vec& dydt, double t) {
    const auto f = kvm_field(KvMState(state.n_min(), y, state.rho0(), t));
    std::copy(f.begin(), f.end(), dydt.begin());
  };
  auto make = [&](const Vec& y, double t) {
    return KvMState(state.n_min(), y, state.rho0(), t);
  };
  auto observe = [&](const KvMState& s) {
    ConservationRecord rec = conservation(embed(s), threshold);
    check_margin(rec.tail_margin, config.guard_band, s.t());
    return rec;
  };
  Vec x(state.rho_values().begin(), state.rho_values().end());
  return drive<KvMState>(state, std::move(x), t_final, config, rhs, make,
                         observe);
}

}  // namespace toda
