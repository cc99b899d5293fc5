#include "toda/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace toda {

namespace {

double deviation(const LatticeState& s, int n) {
  return std::abs(s.a(n) - s.a0()) + std::abs(s.b(n) - s.b0());
}

struct LineFit {
  double slope = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - icpt - slope * x[i];
    ss += e * e;
  }
  return {slope, std::sqrt(ss / n)};
}

}  // namespace

double DecayBound::value(int M) const {
  const double m = static_cast<double>(M);
  return C * std::exp(-(1.0 + delta) * 2.0 * m * std::log(m));
}

double tail_sum(const LatticeState& state, int M) {
  double sum = 0.0;
  for (int n = std::max(M, state.n_min()); n <= state.n_max(); ++n)
    sum += deviation(state, n);
  return sum;
}

double first_moment(const LatticeState& state) {
  double sum = 0.0;
  for (int n = state.n_min(); n <= state.n_max(); ++n)
    sum += std::abs(n) * deviation(state, n);
  return sum;
}

std::vector<SuperfastRow> superfast_check(const LatticeState& state,
                                          const DecayBound& bound, int M_lo,
                                          int M_hi) {
  if (M_lo < 1) throw DomainError("superfast_check: M must be >= 1");
  if (!(bound.C > 0.0) || !(bound.delta > 0.0))
    throw DomainError("superfast_check: C and delta must be positive");
  std::vector<SuperfastRow> rows;
  for (int M = M_lo; M <= M_hi; ++M) {
    SuperfastRow row;
    row.M = M;
    row.tail_sum = tail_sum(state, M);
    row.bound = bound.value(M);
    row.satisfied = row.tail_sum <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

int superfast_max_M(const DecayBound& bound, double noise_floor) {
  int M = 1;
  while (bound.value(M + 1) >= noise_floor) ++M;
  return M;
}

bool is_superfast(const std::vector<SuperfastRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!rows[i - 1].satisfied && !rows[i].satisfied) return false;
  return true;
}

const char* to_string(DecayClass cls) {
  switch (cls) {
    case DecayClass::superfast: return "superfast";
    case DecayClass::gaussian: return "gaussian-type";
    case DecayClass::exponential: return "exponential";
    case DecayClass::polynomial: return "polynomial";
    case DecayClass::none: return "none";
  }
  return "none";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::trivial: return "trivial";
    case Verdict::dichotomy: return "dichotomy";
    case Verdict::hypothesis_not_met: return "hypothesis-not-met";
  }
  return "hypothesis-not-met";
}

DecayFit classify_decay(const LatticeState& state) {
  const int M_cap = std::max(1, state.n_max() / 2);
  std::vector<double> Ms, logs;
  for (int M = 1; M <= M_cap; ++M) {
    const double ts = tail_sum(state, M);
    if (!(ts > kNoiseFloor)) break;
    Ms.push_back(M);
    logs.push_back(std::log(ts));
  }
  if (Ms.size() < 4) {
    std::ostringstream os;
    os << "classify_decay: only " << Ms.size()
       << " tail sums above the noise floor";
    throw InsufficientTail(os.str());
  }
  DecayFit fit;
  fit.points = static_cast<int>(Ms.size());
  const std::array<double (*)(double), 4> basis = {
      [](double m) { return m * std::log(m); },
      [](double m) { return m * m; },
      [](double m) { return m; },
      [](double m) { return std::log(m); },
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::vector<double> phi(Ms.size());
    std::transform(Ms.begin(), Ms.end(), phi.begin(), basis[i]);
    const LineFit lf = fit_line(phi, logs);
    fit.residuals[i] = lf.rms;
    fit.slopes[i] = lf.slope;
    if (lf.slope < 0.0 && lf.rms < best) {
      best = lf.rms;
      fit.cls = static_cast<DecayClass>(i);
    }
  }
  return fit;
}

DecayReport decay_report(const LatticeState& state, const DecayBound& bound,
                         int M_lo, int M_hi) {
  DecayReport rep;
  rep.t = state.t();
  rep.rows = superfast_check(state, bound, M_lo, M_hi);
  rep.first_moment = first_moment(state);
  rep.superfast = is_superfast(rep.rows);
  try {
    rep.fitted_class = classify_decay(state).cls;
  } catch (const InsufficientTail&) {
    rep.fitted_class = DecayClass::none;
  }
  return rep;
}

WitnessResult theorem_witness(const TheoremScenario& scenario,
                              const FlowConfig& config) {
  if (!(scenario.t0 < scenario.t1))
    throw DomainError("theorem_witness: t0 must be strictly less than t1");
  WitnessResult res;
  res.M_hi = superfast_max_M(scenario.bound);
  if (res.M_hi < res.M_lo + 1)
    throw DomainError("theorem_witness: bound falls below the noise floor before M = 3");

  const LatticeState start = scenario.initial.with_time(scenario.t0);
  const Trajectory traj = integrate(start, scenario.coeffs, scenario.t1, config);
  const LatticeState& end = traj.final_state();

  res.at_t0 = decay_report(start, scenario.bound, res.M_lo, res.M_hi);
  res.at_t1 = decay_report(end, scenario.bound, res.M_lo, res.M_hi);

  const bool constant =
      max_deviation(start) <= kNoiseFloor && max_deviation(end) <= kNoiseFloor;
  std::ostringstream os;
  if (!res.at_t0.superfast) {
    res.verdict = Verdict::hypothesis_not_met;
    os << "hypothesis not met at t0 = " << scenario.t0
       << ": tails exceed C M^{-(1+delta)2M} at consecutive M in ["
       << res.M_lo << ", " << res.M_hi << "]";
  } else if (res.at_t1.superfast) {
    if (!constant) {
      std::ostringstream err;
      err << "nonconstant data is super-fast at both t0 = " << scenario.t0
          << " and t1 = " << scenario.t1
          << " on M in [" << res.M_lo << ", " << res.M_hi
          << "]; this contradicts unique continuation and signals a numerical "
             "problem (window, tolerance or M range)";
      throw NumericalContradiction(err.str());
    }
    res.verdict = Verdict::trivial;
    os << "trivial: both times super-fast and the state is constant";
  } else {
    res.verdict = Verdict::dichotomy;
    os << "dichotomy exhibited: super-fast at t0 = " << scenario.t0
       << ", not super-fast at t1 = " << scenario.t1;
  }
  res.text = os.str();
  return res;
}

}  // namespace toda
