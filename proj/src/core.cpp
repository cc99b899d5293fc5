#include "toda/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace toda {

namespace {

void require_positive_window(std::span<const double> values, int n_min,
                             const char* name) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      std::ostringstream os;
      os << name << "(" << n_min + static_cast<int>(i)
         << ") = " << values[i] << " is not a positive finite number";
      throw InvalidState(os.str());
    }
  }
}

}  // namespace

LatticeState::LatticeState(int n_min, std::vector<double> a,
                           std::vector<double> b, double a0, double b0,
                           double t)
    : n_min_(n_min), a_(std::move(a)), b_(std::move(b)), a0_(a0), b0_(b0),
      t_(t) {
  if (a_.empty() || a_.size() != b_.size())
    throw InvalidState("a and b must have equal nonzero length");
  if (!(a0_ > 0.0) || !std::isfinite(a0_))
    throw InvalidState("background a0 must be positive");
  if (!std::isfinite(b0_) || !std::isfinite(t_))
    throw InvalidState("background b0 and time must be finite");
  require_positive_window(a_, n_min_, "a");
  for (double v : b_)
    if (!std::isfinite(v)) throw InvalidState("b contains a non-finite value");
}

LatticeState LatticeState::constant(int n_min, int len, double a0, double b0,
                                    double t) {
  if (len < 1) throw InvalidState("window length must be >= 1");
  const auto n = static_cast<std::size_t>(len);
  return {n_min, std::vector<double>(n, a0), std::vector<double>(n, b0), a0,
          b0, t};
}

LatticeState LatticeState::with_time(double t) const {
  LatticeState out = *this;
  out.t_ = t;
  return out;
}

LatticeState LatticeState::with_values(std::vector<double> a,
                                       std::vector<double> b) const {
  if (a.size() != a_.size() || b.size() != b_.size())
    throw InvalidState("with_values: window length mismatch");
  return {n_min_, std::move(a), std::move(b), a0_, b0_, t_};
}

KvMState::KvMState(int n_min, std::vector<double> rho, double rho0, double t)
    : n_min_(n_min), rho_(std::move(rho)), rho0_(rho0), t_(t) {
  if (rho_.empty()) throw InvalidState("rho must be nonempty");
  if (!(rho0_ > 0.0) || !std::isfinite(rho0_))
    throw InvalidState("background rho0 must be positive");
  require_positive_window(rho_, n_min_, "rho");
}

KvMState KvMState::constant(int n_min, int len, double rho0, double t) {
  if (len < 1) throw InvalidState("window length must be >= 1");
  return {n_min, std::vector<double>(static_cast<std::size_t>(len), rho0),
          rho0, t};
}

KvMState KvMState::with_time(double t) const {
  KvMState out = *this;
  out.t_ = t;
  return out;
}

KvMState KvMState::with_values(std::vector<double> rho) const {
  if (rho.size() != rho_.size())
    throw InvalidState("with_values: window length mismatch");
  return {n_min_, std::move(rho), rho0_, t_};
}

std::pair<double, double> access(const LatticeState& state, int n) {
  return {state.a(n), state.b(n)};
}

LatticeState normalize(const LatticeState& state) {
  const double a0 = state.a0();
  if (!(a0 > 0.0)) throw InvalidState("normalize: a0 must be positive");
  const double scale = 1.0 / (2.0 * a0);
  std::vector<double> a(state.a_values().begin(), state.a_values().end());
  std::vector<double> b(state.b_values().begin(), state.b_values().end());
  for (double& v : a) v *= scale;
  for (double& v : b) v = (v - state.b0()) * scale;
  return {state.n_min(), std::move(a), std::move(b), 0.5, 0.0, state.t()};
}

LatticeState reflect(const LatticeState& state) {
  // a~ lives on [-n_max-1, -n_min-1], b~ on [-n_max, -n_min].
  const int lo = -state.n_max() - 1;
  const int hi = -state.n_min();
  const auto len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> a(len), b(len);
  for (int n = lo; n <= hi; ++n) {
    a[static_cast<std::size_t>(n - lo)] = state.a(-n - 1);
    b[static_cast<std::size_t>(n - lo)] = state.b(-n);
  }
  return {lo, std::move(a), std::move(b), state.a0(), state.b0(), -state.t()};
}

bool approx_equal(const LatticeState& lhs, const LatticeState& rhs,
                  double tol) {
  if (std::abs(lhs.a0() - rhs.a0()) > tol || std::abs(lhs.b0() - rhs.b0()) > tol)
    return false;
  const int lo = std::min(lhs.n_min(), rhs.n_min());
  const int hi = std::max(lhs.n_max(), rhs.n_max());
  for (int n = lo; n <= hi; ++n) {
    if (std::abs(lhs.a(n) - rhs.a(n)) > tol) return false;
    if (std::abs(lhs.b(n) - rhs.b(n)) > tol) return false;
  }
  return true;
}

double max_deviation(const LatticeState& state) {
  double m = 0.0;
  for (int n = state.n_min(); n <= state.n_max(); ++n)
    m = std::max(m, std::abs(state.a(n) - state.a0()) +
                        std::abs(state.b(n) - state.b0()));
  return m;
}

}  // namespace toda
