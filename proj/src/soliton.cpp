#include "toda/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "toda/spectral.hpp"

namespace toda {

namespace {

constexpr double kRescale = 1e150;
constexpr double kTailFloor = 1e-12;
constexpr double kTailCeiling = 1e-4;

double log_add(double x, double y) {
  if (x < y) std::swap(x, y);
  if (y == -HUGE_VAL) return x;
  return x + std::log1p(std::exp(y - x));
}

void validate(const SolitonSpec& spec) {
  const auto& bs = spec.bound_states;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const double k = bs[i].k;
    if (!(std::abs(k) < 1.0) || k == 0.0 || !std::isfinite(k))
      throw DomainError("soliton: k must lie in (-1, 1) without 0");
    if (!(bs[i].gamma > 0.0) || !std::isfinite(bs[i].gamma))
      throw DomainError("soliton: gamma must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (bs[j].k == k) throw DomainError("soliton: k values must be distinct");
  }
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

LatticeState insert_eigenvalue(const LatticeState& state, double k,
                               double gamma) {
  if (state.a0() != 0.5 || state.b0() != 0.0)
    throw UnnormalizedBackground("insert_eigenvalue: background must be (1/2, 0)");
  const double lambda = lambda_from_k(k);
  const double log_k = std::log(std::abs(k));
  const int lo = state.n_min() - 1;
  const int hi = state.n_max() + 1;
  const auto count = static_cast<std::size_t>(hi - lo + 1);
  auto at = [lo](int n) { return static_cast<std::size_t>(n - lo); };

  // u = f_+(lambda) with u(n) = k^n for n >= n_max + 1, stored as sign and
  // log-modulus.
  std::vector<double> log_u(count), sign_u(count);
  const double k_sign = k < 0 ? -1.0 : 1.0;
  double offset = hi * log_k;
  double cur = (hi % 2 != 0) ? k_sign : 1.0;  // sign of k^hi
  double next = cur * k;
  log_u[at(hi)] = offset;
  sign_u[at(hi)] = cur;
  for (int n = hi; n > lo; --n) {
    double prev = ((lambda - state.b(n)) * cur - state.a(n) * next) / state.a(n - 1);
    next = cur;
    cur = prev;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      next /= kRescale;
      offset += std::log(kRescale);
    }
    log_u[at(n - 1)] = std::log(std::abs(cur)) + offset;
    sign_u[at(n - 1)] = cur < 0 ? -1.0 : 1.0;
  }

  // S(n) = sum_{j > n} u(j)^2, with the geometric tail beyond hi.
  std::vector<double> log_s(count);
  log_s[at(hi)] = 2.0 * (hi + 1) * log_k - std::log1p(-k * k);
  for (int n = hi - 1; n >= lo; --n)
    log_s[at(n)] = log_add(log_s[at(n + 1)], 2.0 * log_u[at(n + 1)]);

  // rho(n) = gamma u(n)^2 / (1 + gamma S(n)); C(n-1)/C(n) = 1 + rho(n).
  const double log_gamma = std::log(gamma);
  std::vector<double> rho(count);
  for (int n = lo; n <= hi; ++n) {
    const double log_c = log_add(0.0, log_gamma + log_s[at(n)]);
    rho[at(n)] = std::exp(log_gamma + 2.0 * log_u[at(n)] - log_c);
  }

  // E(n) = gamma a(n) u(n) u(n+1) / C(n).
  std::vector<double> E(count - 1);
  for (int n = lo; n < hi; ++n) {
    const double r0 = rho[at(n)];
    const double r1 = rho[at(n + 1)];
    E[at(n)] = state.a(n) * sign_u[at(n)] * sign_u[at(n + 1)] *
               std::sqrt(r0 * r1 / (1.0 + r1));
  }

  std::vector<double> a(state.size()), b(state.size());
  for (int n = state.n_min(); n <= state.n_max(); ++n) {
    const auto i = static_cast<std::size_t>(n - state.n_min());
    a[i] = state.a(n) * std::sqrt((1.0 + rho[at(n)]) / (1.0 + rho[at(n + 1)]));
    b[i] = state.b(n) - (E[at(n)] - E[at(n - 1)]);
  }
  return state.with_values(std::move(a), std::move(b));
}

LatticeState build_soliton(const SolitonSpec& spec, int n_lo, int n_hi) {
  validate(spec);
  if (n_hi < n_lo) throw WindowTooSmall("soliton: empty window");
  const double log_floor = std::log(1e-14);
  for (const SolitonParam& p : spec.bound_states) {
    // gamma k^{2n} / (1 - k^2) = 1 at the soliton center.
    const double log_k = std::log(std::abs(p.k));
    const double center = std::log((1.0 - p.k * p.k) / p.gamma) / (2.0 * log_k);
    const double margin = std::min(n_hi - center, center - n_lo);
    if (!(2.0 * margin * log_k < log_floor)) {
      std::ostringstream os;
      os << "soliton: window [" << n_lo << ", " << n_hi
         << "] too small for k = " << p.k << ", gamma = " << p.gamma
         << " (center near " << center << ")";
      throw WindowTooSmall(os.str());
    }
  }
  LatticeState s = LatticeState::constant(n_lo, n_hi - n_lo + 1, 0.5, 0.0);
  for (const SolitonParam& p : spec.bound_states)
    s = insert_eigenvalue(s, p.k, p.gamma);
  return s.with_time(spec.t);
}

TailRates tail_rate(const LatticeState& state) {
  std::vector<double> dev(state.size());
  std::size_t peak = 0;
  for (std::size_t i = 0; i < dev.size(); ++i) {
    dev[i] = std::abs(state.a_values()[i] - state.a0());
    if (dev[i] > dev[peak]) peak = i;
  }
  if (dev[peak] <= 1e-13)
    throw InsufficientTail("tail_rate: no deviation from the background");

  auto side_rate = [&](int step, const char* name) {
    std::vector<double> x, y;
    for (auto i = static_cast<long>(peak); i >= 0 && i < static_cast<long>(dev.size());
         i += step) {
      const double d = dev[static_cast<std::size_t>(i)];
      if (d >= kTailFloor && d <= kTailCeiling) {
        x.push_back(2.0 * std::abs(i - static_cast<long>(peak)));
        y.push_back(std::log(d));
      }
    }
    if (x.size() < 3) {
      std::ostringstream os;
      os << "tail_rate: fewer than 3 tail sites on the " << name << " side";
      throw InsufficientTail(os.str());
    }
    return fit_slope(x, y);
  };
  return {side_rate(+1, "right"), side_rate(-1, "left")};
}

}  // namespace toda
