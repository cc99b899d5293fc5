#include "toda/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

namespace toda {

DispersionLaw::DispersionLaw(int r, std::vector<double> d)
    : r_(r), d_(std::move(d)) {
  if (r_ < 0) throw DomainError("dispersion order must be nonnegative");
  if (d_.size() != static_cast<std::size_t>(2 * r_ + 3))
    throw DomainError("dispersion law needs 2r+3 Laurent coefficients");
  for (double v : d_)
    if (!std::isfinite(v)) throw DomainError("non-finite Laurent coefficient");
}

DispersionLaw DispersionLaw::toda() { return {0, {-1.0, 0.0, 1.0}}; }

DispersionLaw DispersionLaw::from_symbol(const HierarchyCoeffs& coeffs) {
  const int r = coeffs.r();
  const int reach = r + 1;
  const LatticeState free = LatticeState::constant(-2 * reach, 4 * reach + 1);
  const LaxOperator P = lax_operator(free, coeffs);
  std::vector<double> d(static_cast<std::size_t>(2 * r + 3));
  for (int s = -reach; s <= reach; ++s)
    d[static_cast<std::size_t>(s + reach)] = 2.0 * P.at(0, s);
  return {r, std::move(d)};
}

std::vector<double> DispersionLaw::factor(double* remainder) const {
  const int deg = 2 * r_ + 2;
  // p(k) = k^{r+1} alpha(k), p_i = d_{i-r-1}.
  std::vector<double> p(d_);
  std::vector<double> q(static_cast<std::size_t>(deg - 1), 0.0);
  for (int i = deg; i >= 2; --i) {
    const double lead = p[static_cast<std::size_t>(i)];
    q[static_cast<std::size_t>(i - 2)] = lead;
    p[static_cast<std::size_t>(i - 2)] += lead;
    p[static_cast<std::size_t>(i)] = 0.0;
  }
  double rem = std::max(std::abs(p[0]), std::abs(p[1]));
  const int qdeg = 2 * r_;
  for (int i = 0; i <= qdeg; ++i)
    rem = std::max(rem, std::abs(q[static_cast<std::size_t>(i)] -
                                 q[static_cast<std::size_t>(qdeg - i)]));
  if (remainder) *remainder = rem;

  // q(k)/k^r = q_r + sum_j q_{r+j} (k^j + k^-j) = q_r + sum_j 2 q_{r+j} T_j(lambda).
  std::vector<double> G(static_cast<std::size_t>(r_ + 1), 0.0);
  std::vector<double> t_prev{1.0};        // T_0
  std::vector<double> t_cur{0.0, 1.0};    // T_1
  G[0] = q[static_cast<std::size_t>(r_)];
  for (int j = 1; j <= r_; ++j) {
    const double w = 2.0 * q[static_cast<std::size_t>(r_ + j)];
    for (std::size_t i = 0; i < t_cur.size(); ++i) G[i] += w * t_cur[i];
    std::vector<double> t_next(t_cur.size() + 1, 0.0);
    for (std::size_t i = 0; i < t_cur.size(); ++i) t_next[i + 1] += 2.0 * t_cur[i];
    for (std::size_t i = 0; i < t_prev.size(); ++i) t_next[i] -= t_prev[i];
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
  }
  return G;
}

cplx alpha(const DispersionLaw& law, cplx k) {
  if (k == cplx(0.0, 0.0)) throw DomainError("alpha: k must be nonzero");
  const int reach = law.r() + 1;
  cplx sum = 0.0;
  for (int j = -reach; j <= reach; ++j) sum += law.d(j) * std::pow(k, j);
  return sum;
}

DispersionFit fit_dispersion(const ScatteringData& sd0,
                             const ScatteringData& sd1, int r) {
  if (r < 0) throw DomainError("fit_dispersion: order must be nonnegative");
  const std::size_t n = sd0.k_grid.size();
  if (sd1.k_grid.size() != n || sd0.R_plus.size() != n || sd1.R_plus.size() != n)
    throw DomainError("fit_dispersion: scattering data on different grids");
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(sd0.k_grid[i] - sd1.k_grid[i]) > 1e-12)
      throw DomainError("fit_dispersion: scattering data on different grids");
  const double dt = sd1.t - sd0.t;
  if (dt == 0.0) throw DomainError("fit_dispersion: equal time stamps");

  double peak = 0.0;
  for (const cplx& R : sd0.R_plus) peak = std::max(peak, std::abs(R));
  const double floor = std::max(1e-12, 1e-6 * peak);
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(sd0.R_plus[i]) > floor && std::abs(sd1.R_plus[i]) > 1e-12)
      used.push_back(i);
  if (used.size() * 2 <= n || used.size() < static_cast<std::size_t>(2 * r + 3)) {
    std::ostringstream os;
    os << "fit_dispersion: reflection coefficient above noise on only "
       << used.size() << " of " << n << " grid points";
    throw InsufficientSignal(os.str());
  }

  // Unwrapped log ratio along the (ordered) grid.
  std::vector<cplx> data(used.size());
  double prev_phase = 0.0;
  for (std::size_t m = 0; m < used.size(); ++m) {
    const cplx ratio = sd1.R_plus[used[m]] / sd0.R_plus[used[m]];
    double phase = std::arg(ratio);
    if (m > 0) {
      const double two_pi = 2.0 * std::numbers::pi;
      phase += two_pi * std::round((prev_phase - phase) / two_pi);
    }
    prev_phase = phase;
    data[m] = cplx(std::log(std::abs(ratio)), phase) / dt;
  }

  const int reach = r + 1;
  const auto cols = static_cast<Eigen::Index>(2 * reach + 1);
  const auto rows = static_cast<Eigen::Index>(2 * used.size());
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (std::size_t m = 0; m < used.size(); ++m) {
    const double theta = std::arg(sd0.k_grid[used[m]]);
    const auto row = static_cast<Eigen::Index>(2 * m);
    for (int j = -reach; j <= reach; ++j) {
      A(row, j + reach) = std::cos(j * theta);
      A(row + 1, j + reach) = std::sin(j * theta);
    }
    rhs(row) = data[m].real();
    rhs(row + 1) = data[m].imag();
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
  std::vector<double> d(sol.data(), sol.data() + sol.size());
  DispersionLaw law(r, std::move(d));

  double residual = 0.0;
  for (std::size_t m = 0; m < used.size(); ++m)
    residual = std::max(residual, std::abs(alpha(law, sd0.k_grid[used[m]]) - data[m]));
  if (residual * std::abs(dt) > std::numbers::pi / 2) {
    std::ostringstream os;
    os << "fit_dispersion: residual " << residual
       << " suggests a phase-unwrapping failure";
    throw BranchTrackingFailure(os.str());
  }
  return {std::move(law), residual, static_cast<int>(used.size())};
}

ScatteringData evolve_scattering(const ScatteringData& sd,
                                 const DispersionLaw& law, double t) {
  ScatteringData out = sd;
  out.t = sd.t + t;
  if (t == 0.0) return out;
  for (std::size_t i = 0; i < sd.k_grid.size(); ++i) {
    const cplx a = alpha(law, sd.k_grid[i]) * t;
    out.R_plus[i] = sd.R_plus[i] * std::exp(a);
    out.R_minus[i] = sd.R_minus[i] * std::exp(-a);
  }
  for (BoundState& bs : out.bound_states) {
    const double a = alpha(law, cplx(bs.k, 0.0)).real() * t;
    bs.gamma_plus *= std::exp(a);
    bs.gamma_minus *= std::exp(-a);
  }
  return out;
}

IndicatorEstimate indicator_estimate(const LogFunction& log_f, double phi,
                                     double r_max, int samples) {
  if (!(r_max > 0.0)) throw DomainError("indicator_estimate: r_max must be positive");
  if (samples < 10) throw DomainError("indicator_estimate: need at least 10 samples");
  IndicatorEstimate est;
  est.phi = phi;
  const cplx dir = std::polar(1.0, phi);
  for (int i = 0; i < samples; ++i) {
    const double radius = r_max * (i + 1) / samples;
    const double lm = log_f(radius * dir).real();
    if (!std::isfinite(lm)) {
      std::ostringstream os;
      os << "indicator_estimate: log-modulus not finite at r = " << radius;
      throw OverflowError(os.str());
    }
    est.radii.push_back(radius);
    est.log_moduli.push_back(lm);
  }
  const auto first = static_cast<std::size_t>(std::floor(0.9 * samples));
  est.h_estimate = -std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i < est.radii.size(); ++i)
    est.h_estimate = std::max(est.h_estimate, est.log_moduli[i] / est.radii[i]);
  return est;
}

LogFunction log_sum(LogFunction f, LogFunction g) {
  return [f = std::move(f), g = std::move(g)](cplx z) {
    const cplx lf = f(z);
    const cplx lg = g(z);
    const bool f_dominates = lf.real() >= lg.real();
    const cplx big = f_dominates ? lf : lg;
    const cplx small = f_dominates ? lg : lf;
    return big + std::log(1.0 + std::exp(small - big));
  };
}

LogFunction log_product(LogFunction f, LogFunction g) {
  return [f = std::move(f), g = std::move(g)](cplx z) { return f(z) + g(z); };
}

GrowthReport growth_exponent_witness(const ScatteringData& sd0,
                                     const DispersionLaw& law, double x_max,
                                     int samples) {
  GrowthReport rep;
  rep.r = law.r();
  rep.forward_factor = law.r() % 2 == 0;
  for (const cplx& R : sd0.R_plus)
    rep.max_abs_reflection = std::max(rep.max_abs_reflection, std::abs(R));
  rep.trivial = rep.max_abs_reflection <= kReflectionlessTol;

  const double sign = rep.forward_factor ? 1.0 : -1.0;
  for (int i = 0; i < samples; ++i) {
    const double x = x_max * (i + 1) / samples;
    GrowthRow row;
    row.x = x;
    row.rate_minus = sign * alpha(law, cplx(-1.0 / x, 0.0)).real() / x;
    row.rate_plus = sign * alpha(law, cplx(1.0 / x, 0.0)).real() / x;
    rep.rows.push_back(row);
  }
  const double lead = law.d(law.r() + 1);
  const double predicted = lead * std::pow(x_max, law.r());
  rep.growth_detected =
      !rep.rows.empty() && rep.rows.back().rate_minus >= 0.5 * predicted &&
      rep.rows.back().rate_minus > 0.0;

  std::ostringstream os;
  if (rep.trivial) {
    os << "trivial reflection; no contradiction (R_+ vanishes on the grid, "
          "the data is reflectionless)";
  } else if (rep.growth_detected) {
    os << "nontrivial reflection (max |R_+| = " << rep.max_abs_reflection
       << "); the " << (rep.forward_factor ? "forward" : "backward")
       << " factor grows like exp(x^" << law.r() + 1
       << ") along k = -1/x (rate " << rep.rows.back().rate_minus
       << " at x = " << rep.rows.back().x
       << "), so R_+(.,0) and R_+(.,1) cannot both have nonpositive type: "
          "super-fast decay at two times forces R_+ = 0";
  } else {
    os << "nontrivial reflection but no growth detected along k = -1/x";
  }
  rep.verdict = os.str();
  return rep;
}

}  // namespace toda
