#include "toda/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace toda {

namespace {

constexpr double kRescale = 1e150;

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiagonal_eigen(
    const LatticeState& s, int lo, int hi, int options) {
  const Eigen::Index n = hi - lo + 1;
  Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int site = lo + static_cast<int>(i);
    diag(i) = s.b(site);
    if (i + 1 < n) sub(i) = s.a(site);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, options);
  if (es.info() != Eigen::Success)
    throw Error("tridiagonal eigensolver did not converge");
  return es;
}

cplx unit_power(double theta, int n) { return std::polar(1.0, theta * n); }

// Splits a free-region solution f = A k^m + B k^{-m} from its values on two
// consecutive sites m0, m0+1.
std::pair<cplx, cplx> split_free(double theta, int m0, cplx f0, cplx f1) {
  const cplx k = std::polar(1.0, theta);
  const cplx det = 1.0 / k - k;
  const cplx A = (f0 * unit_power(theta, -(m0 + 1)) - f1 * unit_power(theta, -m0)) / det;
  const cplx B = (unit_power(theta, m0) * f1 - unit_power(theta, m0 + 1) * f0) / det;
  return {A, B};
}

// Jost solution of (H f)(n) = lambda f(n) seeded with f = k^{n} beyond the
// right window edge, propagated leftwards to `stop`. Returns the scaled
// value at `stop` and its log scale; f(n_max+1) is normalized to 1.
std::pair<double, double> jost_right_to(const LatticeState& s, double k,
                                        int stop) {
  const double lambda = lambda_from_k(k);
  const int start = s.n_max() + 1;
  if (stop >= start) return {std::pow(k, stop - start), 0.0};
  double next = k;     // f(start + 1)
  double cur = 1.0;    // f(start)
  double log_scale = 0.0;
  for (int n = start; n > stop; --n) {
    const double prev = ((lambda - s.b(n)) * cur - s.a(n) * next) / s.a(n - 1);
    next = cur;
    cur = prev;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      next /= kRescale;
      log_scale += std::log(kRescale);
    }
  }
  return {cur, log_scale};
}

// Mirror of jost_right_to: f = k^{-n} left of the window, f(n_min-1) = 1.
std::pair<double, double> jost_left_to(const LatticeState& s, double k,
                                       int stop) {
  const double lambda = lambda_from_k(k);
  const int start = s.n_min() - 1;
  if (stop <= start) return {std::pow(k, start - stop), 0.0};
  double prev = k;   // f(start - 1)
  double cur = 1.0;  // f(start)
  double log_scale = 0.0;
  for (int n = start; n < stop; ++n) {
    const double next = ((lambda - s.b(n)) * cur - s.a(n - 1) * prev) / s.a(n);
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += std::log(kRescale);
    }
  }
  return {cur, log_scale};
}

}  // namespace

JacobiOperator build_jacobi(const LatticeState& state) {
  if (state.a0() != 0.5 || state.b0() != 0.0) {
    std::ostringstream os;
    os << "Jacobi operator needs the normalized background (1/2, 0), got ("
       << state.a0() << ", " << state.b0() << "); normalize the state first";
    throw UnnormalizedBackground(os.str());
  }
  return JacobiOperator(state);
}

std::vector<cplx> default_k_grid(int points) {
  if (points < 2) throw DomainError("k-grid needs at least two points");
  std::vector<cplx> grid(static_cast<std::size_t>(points));
  const double lo = kBandEdgeExclusion;
  const double hi = std::numbers::pi - kBandEdgeExclusion;
  for (int i = 0; i < points; ++i) {
    const double theta = lo + (hi - lo) * i / (points - 1);
    grid[static_cast<std::size_t>(i)] = std::polar(1.0, theta);
  }
  return grid;
}

double lambda_from_k(double k) { return 0.5 * (k + 1.0 / k); }

double k_from_lambda(double lambda) {
  if (!(std::abs(lambda) > 1.0))
    throw DomainError("k_from_lambda: |lambda| must exceed 1");
  const double sign = lambda > 0 ? 1.0 : -1.0;
  // Cancellation-free form of lambda - sign*sqrt(lambda^2 - 1).
  return 1.0 / (lambda + sign * std::sqrt(lambda * lambda - 1.0));
}

std::vector<BoundState> bound_states(const JacobiOperator& H, int margin) {
  const LatticeState& s = H.state();
  const auto es = tridiagonal_eigen(s, s.n_min() - margin, s.n_max() + margin,
                                    Eigen::EigenvaluesOnly);
  std::vector<BoundState> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (std::abs(lambda) > 1.0 + kSpectralMargin) {
      BoundState bs;
      bs.lambda = lambda;
      bs.k = k_from_lambda(lambda);
      out.push_back(bs);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const BoundState& x, const BoundState& y) { return x.lambda < y.lambda; });
  return out;
}

ScatteringPoint scattering_point(const JacobiOperator& H, cplx k) {
  if (std::abs(std::abs(k) - 1.0) > 1e-12)
    throw DomainError("scattering_point: k must lie on the unit circle");
  const double theta = std::arg(k);
  if (std::abs(std::sin(theta)) < 1e-10)
    throw BandEdgeError("scattering_point: k = +-1 is a band edge");
  const LatticeState& s = H.state();
  const cplx kk = std::polar(1.0, theta);
  const cplx lambda = 0.5 * (kk + 1.0 / kk);
  const int lo = s.n_min();
  const int hi = s.n_max();

  // f_+ = k^n for n >= hi+1, propagated down to lo-1.
  cplx next = unit_power(theta, hi + 2);
  cplx cur = unit_power(theta, hi + 1);
  for (int n = hi + 1; n >= lo; --n) {
    const cplx prev = ((lambda - s.b(n)) * cur - s.a(n) * next) / s.a(n - 1);
    next = cur;
    cur = prev;
  }
  // cur = f(lo-1), next = f(lo).
  const auto [A, B] = split_free(theta, lo - 1, cur, next);

  // f_- = k^{-n} for n <= lo-1, propagated up to hi+2.
  cplx prev = unit_power(theta, -(lo - 2));
  cur = unit_power(theta, -(lo - 1));
  for (int n = lo - 1; n <= hi + 1; ++n) {
    const cplx nxt = ((lambda - s.b(n)) * cur - s.a(n - 1) * prev) / s.a(n);
    prev = cur;
    cur = nxt;
  }
  // prev = f(hi+1), cur = f(hi+2); f_- = D k^n + C k^{-n} there.
  const auto [D, C] = split_free(theta, hi + 1, prev, cur);

  ScatteringPoint out;
  out.R_plus = -std::conj(B) / A;
  out.R_minus = -std::conj(D) / C;
  out.T = 1.0 / A;
  return out;
}

cplx jost_and_reflection(const JacobiOperator& H, cplx k, Side side) {
  const ScatteringPoint p = scattering_point(H, k);
  return side == Side::right ? p.R_plus : p.R_minus;
}

std::vector<BoundState> norming_constants(const JacobiOperator& H,
                                          std::vector<BoundState> states,
                                          int margin) {
  if (states.empty()) return states;
  const LatticeState& s = H.state();
  const int lo = s.n_min() - margin;
  const int hi = s.n_max() + margin;
  const auto es = tridiagonal_eigen(s, lo, hi, Eigen::ComputeEigenvectors);
  const auto& values = es.eigenvalues();
  const Eigen::Index len = values.size();
  constexpr Eigen::Index kEdge = 10;

  for (BoundState& bs : states) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < len; ++i)
      if (std::abs(values(i) - bs.lambda) < std::abs(values(best) - bs.lambda))
        best = i;
    const Eigen::VectorXd psi = es.eigenvectors().col(best);

    double edge_mass = 0.0;
    for (Eigen::Index i = 0; i < std::min(kEdge, len); ++i)
      edge_mass += psi(i) * psi(i) + psi(len - 1 - i) * psi(len - 1 - i);
    if (edge_mass > 1e-10) {
      std::ostringstream os;
      os << "eigenvector for lambda = " << bs.lambda << " has mass " << edge_mass
         << " near the truncation edge; enlarge the margin";
      throw LocalizationError(os.str());
    }

    Eigen::Index peak = 0;
    psi.cwiseAbs().maxCoeff(&peak);
    const int peak_site = lo + static_cast<int>(peak);
    const double log_k = std::log(std::abs(bs.k));

    // psi has unit norm, so gamma^{-1} = (f(peak)/psi(peak))^2.
    const auto [fr, sr] = jost_right_to(s, bs.k, peak_site);
    const double log_ratio_plus =
        (s.n_max() + 1) * log_k + sr + std::log(std::abs(fr / psi(peak)));
    bs.gamma_plus = std::exp(-2.0 * log_ratio_plus);

    const auto [fl, sl] = jost_left_to(s, bs.k, peak_site);
    const double log_ratio_minus =
        -(s.n_min() - 1) * log_k + sl + std::log(std::abs(fl / psi(peak)));
    bs.gamma_minus = std::exp(-2.0 * log_ratio_minus);
  }
  return states;
}

int auto_margin(const JacobiOperator& H) {
  // Eigenvalues only, on a wide probe window so that weakly bound states are
  // not pushed into the band by the truncation.
  constexpr int kProbe = 500;
  double slowest = 0.0;
  for (const BoundState& bs : bound_states(H, kProbe))
    slowest = std::max(slowest, std::abs(bs.k));
  if (slowest == 0.0) return kDefaultTruncationMargin;
  // |k|^m < 1e-12 plus the 10-site edge zone checked for localization.
  const double needed = std::log(1e-12) / std::log(slowest) + 10.0;
  return std::max(kDefaultTruncationMargin, static_cast<int>(std::ceil(needed)));
}

ScatteringData scattering_data(const JacobiOperator& H,
                               const std::vector<cplx>& grid, int margin) {
  ScatteringData sd;
  sd.t = H.state().t();
  sd.k_grid = grid;
  sd.R_plus.resize(grid.size());
  sd.R_minus.resize(grid.size());
  const int count = static_cast<int>(grid.size());
#pragma omp parallel for schedule(static) if (count > 32)
  for (int i = 0; i < count; ++i) {
    const auto p = scattering_point(H, grid[static_cast<std::size_t>(i)]);
    sd.R_plus[static_cast<std::size_t>(i)] = p.R_plus;
    sd.R_minus[static_cast<std::size_t>(i)] = p.R_minus;
  }
  sd.bound_states = norming_constants(H, bound_states(H, margin), margin);
  return sd;
}

namespace reference {

ScatteringData scattering_data_serial(const JacobiOperator& H,
                                      const std::vector<cplx>& grid,
                                      int margin) {
  ScatteringData sd;
  sd.t = H.state().t();
  sd.k_grid = grid;
  for (const cplx& k : grid) {
    const auto p = scattering_point(H, k);
    sd.R_plus.push_back(p.R_plus);
    sd.R_minus.push_back(p.R_minus);
  }
  sd.bound_states = norming_constants(H, bound_states(H, margin), margin);
  return sd;
}

}  // namespace reference

}  // namespace toda
