#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "toda/hierarchy.hpp"
#include "toda/spectral.hpp"

namespace toda {

/// Laurent polynomial alpha_r(k) = sum_{j=-(r+1)}^{r+1} d_j k^j that drives
/// the exponential time evolution of the scattering data. For a Toda
/// hierarchy flow d_{-j} = -d_j and alpha_r(k) = (k - 1/k) G((k + 1/k)/2)
/// with a monic G of degree r.
class DispersionLaw {
 public:
  DispersionLaw(int r, std::vector<double> d);

  /// alpha_0(k) = k - 1/k.
  static DispersionLaw toda();

  /// Symbol of the Lax operator on the free background:
  /// alpha(k) = 2 sum_s P(n, n+s) k^s.
  static DispersionLaw from_symbol(const HierarchyCoeffs& coeffs);

  int r() const { return r_; }
  /// d_j for -(r+1) <= j <= r+1.
  double d(int j) const { return d_[static_cast<std::size_t>(j + r_ + 1)]; }
  const std::vector<double>& coefficients() const { return d_; }

  /// Coefficients of G in the monomial basis of lambda (index = power).
  /// `remainder` receives the largest coefficient left over after dividing
  /// k^{r+1} alpha(k) by (k^2 - 1) and the palindromic mismatch.
  std::vector<double> factor(double* remainder = nullptr) const;

 private:
  int r_;
  std::vector<double> d_;
};

/// alpha_r(k); k = 0 raises DomainError.
cplx alpha(const DispersionLaw& law, cplx k);

struct DispersionFit {
  DispersionLaw law;
  double residual = 0.0;    // max |fit - data| over the points used
  int points_used = 0;
};

/// Least-squares Laurent fit of log(R_+(k, t1) / R_+(k, t0)) / (t1 - t0)
/// with the phase unwrapped along the grid.
DispersionFit fit_dispersion(const ScatteringData& sd0,
                             const ScatteringData& sd1, int r);

/// R_pm -> R_pm e^{pm alpha t}, gamma_{pm,l} -> gamma_{pm,l} e^{pm alpha(k_l) t}.
ScatteringData evolve_scattering(const ScatteringData& sd,
                                 const DispersionLaw& law, double t);

/// Returns log f(z) (any branch); only the real part is used for moduli.
using LogFunction = std::function<cplx(cplx)>;

struct IndicatorEstimate {
  double phi = 0.0;
  std::vector<double> radii;
  std::vector<double> log_moduli;
  double h_estimate = 0.0;
};

/// Finite-sample indicator h_f(phi): the maximum of log|f(r e^{i phi})|/r
/// over the top 10% of `samples` equispaced radii in (0, r_max].
IndicatorEstimate indicator_estimate(const LogFunction& log_f, double phi,
                                     double r_max, int samples = 200);

/// log(f + g) and log(f g) from the logs of f and g.
LogFunction log_sum(LogFunction f, LogFunction g);
LogFunction log_product(LogFunction f, LogFunction g);

/// Reflection below this on every grid point counts as reflectionless.
inline constexpr double kReflectionlessTol = 1e-8;

struct GrowthRow {
  double x = 0.0;
  double rate_minus = 0.0;  // log|factor(-1/x)| / x
  double rate_plus = 0.0;   // log|factor(+1/x)| / x
};

struct GrowthReport {
  int r = 0;
  bool trivial = false;
  bool forward_factor = true;  // e^{alpha} for even r, e^{-alpha} for odd r
  bool growth_detected = false;
  double max_abs_reflection = 0.0;
  std::vector<GrowthRow> rows;
  std::string verdict;
};

/// Growth of the evolution factor along k = +-1/x, x -> infinity. A positive
/// rate on the negative axis is the exponential growth that is incompatible
/// with R_+(., 0) and R_+(., 1) both having nonpositive type.
GrowthReport growth_exponent_witness(const ScatteringData& sd0,
                                     const DispersionLaw& law,
                                     double x_max = 30.0, int samples = 60);

}  // namespace toda
