#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace toda {

// Base for every domain failure raised by the library. The CLI maps these
// to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InvalidState : Error { using Error::Error; };
struct GuardBandViolation : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };
struct ReductionInconsistency : Error { using Error::Error; };
struct UnnormalizedBackground : Error { using Error::Error; };
struct BandEdgeError : Error { using Error::Error; };
struct LocalizationError : Error { using Error::Error; };
struct InsufficientSignal : Error { using Error::Error; };
struct BranchTrackingFailure : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };
struct WindowTooSmall : Error { using Error::Error; };
struct InsufficientTail : Error { using Error::Error; };
struct NumericalContradiction : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

/// Finite-window samples of the Flaschka variables (a, b) over Z.
///
/// The window holds a(n), b(n) for n_min <= n <= n_max. Every site outside
/// the window carries the constant background (a0, b0), so accessors are
/// total over Z. a(n) > 0 is checked at construction.
class LatticeState {
 public:
  LatticeState(int n_min, std::vector<double> a, std::vector<double> b,
               double a0, double b0, double t = 0.0);

  /// Window [n_min, n_min+len) filled with the background.
  static LatticeState constant(int n_min, int len, double a0 = 0.5,
                               double b0 = 0.0, double t = 0.0);

  int n_min() const { return n_min_; }
  int n_max() const { return n_min_ + static_cast<int>(a_.size()) - 1; }
  std::size_t size() const { return a_.size(); }
  bool in_window(int n) const { return n >= n_min_ && n <= n_max(); }

  double a(int n) const { return in_window(n) ? a_[idx(n)] : a0_; }
  double b(int n) const { return in_window(n) ? b_[idx(n)] : b0_; }

  std::span<const double> a_values() const { return a_; }
  std::span<const double> b_values() const { return b_; }

  double a0() const { return a0_; }
  double b0() const { return b0_; }
  double t() const { return t_; }

  LatticeState with_time(double t) const;
  /// Same window and background, new samples (validated).
  LatticeState with_values(std::vector<double> a, std::vector<double> b) const;

 private:
  std::size_t idx(int n) const { return static_cast<std::size_t>(n - n_min_); }

  int n_min_;
  std::vector<double> a_;
  std::vector<double> b_;
  double a0_;
  double b0_;
  double t_;
};

/// Kac-van Moerbeke lattice state: a single positive sequence rho.
class KvMState {
 public:
  KvMState(int n_min, std::vector<double> rho, double rho0, double t = 0.0);

  static KvMState constant(int n_min, int len, double rho0, double t = 0.0);

  int n_min() const { return n_min_; }
  int n_max() const { return n_min_ + static_cast<int>(rho_.size()) - 1; }
  std::size_t size() const { return rho_.size(); }
  bool in_window(int n) const { return n >= n_min_ && n <= n_max(); }

  double rho(int n) const {
    return in_window(n) ? rho_[static_cast<std::size_t>(n - n_min_)] : rho0_;
  }
  std::span<const double> rho_values() const { return rho_; }
  double rho0() const { return rho0_; }
  double t() const { return t_; }

  KvMState with_time(double t) const;
  KvMState with_values(std::vector<double> rho) const;

 private:
  int n_min_;
  std::vector<double> rho_;
  double rho0_;
  double t_;
};

/// (a(n), b(n)); the background for n outside the window.
std::pair<double, double> access(const LatticeState& state, int n);

/// Rescales H -> (H - b0)/(2 a0) so the background becomes (1/2, 0).
LatticeState normalize(const LatticeState& state);

/// Half-line reflection: a~(n) = a(-n-1), b~(n) = b(-n), t -> -t.
LatticeState reflect(const LatticeState& state);

/// Element-wise comparison over the union of both windows and the
/// backgrounds, with absolute tolerance.
bool approx_equal(const LatticeState& lhs, const LatticeState& rhs,
                  double tol = 1e-12);

/// max_n |a(n)-a0| + |b(n)-b0| over the window.
double max_deviation(const LatticeState& state);

}  // namespace toda
