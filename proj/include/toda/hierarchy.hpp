#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "toda/core.hpp"

namespace toda {

/// Order r and summation constants c_0..c_{r+1} of TL_r, with c_0 = 1 and
/// c_{r+1} = 0.
class HierarchyCoeffs {
 public:
  HierarchyCoeffs(int r, std::vector<double> c);

  /// c_j = 0 for 1 <= j <= r.
  static HierarchyCoeffs homogeneous(int r);

  int r() const { return r_; }
  std::span<const double> c() const { return c_; }
  double c(int j) const { return c_[static_cast<std::size_t>(j)]; }

 private:
  int r_;
  std::vector<double> c_;
};

/// <delta_n, H^l delta_m>, computed by l banded applications of H to
/// delta_m on a local window of radius l. Zero when |n - m| > l.
double matrix_element(const LatticeState& state, int l, int n, int m);

/// g~_l, h~_l and the summed g_j, h_j for 0 <= j <= r+1 on sites [lo, hi].
struct HierarchyFields {
  int r = 0;
  int lo = 0;
  int hi = -1;
  // Indexed [j][n - lo].
  std::vector<std::vector<double>> g_tilde;
  std::vector<std::vector<double>> h_tilde;
  std::vector<std::vector<double>> g;
  std::vector<std::vector<double>> h;

  double g_at(int j, int n) const { return g[idx(j)][pos(n)]; }
  double h_at(int j, int n) const { return h[idx(j)][pos(n)]; }
  double g_tilde_at(int l, int n) const { return g_tilde[idx(l)][pos(n)]; }
  double h_tilde_at(int l, int n) const { return h_tilde[idx(l)][pos(n)]; }

 private:
  static std::size_t idx(int j) { return static_cast<std::size_t>(j); }
  std::size_t pos(int n) const { return static_cast<std::size_t>(n - lo); }
};

HierarchyFields hierarchy_fields(const LatticeState& state,
                                 const HierarchyCoeffs& coeffs, int lo, int hi);

/// Time derivatives of (a, b) on the state's window.
struct FieldValues {
  std::vector<double> a_dot;
  std::vector<double> b_dot;
};

/// TL_r vector field:
///   a_dot(n) = a(n) (g_{r+1}(n+1) - g_{r+1}(n)),
///   b_dot(n) = h_{r+1}(n) - h_{r+1}(n-1).
/// Sites are evaluated in parallel; outside-window values use the background.
FieldValues tl_field(const LatticeState& state, const HierarchyCoeffs& coeffs);

/// Banded skew-symmetric P_{2r+2} = sum_j c_{r-j} ([H^{j+1}]_+ - [H^{j+1}]_-)
/// stored densely over sites [lo, hi].
struct LaxOperator {
  int order = 0;
  int lo = 0;
  Eigen::MatrixXd P;

  int hi() const { return lo + static_cast<int>(P.rows()) - 1; }
  double at(int m, int n) const { return P(m - lo, n - lo); }
};

LaxOperator lax_operator(const LatticeState& state,
                         const HierarchyCoeffs& coeffs, int lo, int hi);
/// Over the state's own window.
LaxOperator lax_operator(const LatticeState& state,
                         const HierarchyCoeffs& coeffs);

/// rho_dot(n) = rho(n) (rho(n+1)^2 - rho(n-1)^2) on the window.
std::vector<double> kvm_field(const KvMState& state);

/// kvm_field = kKvmScale * (a-component of TL_1 on the b = 0 embedding).
/// Confirmed by a least-squares fit over random states in the tests.
inline constexpr double kKvmScale = 1.0;

/// a = rho, b = 0, background (rho0, 0). Requires an odd order and checks
/// that the TL_{2r+1} b-component vanishes on the embedding.
LatticeState kvm_embed(const KvMState& state, const HierarchyCoeffs& coeffs,
                       double tol = 1e-12);

namespace reference {

/// Single-threaded tl_field kept as the reference for the OpenMP kernel.
FieldValues tl_field_serial(const LatticeState& state,
                            const HierarchyCoeffs& coeffs);

}  // namespace reference

}  // namespace toda
