#include "toda/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "toda/jacobi.hpp"

namespace toda {

namespace {

// Repeated banded application of H to delta_n on the local window
// [n - radius, n + radius]. After l steps the support is [n-l, n+l], so
// every entry stays exact while l <= radius.
class LocalPowers {
 public:
  LocalPowers(const LatticeState& state, int center, int radius)
      : state_(state), lo_(center - radius),
        cur_(static_cast<std::size_t>(2 * radius + 1), 0.0),
        next_(cur_.size(), 0.0) {
    cur_[static_cast<std::size_t>(radius)] = 1.0;
  }

  double at(int m) const {
    const int i = m - lo_;
    return (i >= 0 && i < static_cast<int>(cur_.size()))
               ? cur_[static_cast<std::size_t>(i)]
               : 0.0;
  }

  void step() {
    const int len = static_cast<int>(cur_.size());
    for (int i = 0; i < len; ++i) {
      const int m = lo_ + i;
      double v = state_.b(m) * cur_[static_cast<std::size_t>(i)];
      if (i + 1 < len) v += state_.a(m) * cur_[static_cast<std::size_t>(i + 1)];
      if (i > 0) v += state_.a(m - 1) * cur_[static_cast<std::size_t>(i - 1)];
      next_[static_cast<std::size_t>(i)] = v;
    }
    cur_.swap(next_);
  }

 private:
  const LatticeState& state_;
  int lo_;
  std::vector<double> cur_;
  std::vector<double> next_;
};

// g~_l(n) and <delta_{n+1}, H^l delta_n> for l = 0..max_l.
void site_moments(const LatticeState& state, int n, int max_l, double* diag,
                  double* upper) {
  LocalPowers p(state, n, max_l + 1);
  for (int l = 0; l <= max_l; ++l) {
    if (l > 0) p.step();
    diag[l] = p.at(n);
    upper[l] = p.at(n + 1);
  }
}

double summed(const HierarchyCoeffs& coeffs, int j, const double* tilde) {
  double s = 0.0;
  for (int l = 0; l <= j; ++l) s += coeffs.c(j - l) * tilde[l];
  return s;
}

// g_{r+1} on [lo, hi+1] and h_{r+1} on [lo, hi] written to g_out / h_out;
// sites in [first, last) of that range only.
void top_fields_range(const LatticeState& state, const HierarchyCoeffs& coeffs,
                      int lo, int first, int last, double* g_out,
                      double* h_out, int h_count) {
  const int top = coeffs.r() + 1;
  std::vector<double> diag(static_cast<std::size_t>(top + 1));
  std::vector<double> upper(static_cast<std::size_t>(top + 1));
  for (int i = first; i < last; ++i) {
    const int n = lo + i;
    site_moments(state, n, top, diag.data(), upper.data());
    g_out[i] = summed(coeffs, top, diag.data());
    if (i < h_count) {
      for (double& u : upper) u *= 2.0 * state.a(n);
      h_out[i] = summed(coeffs, top, upper.data());
    }
  }
}

FieldValues assemble(const LatticeState& state, const std::vector<double>& g,
                     const std::vector<double>& h) {
  // g covers [n_min-1, n_max+1], h covers [n_min-1, n_max].
  const std::size_t len = state.size();
  FieldValues out{std::vector<double>(len), std::vector<double>(len)};
  for (std::size_t i = 0; i < len; ++i) {
    const int n = state.n_min() + static_cast<int>(i);
    out.a_dot[i] = state.a(n) * (g[i + 2] - g[i + 1]);
    out.b_dot[i] = h[i + 1] - h[i];
  }
  return out;
}

}  // namespace

HierarchyCoeffs::HierarchyCoeffs(int r, std::vector<double> c)
    : r_(r), c_(std::move(c)) {
  if (r_ < 0) throw InvalidState("hierarchy order must be nonnegative");
  if (c_.size() != static_cast<std::size_t>(r_ + 2)) {
    std::ostringstream os;
    os << "hierarchy order " << r_ << " needs " << r_ + 2
       << " constants, got " << c_.size();
    throw InvalidState(os.str());
  }
  if (c_.front() != 1.0) throw InvalidState("c_0 must equal 1");
  if (c_.back() != 0.0) throw InvalidState("c_{r+1} must equal 0");
  for (double v : c_)
    if (!std::isfinite(v)) throw InvalidState("non-finite hierarchy constant");
}

HierarchyCoeffs HierarchyCoeffs::homogeneous(int r) {
  if (r < 0) throw InvalidState("hierarchy order must be nonnegative");
  std::vector<double> c(static_cast<std::size_t>(r + 2), 0.0);
  c.front() = 1.0;
  return {r, std::move(c)};
}

double matrix_element(const LatticeState& state, int l, int n, int m) {
  if (l < 0) throw DomainError("matrix_element: negative power");
  if (std::abs(n - m) > l) return 0.0;
  LocalPowers p(state, m, l);
  for (int i = 0; i < l; ++i) p.step();
  return p.at(n);
}

HierarchyFields hierarchy_fields(const LatticeState& state,
                                 const HierarchyCoeffs& coeffs, int lo,
                                 int hi) {
  HierarchyFields f;
  f.r = coeffs.r();
  f.lo = lo;
  f.hi = hi;
  const int top = coeffs.r() + 1;
  const auto width = static_cast<std::size_t>(std::max(0, hi - lo + 1));
  const auto levels = static_cast<std::size_t>(top + 1);
  f.g_tilde.assign(levels, std::vector<double>(width));
  f.h_tilde.assign(levels, std::vector<double>(width));
  f.g.assign(levels, std::vector<double>(width));
  f.h.assign(levels, std::vector<double>(width));

  const int count = static_cast<int>(width);
#pragma omp parallel for schedule(static) if (count > 256)
  for (int i = 0; i < count; ++i) {
    const int n = lo + i;
    std::vector<double> diag(levels), upper(levels);
    site_moments(state, n, top, diag.data(), upper.data());
    for (std::size_t l = 0; l < levels; ++l) {
      f.g_tilde[l][static_cast<std::size_t>(i)] = diag[l];
      f.h_tilde[l][static_cast<std::size_t>(i)] = 2.0 * state.a(n) * upper[l];
    }
  }
  for (int j = 0; j <= top; ++j) {
    for (std::size_t i = 0; i < width; ++i) {
      double g = 0.0, h = 0.0;
      for (int l = 0; l <= j; ++l) {
        g += coeffs.c(j - l) * f.g_tilde[static_cast<std::size_t>(l)][i];
        h += coeffs.c(j - l) * f.h_tilde[static_cast<std::size_t>(l)][i];
      }
      f.g[static_cast<std::size_t>(j)][i] = g;
      f.h[static_cast<std::size_t>(j)][i] = h;
    }
  }
  return f;
}

FieldValues tl_field(const LatticeState& state, const HierarchyCoeffs& coeffs) {
  const int lo = state.n_min() - 1;
  const int g_count = static_cast<int>(state.size()) + 3;
  const int h_count = g_count - 1;
  std::vector<double> g(static_cast<std::size_t>(g_count));
  std::vector<double> h(static_cast<std::size_t>(g_count));

#pragma omp parallel if (g_count > 256)
  {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
    const int nth = omp_get_num_threads();
#else
    const int tid = 0;
    const int nth = 1;
#endif
    const int chunk = (g_count + nth - 1) / nth;
    const int first = std::min(g_count, tid * chunk);
    const int last = std::min(g_count, first + chunk);
    top_fields_range(state, coeffs, lo, first, last, g.data(), h.data(),
                     h_count);
  }
  h.resize(static_cast<std::size_t>(h_count));
  return assemble(state, g, h);
}

namespace reference {

FieldValues tl_field_serial(const LatticeState& state,
                            const HierarchyCoeffs& coeffs) {
  const int lo = state.n_min() - 1;
  const int g_count = static_cast<int>(state.size()) + 3;
  const int h_count = g_count - 1;
  std::vector<double> g(static_cast<std::size_t>(g_count));
  std::vector<double> h(static_cast<std::size_t>(g_count));
  top_fields_range(state, coeffs, lo, 0, g_count, g.data(), h.data(), h_count);
  h.resize(static_cast<std::size_t>(h_count));
  return assemble(state, g, h);
}

}  // namespace reference

LaxOperator lax_operator(const LatticeState& state,
                         const HierarchyCoeffs& coeffs, int lo, int hi) {
  const int r = coeffs.r();
  const int pad = r + 1;
  // Entries of H^p on [lo, hi] are exact when computed on [lo-p, hi+p].
  const Eigen::MatrixXd H = dense_jacobi(state, lo - pad, hi + pad);
  const Eigen::Index n = hi - lo + 1;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd power = H;
  for (int j = 0; j <= r; ++j) {
    if (j > 0) power = power * H;
    const double weight = coeffs.c(r - j);
    if (weight == 0.0) continue;
    const auto block = power.block(pad, pad, n, n);
    for (Eigen::Index row = 0; row < n; ++row)
      for (Eigen::Index col = row + 1; col < n; ++col)
        P(row, col) += weight * block(row, col);
  }
  for (Eigen::Index row = 0; row < n; ++row)
    for (Eigen::Index col = row + 1; col < n; ++col) P(col, row) = -P(row, col);
  return {r, lo, std::move(P)};
}

LaxOperator lax_operator(const LatticeState& state,
                         const HierarchyCoeffs& coeffs) {
  return lax_operator(state, coeffs, state.n_min(), state.n_max());
}

std::vector<double> kvm_field(const KvMState& state) {
  std::vector<double> out(state.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int n = state.n_min() + static_cast<int>(i);
    const double up = state.rho(n + 1);
    const double down = state.rho(n - 1);
    out[i] = state.rho(n) * (up * up - down * down);
  }
  return out;
}

LatticeState kvm_embed(const KvMState& state, const HierarchyCoeffs& coeffs,
                       double tol) {
  if (coeffs.r() % 2 == 0)
    throw DomainError("kvm_embed: the Kac-van Moerbeke reduction needs an odd order");
  std::vector<double> a(state.rho_values().begin(), state.rho_values().end());
  std::vector<double> b(a.size(), 0.0);
  LatticeState embedded(state.n_min(), std::move(a), std::move(b), state.rho0(),
                        0.0, state.t());
  const FieldValues field = tl_field(embedded, coeffs);
  double worst = 0.0;
  for (double v : field.b_dot) worst = std::max(worst, std::abs(v));
  if (worst > tol) {
    std::ostringstream os;
    os << "kvm_embed: b-component of TL_" << coeffs.r() << " is " << worst
       << " on the b = 0 embedding (check the summation constants)";
    throw ReductionInconsistency(os.str());
  }
  return embedded;
}

}  // namespace toda
