#include "toda/jacobi.hpp"

namespace toda {

Eigen::VectorXd JacobiOperator::apply(int lo, const Eigen::VectorXd& f) const {
  const auto len = f.size();
  Eigen::VectorXd out(len + 2);
  // Output covers [lo-1, lo+len].
  for (Eigen::Index i = 0; i < len + 2; ++i) {
    const int n = lo - 1 + static_cast<int>(i);
    const auto val = [&](int m) {
      const auto j = static_cast<Eigen::Index>(m - lo);
      return (j >= 0 && j < len) ? f(j) : 0.0;
    };
    out(i) = state_.a(n) * val(n + 1) + state_.a(n - 1) * val(n - 1) +
             state_.b(n) * val(n);
  }
  return out;
}

Eigen::MatrixXd JacobiOperator::dense(int lo, int hi) const {
  return dense_jacobi(state_, lo, hi);
}

Eigen::MatrixXd dense_jacobi(const LatticeState& state, int lo, int hi) {
  const Eigen::Index n = hi - lo + 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int site = lo + static_cast<int>(i);
    H(i, i) = state.b(site);
    if (i + 1 < n) {
      H(i, i + 1) = state.a(site);
      H(i + 1, i) = state.a(site);
    }
  }
  return H;
}

}  // namespace toda
