#pragma once

#include <Eigen/Dense>

#include "toda/core.hpp"

namespace toda {

/// Jacobi operator (Hf)(n) = a(n) f(n+1) + a(n-1) f(n-1) + b(n) f(n)
/// built from a lattice state. Holds the state by value.
class JacobiOperator {
 public:
  explicit JacobiOperator(LatticeState state) : state_(std::move(state)) {}

  const LatticeState& state() const { return state_; }

  /// H applied to f given on sites [lo, lo + f.size()); f is taken as zero
  /// outside that range.
  Eigen::VectorXd apply(int lo, const Eigen::VectorXd& f) const;

  /// Dense truncation on sites [lo, hi]; entry (i, j) = <delta_{lo+i}, H delta_{lo+j}>.
  Eigen::MatrixXd dense(int lo, int hi) const;

 private:
  LatticeState state_;
};

/// Dense truncation of H on [lo, hi] without any background requirement.
Eigen::MatrixXd dense_jacobi(const LatticeState& state, int lo, int hi);

}  // namespace toda
