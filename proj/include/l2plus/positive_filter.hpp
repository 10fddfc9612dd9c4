#pragma once

#include "l2plus/state_space.hpp"

namespace l2plus {

/// Internally positive filter  x_p' = A_p x_p + B_p w  with
/// A_p = J(alpha, N) kron I_{n_w}, B_p = e_N kron I_{n_w}, where J is the
/// N x N upper bidiagonal block with alpha on the diagonal and ones above it.
struct PositiveFilter {
  double alpha = -1.0;
  int degree = 0;
  Eigen::Index n_w = 1;
  Matrix A_p;
  Matrix B_p;

  Eigen::Index n_p() const { return A_p.rows(); }
};

/// G augmented with the filter:
///   A_a = diag(A, A_p), B_a = [B; B_p], C_a = [C 0], D_a = D.
/// The nonnegative signal exploited by the multiplier is z_p = [x_p; w].
struct AugmentedSystem {
  Matrix A_a;
  Matrix B_a;
  Matrix C_a;
  Matrix D_a;
  Eigen::Index n = 0;    // plant states
  Eigen::Index n_p = 0;  // filter states
  Eigen::Index n_w = 0;

  Eigen::Index n_a() const { return n + n_p; }
  /// Size of the nonnegative block z_p.
  Eigen::Index n_q() const { return n_p + n_w; }

  StateSpace as_state_space() const;
};

/// Throws InvalidArgument for alpha >= 0, negative degree or n_w < 1.
PositiveFilter build_filter(double alpha, int degree, Eigen::Index n_w);

AugmentedSystem augment(const StateSpace& sys, const PositiveFilter& filter);

}  // namespace l2plus
