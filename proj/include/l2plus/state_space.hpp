#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "l2plus/errors.hpp"

namespace l2plus {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Continuous-time LTI system  x' = A x + B w,  z = C x + D w.
///
/// n = 0 is a static gain z = D w; A, B, C are then empty with the right
/// outer dimensions (0x0, 0 x n_w, n_z x 0).
struct StateSpace {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;
  std::string name;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index n_w() const { return D.cols(); }
  Eigen::Index n_z() const { return D.rows(); }

  /// Static gain system (n = 0).
  static StateSpace static_gain(const Matrix& D);
};

/// Checks shapes and finiteness; returns the system unchanged on success.
/// Throws Error{DimensionMismatch | NonFiniteEntry}.
const StateSpace& validate(const StateSpace& sys);

/// All eigenvalues strictly in the open left half plane. An empty matrix
/// counts as Hurwitz.
bool is_hurwitz(const Matrix& A);

/// Largest real part of the eigenvalues of A (-inf for n = 0).
double spectral_abscissa(const Matrix& A);

/// Off-diagonal entries nonnegative.
bool is_metzler(const Matrix& A);

/// A Metzler and B, C, D entrywise nonnegative.
bool is_internally_positive(const StateSpace& sys);

/// Numerical evidence of external positivity: D >= 0 and the impulse
/// response C exp(A t) B sampled on {0, step, ..., horizon} is >= -1e-9.
/// A sampled check cannot certify the continuum condition; a true result is
/// evidence, a false result is a counterexample.
bool is_externally_positive_sampled(const StateSpace& sys, double horizon,
                                    double step);

/// G(jw) = C (jwI - A)^{-1} B + D.
CMatrix freq_response(const StateSpace& sys, double omega);

/// G(0) = D - C A^{-1} B (real).
Matrix dc_gain(const StateSpace& sys);

/// Block-diagonal realization of sys1 - sys2.
StateSpace subtract(const StateSpace& sys1, const StateSpace& sys2);

/// Scale the output map: returns c * G.
StateSpace scale(const StateSpace& sys, double c);

/// Matrix exponential (scaling and squaring with Pade approximation).
Matrix expm(const Matrix& M);

/// Solution X of  A^T X + X A + Q = 0  (Bartels-Stewart on the complex
/// Schur form). Throws InvalidArgument if A has eigenvalues summing to zero.
Matrix lyapunov(const Matrix& A, const Matrix& Q);

}  // namespace l2plus
