#pragma once

#include <vector>

#include "l2plus/state_space.hpp"

namespace l2plus {

enum class PeakKind { AtZero, AtFinite, AtInfinity };

const char* to_string(PeakKind kind);

/// Where the L2 induced norm is attained and the maximizing input direction.
struct PeakInfo {
  PeakKind kind = PeakKind::AtZero;
  double omega = 0.0;  // rad/s; 0 for AtZero, +inf for AtInfinity
  double gain = 0.0;
  CVector v;  // unit right singular vector, largest-modulus entry real > 0
  /// Other frequencies whose local peak matches the gain within 1e-6.
  std::vector<double> other_peaks;
};

/// Evaluation point for max_singular.
struct Frequency {
  enum class Kind { Zero, Finite, Infinity } kind = Kind::Zero;
  double omega = 0.0;

  static Frequency zero() { return {Kind::Zero, 0.0}; }
  static Frequency infinity() { return {Kind::Infinity, 0.0}; }
  static Frequency at(double w) { return {Kind::Finite, w}; }
};

struct SingularPair {
  double sigma = 0.0;
  CVector v;
};

/// Rotates v by a global phase so its largest-modulus entry is real and
/// positive (ties within 1e-12 go to the lowest index).
void normalize_phase(CVector& v);

/// Largest singular value of G at the given frequency and its unit right
/// singular vector (real-valued for Zero/Infinity).
SingularPair max_singular(const StateSpace& sys, Frequency at);

/// sigma_max of a real matrix with its phase-normalized right singular vector.
SingularPair max_singular(const Matrix& M);

/// L2 induced norm (H-infinity norm) by Hamiltonian bisection followed by a
/// golden-section polish of sigma_max(G(jw)) between the imaginary-axis
/// crossings. rel_tol in (0, 1e-2].
PeakInfo hinf_norm(const StateSpace& sys, double rel_tol = 1e-9);

}  // namespace l2plus
