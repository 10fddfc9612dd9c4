#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "l2plus/conic.hpp"
#include "l2plus/hinf.hpp"

namespace l2plus {

/// Fourier coefficients of the rectified cosine max(2 cos t, 0)
///   = a0 + cos t + sum_{m>=2} a_m cos(m t).
struct HarmonicCoefficients {
  double a0 = 0.0;
  /// a[m] for m = 0..N; a[0] = a0, a[1] = 1, a[m] = 0 for odd m >= 3.
  std::vector<double> a;

  int N() const { return static_cast<int>(a.size()) - 1; }
};

/// Throws InvalidArgument for N < 1.
HarmonicCoefficients fourier_coeffs(int N);

/// Partial Parseval sum 2 a0^2 + 1 + sum_{m=2}^N a_m^2 (tends to 2).
double parseval_check(int N);

/// Input directions v^[0..N] derived from the peak direction.
struct HarmonicDirections {
  PeakKind kind = PeakKind::AtZero;
  CVector v;
  std::vector<CVector> vs;
};

/// AtFinite: v^[m]_i = |v_i| e^{j m theta_i}. AtZero and AtInfinity: v for
/// odd m and v_abs for even m, with the sign of the real v chosen so that
/// |v_+| >= |v_-|.
HarmonicDirections harmonic_directions(const PeakInfo& peak, int N);

struct GridOptions {
  int points_per_decade = 200;
  double decades_below = 3.0;
  double decades_above = 3.0;
  double polish_rel_tol = 1e-6;
};

struct UpsilonResult {
  int N = 0;
  double upsilon = 0.0;
  /// Maximizing frequency; 0 and +inf stand for the limits.
  double omega = 0.0;
};

/// Harmonic lower bound
///   sup_w sqrt(2 a0^2 |G(0) v^[0]|^2 + |G(jw) v^[1]|^2
///              + sum_{m>=2} a_m^2 |G(jmw) v^[m]|^2) / sqrt(2)
/// over a log grid around the peak scale, the w -> 0 limit (and w -> inf
/// for AtInfinity peaks), refined by golden-section search.
/// Throws UnstableSystem.
UpsilonResult upsilon(const StateSpace& sys, int N, const GridOptions& grid = {});

/// upsilon for N in {1, 2, 4, ..., N_max}; every N also tries the previous
/// maximizer, so the sequence is non-decreasing.
std::vector<UpsilonResult> upsilon_sequence(const StateSpace& sys, int N_max,
                                            const GridOptions& grid = {});

/// Objective h_N(w) on the grid used by upsilon. Writes "omega,h" rows.
void write_upsilon_curve_csv(std::ostream& os, const StateSpace& sys, int N,
                             const GridOptions& grid = {});
/// Writes "N,upsilon,omega" rows.
void write_upsilon_table_csv(std::ostream& os,
                             const std::vector<UpsilonResult>& rows);

/// max of (1/sqrt2) sqrt(||M||^2 + |M v_abs|^2) and |M v_+| / |v_+|.
/// Throws InvalidArgument for a zero or empty matrix.
double matrix_l2plus_lower(const Matrix& M);

struct BruteForceOptions {
  std::uint64_t seed = 1;
  int random_starts = 100;
  int max_iters = 5000;
  int max_columns = 6;
};

/// max |M x| over x >= 0, |x| = 1 by multi-start projected ascent. The
/// returned value is attained, so it never exceeds the true L2+ norm.
/// Throws InvalidArgument when M has more than max_columns columns.
double matrix_l2plus_bruteforce(const Matrix& M,
                                const BruteForceOptions& opts = {});

struct SipResult {
  double value = 0.0;
  /// a[m] for m = 0..N with a[1] = 1.
  std::vector<double> coeffs;
  conic::SolverStatus status = conic::SolverStatus::NumericalFailure;
};

/// min 2 a0^2 + 1 + sum_{m=2}^N a_m^2 subject to
/// a0 + cos t + sum a_m cos(m t) >= 0 on a uniform grid over [0, pi].
/// Throws InvalidArgument for N < 2 or grid_points < 100 and NumericalFailure
/// when the solver fails.
SipResult sip_qp_oracle(int N, int grid_points,
                        const conic::SolverOptions& opts = {});

}  // namespace l2plus
