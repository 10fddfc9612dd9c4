#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "l2plus/copositive_sdp.hpp"
#include "l2plus/harmonic.hpp"

namespace l2plus {

struct CertifyOptions {
  std::vector<double> alphas{-0.8, -1.0, -1.2};
  int max_degree = 15;
  int max_harmonics = 200;
  double solver_tol = 1e-8;
  GridOptions grid;
  int threads = 0;  // 0 uses every hardware thread
  bool upper = true;
  bool lower = true;
};

/// Both bounds on the L2+ induced norm with the L2 norm for reference.
struct BoundsReport {
  std::string system_name;
  PeakInfo peak;
  double l2_norm = 0.0;
  std::vector<UpperBoundResult> upper_bounds;
  std::vector<UpsilonResult> lower_bounds;
  // NaN when no cell succeeded / no lower bound was computed.
  double best_upper;
  double best_alpha = 0.0;
  int best_N = 0;
  double best_lower;
  double best_lower_omega = 0.0;
  int best_lower_N = 0;
  double relative_gap;
  /// l2_norm / sqrt2, the bound every system attains.
  double uniform_floor = 0.0;
  bool exceeds_uniform_floor = false;

  BoundsReport();
  bool has_upper() const;
  bool has_lower() const;
};

/// (upper - lower) / upper, 0 when both vanish.
double relative_gap(double upper, double lower);

/// Runs the (alpha, N) sweep and the harmonic sequence. Throws
/// UnstableSystem; failed sweep cells stay in the table with their status.
BoundsReport certify(const StateSpace& sys, const CertifyOptions& opts = {});

/// Versioned JSON ("schema": 1), deterministic for equal inputs.
std::string report_json(const BoundsReport& report);

/// Writes "table,alpha,N,value,omega,status" rows for both tables.
void write_report_csv(std::ostream& os, const BoundsReport& report);

}  // namespace l2plus
