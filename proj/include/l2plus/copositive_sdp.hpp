#pragma once

#include <vector>

#include "l2plus/conic.hpp"
#include "l2plus/positive_filter.hpp"

namespace l2plus {

/// Handles of the decision variables inside an assembled LMI problem.
struct LmiVariables {
  int P = -1;  // symmetric n_a x n_a
  int S = -1;  // PSD n_q x n_q
  int M = -1;  // entrywise nonnegative n_q x n_q
  int t = -1;  // gamma^2
  int lmi = -1;  // constraint index
};

struct LmiProblem {
  conic::ConicProblem problem;
  LmiVariables vars;
};

/// Builds
///   [P A + A^T P + C^T C,  P B + C^T D;  *,  D^T D - t I]
///     + Sel (S + M) Sel^T  <=  0,
/// minimizing t, where Sel places S + M on the trailing n_p + n_w block.
/// `output_scale` multiplies C_a and D_a before assembly. Without the PSD
/// part the multiplier is M alone and vars.S is -1.
LmiProblem assemble_lmi(const AugmentedSystem& aug, double output_scale = 1.0,
                        bool with_psd_part = true);

/// Values of the decision variables in unscaled units.
struct LmiCertificate {
  Matrix P, S, M;
  double t = 0.0;
  // Residuals measured on the normalized problem that was solved.
  double lmi_max_eig = 0.0;
  double s_min_eig = 0.0;
  double m_min_entry = 0.0;
  // Radius of the box -p_bound I <= P <= p_bound I imposed during the solve
  // and whether the returned P touches it (then gamma may be conservative).
  double p_bound = 0.0;
  bool p_bound_active = false;
};

struct UpperBoundResult {
  double alpha = 0.0;
  int N = 0;
  double gamma = 0.0;
  conic::SolverStatus solver_status = conic::SolverStatus::NumericalFailure;
  double objective_gap = 0.0;
  int iterations = 0;
  std::string message;
  LmiCertificate certificate;

  bool ok() const {
    return solver_status == conic::SolverStatus::Optimal ||
           solver_status == conic::SolverStatus::NearOptimal;
  }
};

/// Upper bound of the L2+ induced norm from the LMI with a degree-N filter
/// of pole alpha; N = 0 gives the filter-free bound and ignores alpha.
/// Retries at 1e-6 tolerances when the first solve fails numerically.
UpperBoundResult upper_bound(const StateSpace& sys, double alpha, int N,
                             const conic::SolverOptions& opts = {});

/// Checks a certificate against the unscaled LMI. Returns the largest
/// eigenvalue of the LMI expression.
double lmi_residual(const StateSpace& sys, double alpha, int N,
                    const LmiCertificate& cert);

struct SweepResult {
  std::vector<UpperBoundResult> cells;  // ordered by alpha, then N
  double best_gamma = 0.0;
  double best_alpha = 0.0;
  int best_N = 0;
  bool any_ok = false;
};

/// Runs every (alpha, N) cell with N in {0, ..., N_max}. Failed cells keep
/// their status and a NaN gamma. `threads` > 1 solves cells concurrently.
SweepResult sweep(const StateSpace& sys, const std::vector<double>& alphas,
                  int N_max, const conic::SolverOptions& opts = {},
                  int threads = 1);

}  // namespace l2plus
