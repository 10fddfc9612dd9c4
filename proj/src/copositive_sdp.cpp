#include "l2plus/copositive_sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "l2plus/hinf.hpp"

namespace l2plus {

LmiProblem assemble_lmi(const AugmentedSystem& aug, double output_scale,
                        bool with_psd_part) {
  const int n = static_cast<int>(aug.n);
  const int n_a = static_cast<int>(aug.n_a());
  const int n_w = static_cast<int>(aug.n_w);
  const int n_q = static_cast<int>(aug.n_q());
  const int n_z = static_cast<int>(aug.C_a.rows());
  if (aug.A_a.rows() != n_a || aug.A_a.cols() != n_a || aug.B_a.rows() != n_a ||
      aug.B_a.cols() != n_w || aug.C_a.cols() != n_a || aug.D_a.rows() != n_z ||
      aug.D_a.cols() != n_w) {
    throw Error(ErrorKind::DimensionMismatch, "inconsistent augmented system");
  }
  const int K = n_a + n_w;

  // Factor columns: rows of [A_a B_a], then columns of s [C_a D_a]^T.
  Matrix factors(K, n_a + n_z);
  factors.leftCols(n_a).topRows(n_a) = aug.A_a.transpose();
  factors.leftCols(n_a).bottomRows(n_w) = aug.B_a.transpose();
  factors.rightCols(n_z).topRows(n_a) = output_scale * aug.C_a.transpose();
  factors.rightCols(n_z).bottomRows(n_w) = output_scale * aug.D_a.transpose();

  LmiProblem out;
  auto& prob = out.problem;
  auto& v = out.vars;
  if (n_a > 0) v.P = prob.add_variable("P", conic::VarKind::FreeSymmetric, n_a);
  if (with_psd_part) {
    v.S = prob.add_variable("S", conic::VarKind::PsdSymmetric, n_q);
  }
  v.M = prob.add_variable("M", conic::VarKind::NonnegSymmetric, n_q);
  v.t = prob.add_variable("t", conic::VarKind::Scalar);
  prob.set_objective(prob.group(v.t).offset, 1.0);
  v.lmi = prob.add_constraint(K, conic::Constraint::Sense::NegSemidefinite,
                              factors);

  // [C D]^T [C D] as a sum of rank-one dyads.
  for (int j = 0; j < n_z; ++j) {
    prob.add_dyad(v.lmi, -1, K + n_a + j, K + n_a + j, 1.0);
  }
  // P enters as E1^T P V + V^T P E1 with E1 = [I 0], V = [A_a B_a].
  if (n_a > 0) {
    const auto& gP = prob.group(v.P);
    for (int l = 0; l < n_a; ++l) {
      for (int k = 0; k <= l; ++k) {
        const int var = gP.index(k, l);
        prob.add_dyad(v.lmi, var, k, K + l, 2.0);
        if (k != l) prob.add_dyad(v.lmi, var, l, K + k, 2.0);
      }
    }
  }
  const int t_var = prob.group(v.t).offset;
  for (int i = 0; i < n_w; ++i) {
    prob.add_entry(v.lmi, t_var, n_a + i, n_a + i, -1.0);
  }
  for (int group : {v.S, v.M}) {
    if (group < 0) continue;
    const auto& g = prob.group(group);
    for (int c = 0; c < n_q; ++c) {
      for (int r = 0; r <= c; ++r) {
        prob.add_entry(v.lmi, g.index(r, c), n + r, n + c, 1.0);
      }
    }
  }
  return out;
}

namespace {

AugmentedSystem augmented_for(const StateSpace& sys, double alpha, int N) {
  if (N < 0) {
    throw Error(ErrorKind::InvalidArgument,
                "NegativeDegree: filter degree must be >= 0");
  }
  // The pole is irrelevant without filter states.
  const double pole = N == 0 ? -1.0 : alpha;
  return augment(sys, build_filter(pole, N, sys.n_w()));
}

double max_eig(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double min_eig(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Norm of the solution of A_a^T P + P A_a + C^T C + I = 0, a natural scale
// for P in the normalized problem.
double lyapunov_scale(const AugmentedSystem& aug, double scale) {
  const Matrix Cs = scale * aug.C_a;
  const auto n_a = aug.n_a();
  return lyapunov(aug.A_a, Cs.transpose() * Cs + Matrix::Identity(n_a, n_a))
      .norm();
}

// -rho I <= P <= rho I as two extra blocks.
void add_box(LmiProblem& lp, double rho) {
  auto& prob = lp.problem;
  const auto& gP = prob.group(lp.vars.P);
  const int n_a = gP.dim;
  for (double sign : {1.0, -1.0}) {
    const int c =
        prob.add_constraint(n_a, conic::Constraint::Sense::NegSemidefinite);
    for (int i = 0; i < n_a; ++i) prob.add_entry(c, -1, i, i, -rho);
    for (int l = 0; l < n_a; ++l) {
      for (int k = 0; k <= l; ++k) {
        prob.add_entry(c, gP.index(k, l), k, l, sign);
      }
    }
  }
}

constexpr int kBoxGrowths = 4;

// One solve of the S-free LMI with the box -rho I <= P <= rho I (no box
// when rho = 0). Fills everything in `res` except alpha and N.
void solve_boxed(const AugmentedSystem& aug, double scale, double rho,
                 const conic::SolverOptions& opts, UpperBoundResult& res) {
  LmiProblem lp = assemble_lmi(aug, scale, false);
  if (rho > 0.0) add_box(lp, rho);
  conic::ConicSolution sol = conic::solve_conic(lp.problem, opts);
  if (sol.status == conic::SolverStatus::NumericalFailure) {
    conic::SolverOptions loose = opts;
    loose.abs_tol = std::max(opts.abs_tol, 1e-6);
    loose.rel_tol = std::max(opts.rel_tol, 1e-6);
    sol = conic::solve_conic(lp.problem, loose);
  }
  res.solver_status = sol.status;
  res.iterations = sol.iterations;
  res.message = sol.message;
  const double s2 = scale * scale;
  res.objective_gap = sol.objective_gap / s2;
  res.certificate = {};
  if (sol.x.size() == 0 || sol.status == conic::SolverStatus::Infeasible) {
    res.gamma = std::numeric_limits<double>::quiet_NaN();
    return;
  }

  const auto& prob = lp.problem;
  const double t_scaled = sol.x(prob.group(lp.vars.t).offset);
  res.gamma = std::sqrt(std::max(0.0, t_scaled)) / scale;
  auto& cert = res.certificate;
  cert.t = t_scaled / s2;
  const Matrix P = lp.vars.P >= 0 ? sol.value(prob.group(lp.vars.P))
                                   : Matrix(0, 0);
  cert.P = P / s2;
  cert.p_bound = rho / s2;
  cert.p_bound_active =
      P.size() > 0 && P.cwiseAbs().rowwise().sum().maxCoeff() >= 0.99 * rho &&
      std::max(max_eig(P), -min_eig(P)) >= 0.99 * rho;
  const Matrix S = lp.vars.S >= 0 ? sol.value(prob.group(lp.vars.S))
                                   : Matrix(Matrix::Zero(aug.n_q(), aug.n_q()));
  const Matrix M = sol.value(prob.group(lp.vars.M));
  cert.S = S / s2;
  cert.M = M / s2;
  cert.lmi_max_eig = max_eig(prob.evaluate(lp.vars.lmi, sol.x));
  cert.s_min_eig = min_eig(S);
  cert.m_min_entry = M.size() ? M.minCoeff() : 0.0;
}

}  // namespace

UpperBoundResult upper_bound(const StateSpace& sys, double alpha, int N,
                             const conic::SolverOptions& opts) {
  validate(sys);
  if (!is_hurwitz(sys.A)) {
    throw Error(ErrorKind::UnstableSystem, "A is not Hurwitz");
  }
  const AugmentedSystem aug = augmented_for(sys, alpha, N);
  const double norm = hinf_norm(sys).gain;
  const double scale = 1.0 / std::max(1.0, norm);

  UpperBoundResult res;
  res.alpha = alpha;
  res.N = N;
  // A PSD term only tightens the constraint, so S = 0 at every optimum
  // and dropping it leaves the optimal value unchanged.
  // The optimal face can be unbounded in P, which stalls the interior
  // point iterates. A box at the natural scale of P keeps them bounded;
  // any point inside it is still a valid certificate. When the returned P
  // touches the box the box is enlarged and the problem solved again.
  const bool has_P = aug.n_a() > 0;
  double rho = has_P ? std::max(1.0, lyapunov_scale(aug, scale)) : 0.0;
  for (int attempt = 0;; ++attempt) {
    solve_boxed(aug, scale, rho, opts, res);
    if (!res.ok() || !res.certificate.p_bound_active || attempt == kBoxGrowths) {
      break;
    }
    rho *= 10.0;
  }
  return res;
}

double lmi_residual(const StateSpace& sys, double alpha, int N,
                    const LmiCertificate& cert) {
  const AugmentedSystem aug = augmented_for(sys, alpha, N);
  const auto n_a = aug.n_a();
  const auto n_w = aug.n_w;
  const auto n_q = aug.n_q();
  const auto K = n_a + n_w;
  Matrix CD(aug.C_a.rows(), K);
  CD << aug.C_a, aug.D_a;
  Matrix V(n_a, K);
  V << aug.A_a, aug.B_a;
  Matrix L = CD.transpose() * CD;
  if (n_a > 0) {
    const Matrix PV = cert.P * V;
    L.topRows(n_a) += PV;
    L.leftCols(n_a) += PV.transpose();
  }
  L.bottomRightCorner(n_w, n_w) -= cert.t * Matrix::Identity(n_w, n_w);
  L.bottomRightCorner(n_q, n_q) += cert.S + cert.M;
  return max_eig(L);
}

SweepResult sweep(const StateSpace& sys, const std::vector<double>& alphas,
                  int N_max, const conic::SolverOptions& opts, int threads) {
  validate(sys);
  if (!is_hurwitz(sys.A)) {
    throw Error(ErrorKind::UnstableSystem, "A is not Hurwitz");
  }
  if (N_max < 0) {
    throw Error(ErrorKind::InvalidArgument,
                "NegativeDegree: filter degree must be >= 0");
  }
  SweepResult out;
  const std::size_t per_alpha = static_cast<std::size_t>(N_max) + 1;
  out.cells.resize(alphas.size() * per_alpha);

  auto run_cell = [&](double alpha, int N) {
    try {
      return upper_bound(sys, alpha, N, opts);
    } catch (const Error& e) {
      UpperBoundResult r;
      r.alpha = alpha;
      r.N = N;
      r.gamma = std::numeric_limits<double>::quiet_NaN();
      r.solver_status = e.kind() == ErrorKind::Infeasible
                            ? conic::SolverStatus::Infeasible
                            : conic::SolverStatus::NumericalFailure;
      r.message = e.what();
      return r;
    }
  };

  // The filter-free cell does not depend on alpha; solve it once.
  if (!alphas.empty()) {
    const UpperBoundResult base = run_cell(alphas.front(), 0);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      out.cells[a * per_alpha] = base;
      out.cells[a * per_alpha].alpha = alphas[a];
    }
  }
  std::vector<std::size_t> todo;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (int N = 1; N <= N_max; ++N) todo.push_back(a * per_alpha + N);
  }
  std::mutex mtx;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t idx;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (next >= todo.size()) return;
        idx = todo[next++];
      }
      const std::size_t a = idx / per_alpha;
      const int N = static_cast<int>(idx % per_alpha);
      out.cells[idx] = run_cell(alphas[a], N);
    }
  };
  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  out.best_gamma = std::numeric_limits<double>::infinity();
  for (const auto& c : out.cells) {
    if (c.ok() && c.gamma < out.best_gamma) {
      out.best_gamma = c.gamma;
      out.best_alpha = c.alpha;
      out.best_N = c.N;
      out.any_ok = true;
    }
  }
  if (!out.any_ok) out.best_gamma = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace l2plus
