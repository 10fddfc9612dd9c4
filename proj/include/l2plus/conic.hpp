#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "l2plus/state_space.hpp"

namespace l2plus::conic {

enum class VarKind { FreeSymmetric, PsdSymmetric, NonnegSymmetric, Scalar };

/// A block of decision variables. Symmetric groups store their upper
/// triangle only; entry (r, c) and (c, r) share one scalar.
struct VariableGroup {
  std::string name;
  VarKind kind = VarKind::Scalar;
  int dim = 1;
  int offset = 0;  // index of the first scalar in the decision vector

  int count() const { return kind == VarKind::Scalar ? 1 : dim * (dim + 1) / 2; }
  /// Scalar index of entry (r, c).
  int index(int r, int c) const;
};

/// Symmetric rank-two term  coef * (f_a f_b^T + f_b f_a^T) / 2.
///
/// Factor indices below the constraint size denote unit vectors; index
/// size + k denotes column k of the constraint's factor matrix. Keeping
/// coefficient matrices in this form makes Schur-complement assembly cost
/// O(#terms^2) per variable pair instead of a dense k^3 product.
struct Dyad {
  int a = 0;
  int b = 0;
  double coef = 0.0;
};

struct Constraint {
  enum class Sense { NegSemidefinite, Zero };
  Sense sense = Sense::NegSemidefinite;
  int size = 0;
  Matrix factors;  // size x (#extra factor vectors)
  std::vector<Dyad> constant;
  struct Term {
    int var;
    Dyad dyad;
  };
  std::vector<Term> terms;

  /// Dense value of the constant part (var = -1) or of one variable's
  /// coefficient matrix.
  Matrix coefficient(int var) const;
};

/// Minimize c^T x subject to affine symmetric-matrix constraints
///   F_0 + sum_i x_i F_i  <= 0  (or = 0)
/// and cone membership of the declared variable groups.
class ConicProblem {
 public:
  int add_variable(std::string name, VarKind kind, int dim = 1);
  const VariableGroup& group(int id) const { return groups_.at(id); }
  const std::vector<VariableGroup>& groups() const { return groups_; }
  int num_scalars() const { return num_scalars_; }

  int add_constraint(int size, Constraint::Sense sense,
                     Matrix factors = Matrix());
  const std::vector<Constraint>& constraints() const { return constraints_; }

  /// Adds coef * (f_a f_b^T + f_b f_a^T)/2 to the constant or to the
  /// coefficient of scalar variable `var` (var = -1 means constant).
  void add_dyad(int constraint, int var, int a, int b, double coef);
  /// Adds `value` at entries (r, c) and (c, r) of a coefficient matrix.
  void add_entry(int constraint, int var, int r, int c, double value);

  void set_objective(int var, double coef);
  const Vector& objective() const { return objective_; }

  /// Evaluates F_0 + sum x_i F_i for one constraint.
  Matrix evaluate(int constraint, const Vector& x) const;

 private:
  std::vector<VariableGroup> groups_;
  std::vector<Constraint> constraints_;
  Vector objective_;
  int num_scalars_ = 0;
};

/// Plain-text sparse dump, one line per upper-triangular nonzero:
///   constraint-index row col variable-id coefficient
/// variable-id 0 is the constant term, i + 1 is scalar variable i. Header
/// lines start with '#'.
void write_triplets(std::ostream& os, const ConicProblem& problem);

enum class SolverStatus { Optimal, NearOptimal, Infeasible, NumericalFailure };

const char* to_string(SolverStatus status);

struct SolverOptions {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  int max_iters = 100;
  bool verbose = false;
  /// Optional starting point. Used when every cone constraint holds
  /// strictly there; ignored otherwise.
  Vector start;
};

struct ConicSolution {
  SolverStatus status = SolverStatus::NumericalFailure;
  double objective = 0.0;      // c^T x at the returned point
  double objective_gap = 0.0;  // complementarity <X, Z> at termination
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  std::string message;  // reason for a non-optimal termination
  Vector x;

  /// Symmetric matrix (or 1x1 scalar) value of a variable group.
  Matrix value(const VariableGroup& group) const;
};

/// Primal-dual interior-point method (Nesterov-Todd direction, Mehrotra
/// predictor-corrector) on the standard-form SDP obtained by treating every
/// constraint and cone-typed group as one block of the slack cone.
ConicSolution solve_conic(const ConicProblem& problem,
                          const SolverOptions& options = {});

}  // namespace l2plus::conic
