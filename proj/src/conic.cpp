#include "l2plus/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <ostream>

namespace l2plus::conic {

// ---------------------------------------------------------------------------
// Problem description
// ---------------------------------------------------------------------------

int VariableGroup::index(int r, int c) const {
  if (kind == VarKind::Scalar) return offset;
  if (r > c) std::swap(r, c);
  if (r < 0 || c >= dim) {
    throw Error(ErrorKind::DimensionMismatch, "entry outside group " + name);
  }
  // Column-major upper triangle.
  return offset + c * (c + 1) / 2 + r;
}

Matrix Constraint::coefficient(int var) const {
  Matrix F = Matrix::Zero(size, size);
  auto accumulate = [&](const Dyad& d) {
    auto factor = [&](int idx) -> Vector {
      if (idx < size) return Vector::Unit(size, idx);
      return factors.col(idx - size);
    };
    const Vector fa = factor(d.a);
    const Vector fb = factor(d.b);
    F.noalias() += 0.5 * d.coef * (fa * fb.transpose() + fb * fa.transpose());
  };
  if (var < 0) {
    for (const auto& d : constant) accumulate(d);
  } else {
    for (const auto& t : terms) {
      if (t.var == var) accumulate(t.dyad);
    }
  }
  return F;
}

int ConicProblem::add_variable(std::string name, VarKind kind, int dim) {
  if (dim < 1 && kind != VarKind::Scalar) {
    throw Error(ErrorKind::InvalidArgument, "variable dimension must be >= 1");
  }
  VariableGroup g;
  g.name = std::move(name);
  g.kind = kind;
  g.dim = kind == VarKind::Scalar ? 1 : dim;
  g.offset = num_scalars_;
  num_scalars_ += g.count();
  groups_.push_back(std::move(g));
  Vector grown = Vector::Zero(num_scalars_);
  grown.head(objective_.size()) = objective_;
  objective_ = std::move(grown);
  return static_cast<int>(groups_.size()) - 1;
}

int ConicProblem::add_constraint(int size, Constraint::Sense sense,
                                 Matrix factors) {
  if (size < 1) {
    throw Error(ErrorKind::InvalidArgument, "constraint size must be >= 1");
  }
  if (factors.size() == 0) factors.resize(size, 0);
  if (factors.rows() != size) {
    throw Error(ErrorKind::DimensionMismatch,
                "factor matrix rows must equal the constraint size");
  }
  Constraint c;
  c.sense = sense;
  c.size = size;
  c.factors = std::move(factors);
  constraints_.push_back(std::move(c));
  return static_cast<int>(constraints_.size()) - 1;
}

void ConicProblem::add_dyad(int constraint, int var, int a, int b,
                            double coef) {
  auto& c = constraints_.at(constraint);
  const int nf = c.size + static_cast<int>(c.factors.cols());
  if (a < 0 || b < 0 || a >= nf || b >= nf) {
    throw Error(ErrorKind::DimensionMismatch, "dyad factor index out of range");
  }
  if (var >= num_scalars_) {
    throw Error(ErrorKind::DimensionMismatch, "unknown variable index");
  }
  if (coef == 0.0) return;
  if (var < 0) {
    c.constant.push_back({a, b, coef});
  } else {
    c.terms.push_back({var, {a, b, coef}});
  }
}

void ConicProblem::add_entry(int constraint, int var, int r, int c,
                             double value) {
  // (r,c) and (c,r) both get `value`: 2 * sym(e_r e_c^T) off the diagonal.
  add_dyad(constraint, var, r, c, r == c ? value : 2.0 * value);
}

void ConicProblem::set_objective(int var, double coef) {
  objective_(var) = coef;
}

Matrix ConicProblem::evaluate(int constraint, const Vector& x) const {
  const auto& c = constraints_.at(constraint);
  Matrix F = c.coefficient(-1);
  // Group terms by variable via a dense accumulation of dyads.
  for (const auto& t : c.terms) {
    const double xv = x(t.var);
    if (xv == 0.0) continue;
    auto factor = [&](int idx) -> Vector {
      if (idx < c.size) return Vector::Unit(c.size, idx);
      return c.factors.col(idx - c.size);
    };
    const Vector fa = factor(t.dyad.a);
    const Vector fb = factor(t.dyad.b);
    F.noalias() +=
        0.5 * xv * t.dyad.coef * (fa * fb.transpose() + fb * fa.transpose());
  }
  return F;
}

void write_triplets(std::ostream& os, const ConicProblem& problem) {
  os << "# constraint-index row col variable-id coefficient\n";
  for (const auto& g : problem.groups()) {
    const char* kind = "scalar";
    switch (g.kind) {
      case VarKind::FreeSymmetric: kind = "free-symmetric"; break;
      case VarKind::PsdSymmetric: kind = "psd-symmetric"; break;
      case VarKind::NonnegSymmetric: kind = "nonneg-symmetric"; break;
      case VarKind::Scalar: break;
    }
    os << "# variable " << g.name << ' ' << kind << " dim " << g.dim
       << " ids " << g.offset + 1 << ".." << g.offset + g.count() << '\n';
  }
  const Vector& c = problem.objective();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c(i) != 0.0) os << "# objective " << i + 1 << ' ' << c(i) << '\n';
  }
  os << std::setprecision(17);
  const auto& cons = problem.constraints();
  for (std::size_t k = 0; k < cons.size(); ++k) {
    const auto& con = cons[k];
    os << "# constraint " << k << " size " << con.size << ' '
       << (con.sense == Constraint::Sense::Zero ? "zero" : "nsd") << '\n';
    std::vector<int> vars;
    for (const auto& t : con.terms) vars.push_back(t.var);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    vars.insert(vars.begin(), -1);
    for (int var : vars) {
      const Matrix F = con.coefficient(var);
      for (int col = 0; col < con.size; ++col) {
        for (int row = 0; row <= col; ++row) {
          if (F(row, col) != 0.0) {
            os << k << ' ' << row << ' ' << col << ' ' << var + 1 << ' '
               << F(row, col) << '\n';
          }
        }
      }
    }
  }
}

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Optimal: return "Optimal";
    case SolverStatus::NearOptimal: return "NearOptimal";
    case SolverStatus::Infeasible: return "Infeasible";
    case SolverStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

Matrix ConicSolution::value(const VariableGroup& group) const {
  if (group.kind == VarKind::Scalar) {
    return Matrix::Constant(1, 1, x(group.offset));
  }
  Matrix M(group.dim, group.dim);
  for (int c = 0; c < group.dim; ++c) {
    for (int r = 0; r <= c; ++r) {
      M(r, c) = M(c, r) = x(group.index(r, c));
    }
  }
  return M;
}

// ---------------------------------------------------------------------------
// Standard form:  maximize b^T y  s.t.  Z_j = C_j - sum_i y_i A_ij in cone.
// ---------------------------------------------------------------------------

namespace {

struct PsdBlock {
  int k = 0;
  Matrix W;  // extra factor vectors
  Matrix C;  // dense constant
  std::vector<int> vars;
  std::vector<int> start;  // dyad range of vars[p] is [start[p], start[p+1])
  std::vector<Dyad> dyads;

  int nf() const { return k + static_cast<int>(W.cols()); }

  // F^T M F for F = [I W].
  Matrix gram(const Matrix& M) const {
    const int nw = static_cast<int>(W.cols());
    Matrix G(nf(), nf());
    G.topLeftCorner(k, k) = M;
    if (nw > 0) {
      const Matrix MW = M * W;
      G.topRightCorner(k, nw) = MW;
      G.bottomLeftCorner(nw, k) = MW.transpose();
      G.bottomRightCorner(nw, nw) = W.transpose() * MW;
    }
    return G;
  }

  // Adds <A_i, M> to out(i); M symmetric.
  void apply(const Matrix& M, Vector& out) const {
    const Matrix G = gram(M);
    for (std::size_t p = 0; p < vars.size(); ++p) {
      double acc = 0.0;
      for (int s = start[p]; s < start[p + 1]; ++s) {
        acc += dyads[s].coef * G(dyads[s].a, dyads[s].b);
      }
      out(vars[p]) += acc;
    }
  }

  // sum_i y_i A_i.
  Matrix adjoint(const Vector& y) const {
    Matrix S = Matrix::Zero(nf(), nf());
    for (std::size_t p = 0; p < vars.size(); ++p) {
      const double yi = y(vars[p]);
      if (yi == 0.0) continue;
      for (int s = start[p]; s < start[p + 1]; ++s) {
        const double h = 0.5 * yi * dyads[s].coef;
        S(dyads[s].a, dyads[s].b) += h;
        S(dyads[s].b, dyads[s].a) += h;
      }
    }
    const int nw = static_cast<int>(W.cols());
    Matrix out = S.topLeftCorner(k, k);
    if (nw > 0) {
      const Matrix cross = S.topRightCorner(k, nw) * W.transpose();
      out += cross + cross.transpose();
      out.noalias() += W * S.bottomRightCorner(nw, nw) * W.transpose();
    }
    return out;
  }

  // H(i,j) += tr(A_i W A_j W) from the Gram matrix G = F^T W F. Only the
  // lower triangle of H is written. Column p of Y holds the dyads of all
  // variables evaluated against W A_p W, so H(q,p) is a segment sum of Y.
  void schur(const Matrix& G, Matrix& H) const {
    const int nd = static_cast<int>(dyads.size());
    const int nv = static_cast<int>(vars.size());
    if (nd == 0) return;
    Matrix Ga(nd, nf()), Gb(nd, nf());
    for (int t = 0; t < nd; ++t) {
      Ga.row(t) = G.row(dyads[t].a);
      Gb.row(t) = G.row(dyads[t].b);
    }
    constexpr int kChunk = 64;
    Matrix Y(nd, kChunk);
    for (int p0 = 0; p0 < nv; p0 += kChunk) {
      const int width = std::min(kChunk, nv - p0);
      Y.leftCols(width).setZero();
      for (int c = 0; c < width; ++c) {
        const int p = p0 + c;
        for (int s = start[p]; s < start[p + 1]; ++s) {
          const int a = dyads[s].a;
          const int b = dyads[s].b;
          Y.col(c).array() += 0.5 * dyads[s].coef *
                              (Ga.col(b).array() * Gb.col(a).array() +
                               Gb.col(b).array() * Ga.col(a).array());
        }
      }
      for (int c = 0; c < width; ++c) {
        const int p = p0 + c;
        const double* y = Y.col(c).data();
        for (int q = p; q < nv; ++q) {
          double acc = 0.0;
          for (int t = start[q]; t < start[q + 1]; ++t) {
            acc += dyads[t].coef * y[t];
          }
          H(vars[q], vars[p]) += acc;
        }
      }
    }
  }
};

struct LpBlock {
  Vector c;
  std::vector<std::vector<std::pair<int, double>>> rows;  // z = c - A y

  int size() const { return static_cast<int>(c.size()); }

  void apply(const Vector& x, Vector& out) const {
    for (int r = 0; r < size(); ++r) {
      for (const auto& [i, a] : rows[r]) out(i) += a * x(r);
    }
  }
  Vector adjoint(const Vector& y) const {
    Vector out = Vector::Zero(size());
    for (int r = 0; r < size(); ++r) {
      for (const auto& [i, a] : rows[r]) out(r) += a * y(i);
    }
    return out;
  }
  void schur(const Vector& ratio, Matrix& H) const {
    for (int r = 0; r < size(); ++r) {
      const auto& row = rows[r];
      for (std::size_t q = 0; q < row.size(); ++q) {
        for (std::size_t p = 0; p < row.size(); ++p) {
          const int gi = row[p].first;
          const int gj = row[q].first;
          if (gi < gj) continue;
          H(gi, gj) += row[p].second * row[q].second * ratio(r);
        }
      }
    }
  }
};

struct StandardForm {
  int m = 0;
  Vector b;
  double b_offset = 0.0;  // objective constant from eliminated equalities
  std::vector<PsdBlock> psd;
  LpBlock lp;
  // x = x0 + N y when equalities were eliminated; identity otherwise.
  bool reduced = false;
  Vector x0;
  Matrix N;
};

struct RawBlock {
  int k = 0;
  Matrix W;
  std::vector<Dyad> constant;  // C = -constant(dyads) for NSD constraints
  std::vector<std::pair<int, Dyad>> terms;
};

PsdBlock finalize_block(RawBlock raw) {
  PsdBlock blk;
  blk.k = raw.k;
  blk.W = std::move(raw.W);
  // Materialize C.
  Matrix C = Matrix::Zero(blk.k, blk.k);
  for (const auto& d : raw.constant) {
    auto factor = [&](int idx) -> Vector {
      if (idx < blk.k) return Vector::Unit(blk.k, idx);
      return blk.W.col(idx - blk.k);
    };
    const Vector fa = factor(d.a);
    const Vector fb = factor(d.b);
    C.noalias() += 0.5 * d.coef * (fa * fb.transpose() + fb * fa.transpose());
  }
  blk.C = std::move(C);
  std::stable_sort(raw.terms.begin(), raw.terms.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  for (const auto& [var, dyad] : raw.terms) {
    if (blk.vars.empty() || blk.vars.back() != var) {
      blk.vars.push_back(var);
      blk.start.push_back(static_cast<int>(blk.dyads.size()));
    }
    blk.dyads.push_back(dyad);
  }
  blk.start.push_back(static_cast<int>(blk.dyads.size()));
  return blk;
}

// Equality constraints E x = f, one row per upper-triangular entry.
void collect_equalities(const ConicProblem& problem, Matrix& E, Vector& f) {
  std::vector<Vector> rows;
  std::vector<double> rhs;
  const int m = problem.num_scalars();
  for (const auto& con : problem.constraints()) {
    if (con.sense != Constraint::Sense::Zero) continue;
    const Matrix F0 = con.coefficient(-1);
    std::vector<Matrix> coeff(m);
    for (int i = 0; i < m; ++i) coeff[i] = con.coefficient(i);
    for (int c = 0; c < con.size; ++c) {
      for (int r = 0; r <= c; ++r) {
        Vector row(m);
        for (int i = 0; i < m; ++i) row(i) = coeff[i](r, c);
        rows.push_back(std::move(row));
        rhs.push_back(-F0(r, c));
      }
    }
  }
  E.resize(static_cast<Eigen::Index>(rows.size()), m);
  f.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    E.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    f(static_cast<Eigen::Index>(r)) = rhs[r];
  }
}

StandardForm build_standard_form(const ConicProblem& problem,
                                 std::string& message) {
  const int n_x = problem.num_scalars();
  std::vector<RawBlock> raw;
  // Scalar slack rows z = c - sum a_i x_i.
  std::vector<std::pair<double, std::vector<std::pair<int, double>>>> lp_rows;
  bool has_equalities = false;

  for (const auto& con : problem.constraints()) {
    if (con.sense == Constraint::Sense::Zero) {
      has_equalities = true;
      continue;
    }
    if (con.size == 1 && con.factors.cols() == 0) {
      // A scalar inequality is a nonnegative slack, not a 1x1 PSD block.
      std::map<int, double> coef;
      double c0 = 0.0;
      for (const auto& d : con.constant) c0 -= d.coef;
      for (const auto& t : con.terms) coef[t.var] += t.dyad.coef;
      std::vector<std::pair<int, double>> row(coef.begin(), coef.end());
      lp_rows.push_back({c0, std::move(row)});
      continue;
    }
    RawBlock blk;
    blk.k = con.size;
    blk.W = con.factors;
    for (auto d : con.constant) {
      d.coef = -d.coef;
      blk.constant.push_back(d);
    }
    for (const auto& t : con.terms) blk.terms.emplace_back(t.var, t.dyad);
    raw.push_back(std::move(blk));
  }
  for (const auto& g : problem.groups()) {
    if (g.kind == VarKind::PsdSymmetric) {
      RawBlock blk;
      blk.k = g.dim;
      blk.W.resize(g.dim, 0);
      for (int c = 0; c < g.dim; ++c) {
        for (int r = 0; r <= c; ++r) {
          blk.terms.emplace_back(g.index(r, c),
                                 Dyad{r, c, r == c ? -1.0 : -2.0});
        }
      }
      raw.push_back(std::move(blk));
    } else if (g.kind == VarKind::NonnegSymmetric) {
      for (int i = 0; i < g.count(); ++i) {
        lp_rows.push_back({0.0, {{g.offset + i, -1.0}}});
      }
    }
  }

  StandardForm sf;
  const Vector& c = problem.objective();
  if (!has_equalities) {
    sf.m = n_x;
    sf.b = -c;
    for (auto& blk : raw) sf.psd.push_back(finalize_block(std::move(blk)));
    sf.lp.c.resize(static_cast<Eigen::Index>(lp_rows.size()));
    for (std::size_t r = 0; r < lp_rows.size(); ++r) {
      sf.lp.c(static_cast<Eigen::Index>(r)) = lp_rows[r].first;
      sf.lp.rows.push_back(std::move(lp_rows[r].second));
    }
    return sf;
  }

  // x = x0 + N y with N an orthonormal basis of ker E.
  Matrix E;
  Vector f;
  collect_equalities(problem, E, f);
  Eigen::ColPivHouseholderQR<Matrix> qr_e(E);
  qr_e.setThreshold(1e-12);
  const Vector x0 = qr_e.solve(f);
  if ((E * x0 - f).norm() > 1e-9 * (1.0 + f.norm())) {
    message = "equality constraints are inconsistent";
    sf.m = -1;
    return sf;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr_t(E.transpose());
  qr_t.setThreshold(1e-12);
  const int rank = static_cast<int>(qr_t.rank());
  const Matrix Q = qr_t.householderQ() * Matrix::Identity(n_x, n_x);
  sf.N = Q.rightCols(n_x - rank);
  sf.x0 = x0;
  sf.reduced = true;
  sf.m = n_x - rank;
  sf.b = -sf.N.transpose() * c;
  sf.b_offset = -c.dot(x0);

  for (auto& blk : raw) {
    RawBlock red;
    red.k = blk.k;
    red.W = blk.W;
    red.constant = blk.constant;
    for (const auto& [var, dyad] : blk.terms) {
      // C' = C - x0_i A_i
      if (x0(var) != 0.0) {
        red.constant.push_back({dyad.a, dyad.b, -x0(var) * dyad.coef});
      }
      for (int j = 0; j < sf.m; ++j) {
        const double w = sf.N(var, j);
        if (std::abs(w) > 1e-14) {
          red.terms.emplace_back(j, Dyad{dyad.a, dyad.b, w * dyad.coef});
        }
      }
    }
    sf.psd.push_back(finalize_block(std::move(red)));
  }
  sf.lp.c = Vector::Zero(static_cast<Eigen::Index>(lp_rows.size()));
  for (std::size_t r = 0; r < lp_rows.size(); ++r) {
    std::vector<std::pair<int, double>> reduced_row;
    Vector dense = Vector::Zero(sf.m);
    double shift = 0.0;
    for (const auto& [var, a] : lp_rows[r].second) {
      shift += a * x0(var);
      dense += a * sf.N.row(var).transpose();
    }
    sf.lp.c(static_cast<Eigen::Index>(r)) = lp_rows[r].first - shift;
    for (int j = 0; j < sf.m; ++j) {
      if (std::abs(dense(j)) > 1e-14) reduced_row.emplace_back(j, dense(j));
    }
    sf.lp.rows.push_back(std::move(reduced_row));
  }
  return sf;
}

// Largest alpha with V + alpha dV PSD (capped at 1e6).
double max_step_psd(const Matrix& V, const Matrix& dV) {
  Eigen::LLT<Matrix> llt(V);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix L = llt.matrixL();
  Matrix tmp = L.triangularView<Eigen::Lower>().solve(dV);
  Matrix M = L.triangularView<Eigen::Lower>().solve(tmp.transpose());
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return 1e6;
  return std::min(1e6, -1.0 / lmin);
}

double max_step_lp(const Vector& v, const Vector& dv) {
  double alpha = 1e6;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& sf, const SolverOptions& opts)
      : sf_(sf), opts_(opts) {}

  ConicSolution run();

 private:
  struct Direction {
    std::vector<Matrix> dX, dZ;
    Vector dx_lp, dz_lp;
    Vector dy;
  };

  void initialize();
  bool nt_scaling(std::size_t j);
  Vector schur_operator(const Vector& v) const;
  Vector apply_A(const std::vector<Matrix>& Ms, const Vector& v_lp) const;
  Direction solve_direction(const std::vector<Matrix>& T, const Vector& T_lp,
                            const std::vector<Matrix>& Rd, const Vector& Rd_lp,
                            const Vector& rp) const;

  const StandardForm& sf_;
  SolverOptions opts_;

  std::vector<Matrix> X_, Z_;
  // Nesterov-Todd scaling per block: W = G G^T with G^{-1} X G^{-T} =
  // G^T Z G = diag(d), so W Z W = X.
  std::vector<Matrix> W_, G_, Ginv_;
  std::vector<Vector> d_;
  Vector x_lp_, z_lp_, y_;
  Matrix H_;  // lower triangle of the Schur complement
  Eigen::LLT<Matrix> schur_;
  double nu_ = 0.0;
};

void InteriorPoint::initialize() {
  const int m = sf_.m;
  y_ = Vector::Zero(m);
  X_.clear();
  Z_.clear();
  nu_ = 0.0;
  for (const auto& blk : sf_.psd) {
    // ||A_i||_F^2 from the Gram matrix of the factors with themselves.
    const Matrix GF = blk.gram(Matrix::Identity(blk.k, blk.k));
    double max_norm_a = 0.0;
    double ratio = 0.0;
    for (std::size_t p = 0; p < blk.vars.size(); ++p) {
      double acc = 0.0;
      for (int s = blk.start[p]; s < blk.start[p + 1]; ++s) {
        const int a = blk.dyads[s].a, b = blk.dyads[s].b;
        for (int t = blk.start[p]; t < blk.start[p + 1]; ++t) {
          const int c = blk.dyads[t].a, d = blk.dyads[t].b;
          acc += blk.dyads[s].coef * blk.dyads[t].coef *
                 (GF(b, c) * GF(d, a) + GF(b, d) * GF(c, a) +
                  GF(a, c) * GF(d, b) + GF(a, d) * GF(c, b));
        }
      }
      const double norm_a = std::sqrt(std::max(0.0, 0.25 * acc));
      max_norm_a = std::max(max_norm_a, norm_a);
      ratio = std::max(ratio, (1.0 + std::abs(sf_.b(blk.vars[p]))) /
                                  (1.0 + norm_a));
    }
    const double k = blk.k;
    const double xi = std::max({10.0, std::sqrt(k), k * ratio});
    const double eta =
        std::max({10.0, std::sqrt(k), max_norm_a, blk.C.norm()});
    X_.push_back(xi * Matrix::Identity(blk.k, blk.k));
    Z_.push_back(eta * Matrix::Identity(blk.k, blk.k));
    nu_ += k;
  }
  const int r = sf_.lp.size();
  if (r > 0) {
    double max_norm_a = 0.0;
    double ratio = 0.0;
    Vector col_norm2 = Vector::Zero(m);
    for (int row = 0; row < r; ++row) {
      for (const auto& [i, a] : sf_.lp.rows[row]) col_norm2(i) += a * a;
    }
    for (int i = 0; i < m; ++i) {
      if (col_norm2(i) == 0.0) continue;
      const double na = std::sqrt(col_norm2(i));
      max_norm_a = std::max(max_norm_a, na);
      ratio = std::max(ratio, (1.0 + std::abs(sf_.b(i))) / (1.0 + na));
    }
    const double k = r;
    const double xi = std::max({10.0, std::sqrt(k), k * ratio});
    const double eta =
        std::max({10.0, std::sqrt(k), max_norm_a, sf_.lp.c.norm()});
    x_lp_ = Vector::Constant(r, xi);
    z_lp_ = Vector::Constant(r, eta);
    nu_ += k;
  } else {
    x_lp_.resize(0);
    z_lp_.resize(0);
  }

  // A strictly feasible start replaces the slack part of the default point.
  const Vector& x_start = opts_.start;
  if (x_start.size() != (sf_.reduced ? sf_.N.rows() : m)) return;
  const Vector y0 = sf_.reduced ? Vector(sf_.N.transpose() * (x_start - sf_.x0))
                                : x_start;
  std::vector<Matrix> Z0;
  for (const auto& blk : sf_.psd) {
    Z0.push_back(blk.C - blk.adjoint(y0));
    Eigen::LLT<Matrix> llt(Z0.back());
    if (llt.info() != Eigen::Success) return;
  }
  Vector z0;
  if (r > 0) {
    z0 = sf_.lp.c - sf_.lp.adjoint(y0);
    if (z0.minCoeff() <= 0.0) return;
  }
  y_ = y0;
  Z_ = std::move(Z0);
  if (r > 0) z_lp_ = z0;
}

bool InteriorPoint::nt_scaling(std::size_t j) {
  Eigen::LLT<Matrix> lx(X_[j]);
  Eigen::LLT<Matrix> lz(Z_[j]);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const Matrix L = lx.matrixL();
  const Matrix R = lz.matrixL();
  Eigen::JacobiSVD<Matrix> svd(R.transpose() * L,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  if (sv.minCoeff() <= 0.0) return false;
  const Vector isq = sv.cwiseSqrt().cwiseInverse();
  G_[j] = L * svd.matrixV() * isq.asDiagonal();
  Ginv_[j] = isq.asDiagonal() * svd.matrixU().transpose() * R.transpose();
  W_[j] = G_[j] * G_[j].transpose();
  d_[j] = sv;
  return true;
}

// A(W A^T(v) W) plus the LP analogue, i.e. H v without forming H.
Vector InteriorPoint::schur_operator(const Vector& v) const {
  Vector out = Vector::Zero(sf_.m);
  for (std::size_t j = 0; j < sf_.psd.size(); ++j) {
    const Matrix M = W_[j] * sf_.psd[j].adjoint(v) * W_[j];
    sf_.psd[j].apply(0.5 * (M + M.transpose()), out);
  }
  if (sf_.lp.size() > 0) {
    const Vector ratio = (x_lp_.array() / z_lp_.array()).matrix();
    const Vector u = (ratio.array() * sf_.lp.adjoint(v).array()).matrix();
    sf_.lp.apply(u, out);
  }
  return out;
}

Vector InteriorPoint::apply_A(const std::vector<Matrix>& Ms,
                              const Vector& v_lp) const {
  Vector out = Vector::Zero(sf_.m);
  for (std::size_t j = 0; j < sf_.psd.size(); ++j) {
    const Matrix sym = 0.5 * (Ms[j] + Ms[j].transpose());
    sf_.psd[j].apply(sym, out);
  }
  if (sf_.lp.size() > 0) sf_.lp.apply(v_lp, out);
  return out;
}

// Scaled complementarity dX + W dZ W = R. With T = R - W Rd W:
//   H dy = rp - A(T),  dZ = Rd - A^T dy,  dX = T + W (A^T dy) W.
InteriorPoint::Direction InteriorPoint::solve_direction(
    const std::vector<Matrix>& T, const Vector& T_lp,
    const std::vector<Matrix>& Rd, const Vector& Rd_lp, const Vector& rp) const {
  Direction d;
  const Vector rhs = rp - apply_A(T, T_lp);
  d.dy = schur_.solve(rhs);
  // Iterative refinement with the residual taken from the operator itself,
  // so that A(dX) = rp holds to working precision even when H is
  // ill-conditioned.
  double prev = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < 3; ++sweep) {
    const Vector res = rhs - schur_operator(d.dy);
    const double norm = res.norm();
    if (!(norm < 0.5 * prev) || norm <= 1e-15 * rhs.norm()) break;
    prev = norm;
    d.dy += schur_.solve(res);
  }
  for (std::size_t j = 0; j < sf_.psd.size(); ++j) {
    const Matrix Aty = sf_.psd[j].adjoint(d.dy);
    d.dZ.push_back(Rd[j] - Aty);
    Matrix dX = T[j] + W_[j] * Aty * W_[j];
    d.dX.push_back(0.5 * (dX + dX.transpose()));
  }
  if (sf_.lp.size() > 0) {
    const Vector Aty = sf_.lp.adjoint(d.dy);
    d.dz_lp = Rd_lp - Aty;
    d.dx_lp = T_lp + (x_lp_.array() * Aty.array() / z_lp_.array()).matrix();
  }
  return d;
}

ConicSolution InteriorPoint::run() {
  initialize();
  const int m = sf_.m;
  const std::size_t nb = sf_.psd.size();
  const bool has_lp = sf_.lp.size() > 0;

  double norm_b = sf_.b.norm();
  double norm_c = sf_.lp.c.squaredNorm();
  for (const auto& blk : sf_.psd) norm_c += blk.C.squaredNorm();
  norm_c = std::sqrt(norm_c);

  ConicSolution sol;
  sol.status = SolverStatus::NumericalFailure;
  const double near_tol = std::max(1e-6, 100.0 * opts_.rel_tol);

  struct Snapshot {
    double score = std::numeric_limits<double>::infinity();
    Vector y;
    double gap = 0, relgap = 0, pinf = 0, dinf = 0, dobj = 0;
  } best;

  double prev_step = 1.0;
  int stall = 0;
  int since_progress = 0;
  for (int iter = 0; iter <= opts_.max_iters; ++iter) {
    sol.iterations = iter;
    W_.resize(nb);
    G_.resize(nb);
    Ginv_.resize(nb);
    d_.resize(nb);
    bool ok = true;
    for (std::size_t j = 0; j < nb && ok; ++j) ok = nt_scaling(j);
    if (!ok) {
      sol.message = "slack lost definiteness";
      break;
    }

    // Residuals.
    std::vector<Matrix> Rd(nb);
    double rd_norm2 = 0.0;
    double pobj = 0.0;
    double gap = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      Rd[j] = sf_.psd[j].C - Z_[j] - sf_.psd[j].adjoint(y_);
      rd_norm2 += Rd[j].squaredNorm();
      pobj += (sf_.psd[j].C.array() * X_[j].array()).sum();
      gap += (X_[j].array() * Z_[j].array()).sum();
    }
    Vector Rd_lp;
    if (has_lp) {
      Rd_lp = sf_.lp.c - z_lp_ - sf_.lp.adjoint(y_);
      rd_norm2 += Rd_lp.squaredNorm();
      pobj += sf_.lp.c.dot(x_lp_);
      gap += x_lp_.dot(z_lp_);
    }
    const Vector rp = sf_.b - apply_A(X_, x_lp_);
    const double dobj = sf_.b.dot(y_);
    const double pinf = rp.norm() / (1.0 + norm_b);
    const double dinf = std::sqrt(rd_norm2) / (1.0 + norm_c);
    const double relgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = gap / nu_;

    if (opts_.verbose) {
      std::cerr << std::scientific << std::setprecision(3) << "it " << iter
                << " pobj " << pobj << " dobj " << dobj << " gap " << gap
                << " relgap " << relgap << " pinf " << pinf << " dinf "
                << dinf << '\n';
    }

    const double score = std::max({relgap, pinf, dinf});
    if (score < 0.9 * best.score) since_progress = 0;
    else ++since_progress;
    if (score < best.score) {
      best = {score, y_, gap, relgap, pinf, dinf, dobj};
    }
    const bool feasible = pinf <= opts_.rel_tol && dinf <= opts_.rel_tol;
    if (feasible && (relgap <= opts_.rel_tol || gap <= opts_.abs_tol)) {
      sol.status = SolverStatus::Optimal;
      break;
    }

    // Infeasibility certificates.
    double aty_norm2 = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      aty_norm2 += (sf_.psd[j].adjoint(y_) + Z_[j]).squaredNorm();
    }
    if (has_lp) aty_norm2 += (sf_.lp.adjoint(y_) + z_lp_).squaredNorm();
    if (dobj > 0.0 && std::sqrt(aty_norm2) / dobj < 1e-9 && iter > 5) {
      sol.message = "objective unbounded below";
      break;
    }
    double cx = pobj;
    if (cx < 0.0 && apply_A(X_, x_lp_).norm() / (-cx) < 1e-9 && iter > 5) {
      sol.status = SolverStatus::Infeasible;
      sol.message = "infeasibility certificate found";
      break;
    }
    if (since_progress >= 5 && best.score <= near_tol) {
      sol.message = "progress stalled";
      break;
    }
    if (iter == opts_.max_iters) {
      sol.message = "iteration limit";
      break;
    }

    // Schur complement.
    H_.setZero(m, m);
    for (std::size_t j = 0; j < nb; ++j) {
      const auto& blk = sf_.psd[j];
      blk.schur(blk.gram(W_[j]), H_);
    }
    if (has_lp) {
      const Vector ratio = (x_lp_.array() / z_lp_.array()).matrix();
      sf_.lp.schur(ratio, H_);
    }
    schur_.compute(H_);
    double reg = 1e-15 * std::max(1.0, H_.diagonal().maxCoeff());
    for (int tries = 0; schur_.info() != Eigen::Success && tries < 8; ++tries) {
      Matrix Hr = H_;
      Hr.diagonal().array() += reg;
      schur_.compute(Hr);
      reg *= 100.0;
    }
    if (schur_.info() != Eigen::Success) {
      sol.message = "Schur complement not positive definite";
      break;
    }

    // Predictor.
    std::vector<Matrix> T(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      T[j] = -X_[j] - W_[j] * Rd[j] * W_[j];
    }
    Vector T_lp;
    if (has_lp) {
      T_lp = (-x_lp_.array() - x_lp_.array() * Rd_lp.array() / z_lp_.array())
                 .matrix();
    }
    const Direction pred = solve_direction(T, T_lp, Rd, Rd_lp, rp);
    double ap = 1e6, ad = 1e6;
    for (std::size_t j = 0; j < nb; ++j) {
      ap = std::min(ap, max_step_psd(X_[j], pred.dX[j]));
      ad = std::min(ad, max_step_psd(Z_[j], pred.dZ[j]));
    }
    if (has_lp) {
      ap = std::min(ap, max_step_lp(x_lp_, pred.dx_lp));
      ad = std::min(ad, max_step_lp(z_lp_, pred.dz_lp));
    }
    const double ap_pred = std::min(1.0, ap);
    const double ad_pred = std::min(1.0, ad);
    double gap_aff = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      gap_aff += ((X_[j] + ap_pred * pred.dX[j]).array() *
                  (Z_[j] + ad_pred * pred.dZ[j]).array())
                     .sum();
    }
    if (has_lp) {
      gap_aff += (x_lp_ + ap_pred * pred.dx_lp).dot(z_lp_ + ad_pred * pred.dz_lp);
    }
    const double step_pred = std::min(ap_pred, ad_pred);
    const double expon =
        (mu > 1e-6 && step_pred < 1.0 / std::sqrt(3.0))
            ? 1.0
            : std::max(1.0, 3.0 * step_pred * step_pred);
    const double sigma =
        std::clamp(std::pow(std::max(gap_aff, 0.0) / gap, expon), 0.0, 1.0);

    // Corrector in the scaled space, where X and Z both equal diag(d):
    //   (V R' + R' V)/2 = sigma mu I - V^2 - sym(dX' dZ').
    for (std::size_t j = 0; j < nb; ++j) {
      const Vector& d = d_[j];
      const Matrix dXs = Ginv_[j] * pred.dX[j] * Ginv_[j].transpose();
      const Matrix dZs = G_[j].transpose() * pred.dZ[j] * G_[j];
      const Matrix prod = dXs * dZs;
      Matrix U = -0.5 * (prod + prod.transpose());
      U.diagonal().array() += sigma * mu;
      for (Eigen::Index c = 0; c < U.cols(); ++c) {
        for (Eigen::Index r = 0; r < U.rows(); ++r) {
          U(r, c) = 2.0 * U(r, c) / (d(r) + d(c));
        }
      }
      U.diagonal() -= d;
      T[j] = G_[j] * U * G_[j].transpose() - W_[j] * Rd[j] * W_[j];
    }
    if (has_lp) {
      T_lp = ((sigma * mu - x_lp_.array() * z_lp_.array() -
               pred.dx_lp.array() * pred.dz_lp.array() -
               x_lp_.array() * Rd_lp.array()) /
              z_lp_.array())
                 .matrix();
    }
    const Direction corr = solve_direction(T, T_lp, Rd, Rd_lp, rp);
    ap = 1e6;
    ad = 1e6;
    for (std::size_t j = 0; j < nb; ++j) {
      ap = std::min(ap, max_step_psd(X_[j], corr.dX[j]));
      ad = std::min(ad, max_step_psd(Z_[j], corr.dZ[j]));
    }
    if (has_lp) {
      ap = std::min(ap, max_step_lp(x_lp_, corr.dx_lp));
      ad = std::min(ad, max_step_lp(z_lp_, corr.dz_lp));
    }
    const double tau = std::min(0.995, 0.9 + 0.09 * step_pred);
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);

    for (std::size_t j = 0; j < nb; ++j) {
      X_[j] += ap * corr.dX[j];
      Z_[j] += ad * corr.dZ[j];
    }
    if (has_lp) {
      x_lp_ += ap * corr.dx_lp;
      z_lp_ += ad * corr.dz_lp;
    }
    y_ += ad * corr.dy;
    if (opts_.verbose) {
      std::cerr << "   step " << ap << ' ' << ad << " sigma " << sigma << '\n';
    }

    const double step = std::min(ap, ad);
    stall = (step < 1e-6 && prev_step < 1e-6) ? stall + 1 : 0;
    prev_step = step;
    if (stall >= 3) {
      sol.message = "step length stalled";
      break;
    }
  }

  if (sol.status == SolverStatus::NumericalFailure && best.y.size() > 0) {
    // Fall back to the best iterate seen.
    y_ = best.y;
    if (best.score <= near_tol) sol.status = SolverStatus::NearOptimal;
  }
  sol.objective_gap = best.gap;
  sol.relative_gap = best.relgap;
  sol.primal_infeasibility = best.pinf;
  sol.dual_infeasibility = best.dinf;
  Vector x = sf_.reduced ? Vector(sf_.x0 + sf_.N * y_) : y_;
  sol.x = std::move(x);
  return sol;
}

}  // namespace

ConicSolution solve_conic(const ConicProblem& problem,
                          const SolverOptions& options) {
  std::string message;
  const StandardForm sf = build_standard_form(problem, message);
  ConicSolution sol;
  if (sf.m < 0) {
    sol.status = SolverStatus::Infeasible;
    sol.message = message;
    return sol;
  }
  if (sf.m == 0 || (sf.psd.empty() && sf.lp.size() == 0)) {
    // Nothing to optimize or no cone constraints.
    sol.x = sf.reduced ? sf.x0 : Vector::Zero(problem.num_scalars());
    sol.status = (sf.m == 0 || problem.objective().isZero())
                     ? SolverStatus::Optimal
                     : SolverStatus::NumericalFailure;
    if (sol.status != SolverStatus::Optimal) sol.message = "unbounded";
    sol.objective = problem.objective().dot(sol.x);
    return sol;
  }
  InteriorPoint ipm(sf, options);
  sol = ipm.run();
  sol.objective = problem.objective().dot(sol.x);
  return sol;
}

}  // namespace l2plus::conic
