#include "l2plus/state_space.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace l2plus {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::UnstableSystem: return "UnstableSystem";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

StateSpace StateSpace::static_gain(const Matrix& D) {
  StateSpace sys;
  sys.A = Matrix(0, 0);
  sys.B = Matrix(0, D.cols());
  sys.C = Matrix(D.rows(), 0);
  sys.D = D;
  return sys;
}

namespace {

std::string shape(const Matrix& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

}  // namespace

const StateSpace& validate(const StateSpace& sys) {
  const auto n = sys.A.rows();
  const auto n_w = sys.D.cols();
  const auto n_z = sys.D.rows();
  if (sys.A.cols() != n || sys.B.rows() != n || sys.B.cols() != n_w ||
      sys.C.rows() != n_z || sys.C.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "A " + shape(sys.A) + ", B " + shape(sys.B) + ", C " +
                    shape(sys.C) + ", D " + shape(sys.D));
  }
  if (n_w < 1 || n_z < 1) {
    throw Error(ErrorKind::DimensionMismatch,
                "system needs at least one input and one output");
  }
  if (!sys.A.allFinite() || !sys.B.allFinite() || !sys.C.allFinite() ||
      !sys.D.allFinite()) {
    throw Error(ErrorKind::NonFiniteEntry, "system matrices contain NaN/Inf");
  }
  return sys;
}

double spectral_abscissa(const Matrix& A) {
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& A) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "A must be square");
  }
  return spectral_abscissa(A) < 0.0;
}

bool is_metzler(const Matrix& A) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "A must be square");
  }
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      if (i != j && A(i, j) < 0.0) return false;
    }
  }
  return true;
}

bool is_internally_positive(const StateSpace& sys) {
  validate(sys);
  return is_metzler(sys.A) && (sys.B.array() >= 0.0).all() &&
         (sys.C.array() >= 0.0).all() && (sys.D.array() >= 0.0).all();
}

bool is_externally_positive_sampled(const StateSpace& sys, double horizon,
                                    double step) {
  validate(sys);
  if (!(horizon > 0.0) || !(step > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "horizon and step must be > 0");
  }
  if (!is_hurwitz(sys.A)) {
    throw Error(ErrorKind::UnstableSystem, "A is not Hurwitz");
  }
  constexpr double kSignTol = -1e-9;
  if ((sys.D.array() < 0.0).any()) return false;
  if (sys.n() == 0) return true;

  const Matrix phi = expm(sys.A * step);
  Matrix state = sys.B;  // exp(A t) B
  const auto steps = static_cast<long>(std::floor(horizon / step + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    if (((sys.C * state).array() < kSignTol).any()) return false;
    state = phi * state;
  }
  return true;
}

CMatrix freq_response(const StateSpace& sys, double omega) {
  const auto n = sys.n();
  CMatrix G = sys.D.cast<Complex>();
  if (n == 0) return G;
  CMatrix resolvent = -sys.A.cast<Complex>();
  resolvent.diagonal().array() += Complex(0.0, omega);
  Eigen::PartialPivLU<CMatrix> lu(resolvent);
  // PartialPivLU does not report singularity; check the pivots directly.
  const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(pivot > 1e-300)) {
    throw Error(ErrorKind::SingularResolvent,
                "jw is an eigenvalue of A at w = " + std::to_string(omega));
  }
  G.noalias() += sys.C.cast<Complex>() * lu.solve(sys.B.cast<Complex>());
  return G;
}

Matrix dc_gain(const StateSpace& sys) {
  if (sys.n() == 0) return sys.D;
  Eigen::PartialPivLU<Matrix> lu(sys.A);
  return sys.D - sys.C * lu.solve(sys.B);
}

StateSpace subtract(const StateSpace& sys1, const StateSpace& sys2) {
  validate(sys1);
  validate(sys2);
  if (sys1.n_w() != sys2.n_w() || sys1.n_z() != sys2.n_z()) {
    throw Error(ErrorKind::DimensionMismatch,
                "subtract needs equal input/output dimensions");
  }
  const auto n1 = sys1.n();
  const auto n2 = sys2.n();
  const auto n = n1 + n2;
  StateSpace out;
  out.A = Matrix::Zero(n, n);
  out.A.topLeftCorner(n1, n1) = sys1.A;
  out.A.bottomRightCorner(n2, n2) = sys2.A;
  out.B.resize(n, sys1.n_w());
  out.B << sys1.B, sys2.B;
  out.C.resize(sys1.n_z(), n);
  out.C << sys1.C, -sys2.C;
  out.D = sys1.D - sys2.D;
  out.name = (sys1.name.empty() ? "G1" : sys1.name) + " - " +
             (sys2.name.empty() ? "G2" : sys2.name);
  return out;
}

StateSpace scale(const StateSpace& sys, double c) {
  StateSpace out = sys;
  out.C *= c;
  out.D *= c;
  return out;
}

Matrix expm(const Matrix& M) {
  if (M.rows() == 0) return M;
  return M.exp();
}

Matrix lyapunov(const Matrix& A, const Matrix& Q) {
  const auto n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "lyapunov: shapes differ");
  }
  if (n == 0) return Matrix(0, 0);
  // A = U T U^H turns A^T X + X A = -Q into T^H Y + Y T = -U^H Q U.
  Eigen::ComplexSchur<Matrix> schur(A);
  const CMatrix& T = schur.matrixT();
  const CMatrix& U = schur.matrixU();
  const CMatrix Qt = U.adjoint() * Q.cast<Complex>() * U;
  const CMatrix Th = T.adjoint();
  const double tol = 1e-14 * std::max(1.0, A.norm());
  CMatrix Y = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    CVector rhs = -Qt.col(j);
    if (j > 0) rhs.noalias() -= Y.leftCols(j) * T.col(j).head(j);
    CMatrix Lj = Th;
    Lj.diagonal().array() += T(j, j);
    if (Lj.diagonal().cwiseAbs().minCoeff() <= tol) {
      throw Error(ErrorKind::InvalidArgument,
                  "lyapunov: A and -A^T share an eigenvalue");
    }
    Y.col(j) = Lj.triangularView<Eigen::Lower>().solve(rhs);
  }
  const Matrix X = (U * Y * U.adjoint()).real();
  return 0.5 * (X + X.transpose());
}

}  // namespace l2plus
