#include "l2plus/positive_filter.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace l2plus {

PositiveFilter build_filter(double alpha, int degree, Eigen::Index n_w) {
  if (!(alpha < 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::InvalidArgument,
                "InvalidAlpha: filter pole must be negative, got " +
                    std::to_string(alpha));
  }
  if (degree < 0) {
    throw Error(ErrorKind::InvalidArgument,
                "NegativeDegree: filter degree must be >= 0");
  }
  if (n_w < 1) {
    throw Error(ErrorKind::InvalidArgument, "n_w must be >= 1");
  }
  PositiveFilter f;
  f.alpha = alpha;
  f.degree = degree;
  f.n_w = n_w;
  const Matrix I = Matrix::Identity(n_w, n_w);
  Matrix J = alpha * Matrix::Identity(degree, degree);
  for (int i = 0; i + 1 < degree; ++i) J(i, i + 1) = 1.0;
  Matrix e_last = Matrix::Zero(degree, 1);
  if (degree > 0) e_last(degree - 1, 0) = 1.0;
  f.A_p = Eigen::kroneckerProduct(J, I);
  f.B_p = Eigen::kroneckerProduct(e_last, I);
  return f;
}

AugmentedSystem augment(const StateSpace& sys, const PositiveFilter& filter) {
  validate(sys);
  if (filter.n_w != sys.n_w()) {
    throw Error(ErrorKind::DimensionMismatch,
                "filter input dimension differs from the system's");
  }
  AugmentedSystem aug;
  aug.n = sys.n();
  aug.n_p = filter.n_p();
  aug.n_w = sys.n_w();
  const auto n_a = aug.n_a();
  aug.A_a = Matrix::Zero(n_a, n_a);
  aug.A_a.topLeftCorner(aug.n, aug.n) = sys.A;
  aug.A_a.bottomRightCorner(aug.n_p, aug.n_p) = filter.A_p;
  aug.B_a.resize(n_a, aug.n_w);
  aug.B_a << sys.B, filter.B_p;
  aug.C_a = Matrix::Zero(sys.n_z(), n_a);
  aug.C_a.leftCols(aug.n) = sys.C;
  aug.D_a = sys.D;
  return aug;
}

StateSpace AugmentedSystem::as_state_space() const {
  StateSpace s;
  s.A = A_a;
  s.B = B_a;
  s.C = C_a;
  s.D = D_a;
  return s;
}

}  // namespace l2plus
