#include "l2plus/hinf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace l2plus {

const char* to_string(PeakKind kind) {
  switch (kind) {
    case PeakKind::AtZero: return "AtZero";
    case PeakKind::AtFinite: return "AtFinite";
    case PeakKind::AtInfinity: return "AtInfinity";
  }
  return "Unknown";
}

void normalize_phase(CVector& v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  double best_mod = std::abs(v(0));
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double mod = std::abs(v(i));
    if (mod > best_mod * (1.0 + 1e-12) + 1e-300) {
      best = i;
      best_mod = mod;
    }
  }
  if (best_mod == 0.0) return;
  v *= std::conj(v(best)) / best_mod;
  v(best) = Complex(v(best).real(), 0.0);
}

SingularPair max_singular(const Matrix& M) {
  SingularPair out;
  if (M.size() == 0) {
    out.v = CVector::Zero(M.cols());
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  out.sigma = svd.singularValues()(0);
  out.v = svd.matrixV().col(0).cast<Complex>();
  normalize_phase(out.v);
  return out;
}

namespace {

SingularPair max_singular_complex(const CMatrix& G) {
  Eigen::JacobiSVD<CMatrix> svd(G, Eigen::ComputeFullV);
  SingularPair out;
  out.sigma = svd.singularValues()(0);
  out.v = svd.matrixV().col(0);
  normalize_phase(out.v);
  return out;
}

double sigma_max(const StateSpace& sys, double omega) {
  const CMatrix G = freq_response(sys, omega);
  if (G.rows() == 1 || G.cols() == 1) return G.norm();
  Eigen::JacobiSVD<CMatrix> svd(G);
  return svd.singularValues()(0);
}

double sigma_max_real(const Matrix& M) {
  if (M.rows() == 1 || M.cols() == 1) return M.norm();
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

struct HamiltonianTest {
  bool crosses = false;
  std::vector<double> omegas;  // imaginary parts >= 0 of near-axis eigenvalues
};

// gamma > sigma_max(D) assumed. gamma is an upper bound of ||G|| iff the
// Hamiltonian has no eigenvalues on the imaginary axis.
HamiltonianTest hamiltonian_test(const StateSpace& sys, double gamma) {
  const auto n = sys.n();
  const auto n_w = sys.n_w();
  const auto n_z = sys.n_z();
  Matrix R = gamma * gamma * Matrix::Identity(n_w, n_w) -
             sys.D.transpose() * sys.D;
  Eigen::LDLT<Matrix> R_ldlt(R);
  const Matrix Rinv_DtC = R_ldlt.solve(sys.D.transpose() * sys.C);
  const Matrix Rinv_Bt = R_ldlt.solve(sys.B.transpose());
  const Matrix Ah = sys.A + sys.B * Rinv_DtC;
  Matrix H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = Ah;
  H.topRightCorner(n, n) = sys.B * Rinv_Bt;
  const Matrix outer = Matrix::Identity(n_z, n_z) +
                       sys.D * R_ldlt.solve(sys.D.transpose());
  H.bottomLeftCorner(n, n) = -sys.C.transpose() * outer * sys.C;
  H.bottomRightCorner(n, n) = -Ah.transpose();

  HamiltonianTest out;
  Eigen::EigenSolver<Matrix> es(H, false);
  const double threshold = 1e-8 * H.norm();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex lambda = es.eigenvalues()(i);
    if (std::abs(lambda.real()) <= threshold && lambda.imag() >= 0.0) {
      out.crosses = true;
      out.omegas.push_back(lambda.imag());
    }
  }
  return out;
}

struct LocalPeak {
  double omega;
  double value;
};

LocalPeak golden_max(const StateSpace& sys, double a, double b) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = sigma_max(sys, x1);
  double f2 = sigma_max(sys, x2);
  const double width = 1e-12 * std::max(b, 1e-12);
  for (int it = 0; it < 200 && (b - a) > width; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = sigma_max(sys, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = sigma_max(sys, x1);
    }
  }
  return f1 >= f2 ? LocalPeak{x1, f1} : LocalPeak{x2, f2};
}

}  // namespace

SingularPair max_singular(const StateSpace& sys, Frequency at) {
  validate(sys);
  switch (at.kind) {
    case Frequency::Kind::Zero: return max_singular(dc_gain(sys));
    case Frequency::Kind::Infinity: return max_singular(sys.D);
    case Frequency::Kind::Finite:
      return max_singular_complex(freq_response(sys, at.omega));
  }
  return {};
}

PeakInfo hinf_norm(const StateSpace& sys, double rel_tol) {
  validate(sys);
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) {
    throw Error(ErrorKind::InvalidArgument, "rel_tol must lie in (0, 1e-2]");
  }
  if (!is_hurwitz(sys.A)) {
    throw Error(ErrorKind::UnstableSystem, "A is not Hurwitz");
  }

  const double gain_zero = sigma_max_real(dc_gain(sys));
  const double gain_inf = sigma_max_real(sys.D);

  std::vector<LocalPeak> interior;
  if (sys.n() > 0) {
    double lo = std::max(gain_inf * (1.0 + 1e-9), gain_zero);
    const double floor = 1e-14 * (1.0 + sys.D.norm() +
                                  sys.C.norm() * sys.B.norm());
    double hi = std::max({1.0, 1.01 * gain_inf, 1.01 * lo});
    for (int it = 0; it < 2000 && hamiltonian_test(sys, hi).crosses; ++it) {
      lo = hi;
      hi *= 2.0;
    }
    std::vector<double> crossings;
    for (int it = 0; it < 400 && hi - lo > rel_tol * hi + floor; ++it) {
      const double mid = 0.5 * (lo + hi);
      HamiltonianTest test = hamiltonian_test(sys, mid);
      if (test.crosses) {
        lo = mid;
        crossings = std::move(test.omegas);
      } else {
        hi = mid;
      }
    }
    if (crossings.empty() && lo > std::max(gain_zero, gain_inf) &&
        lo > floor) {
      HamiltonianTest test = hamiltonian_test(sys, lo);
      crossings = std::move(test.omegas);
    }

    // The level set {w : sigma(w) > lo} is a union of intervals whose
    // endpoints are the crossings; every interval is searched.
    crossings.push_back(0.0);
    std::sort(crossings.begin(), crossings.end());
    crossings.erase(std::unique(crossings.begin(), crossings.end(),
                                [](double a, double b) {
                                  return std::abs(a - b) <=
                                         1e-12 * std::max(1.0, std::abs(b));
                                }),
                    crossings.end());
    for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
      interior.push_back(golden_max(sys, crossings[i], crossings[i + 1]));
    }
    const double last = crossings.back();
    if (last > 0.0) {
      interior.push_back(golden_max(sys, last, 1.5 * last));
      interior.push_back(golden_max(sys, 0.5 * last, last));
    }
  }

  double gain_interior = 0.0;
  for (const auto& peak : interior) {
    gain_interior = std::max(gain_interior, peak.value);
  }
  const double gain = std::max({gain_zero, gain_inf, gain_interior});

  PeakInfo info;
  info.gain = gain;
  constexpr double kClassTol = 1e-6;
  if (gain_zero >= (1.0 - kClassTol) * gain) {
    info.kind = PeakKind::AtZero;
    info.omega = 0.0;
    info.v = max_singular(sys, Frequency::zero()).v;
  } else if (gain_inf >= (1.0 - kClassTol) * gain) {
    info.kind = PeakKind::AtInfinity;
    info.omega = std::numeric_limits<double>::infinity();
    info.v = max_singular(sys, Frequency::infinity()).v;
  } else {
    info.kind = PeakKind::AtFinite;
    // Smallest maximizing frequency; the rest are reported.
    std::sort(interior.begin(), interior.end(),
              [](const LocalPeak& a, const LocalPeak& b) {
                return a.omega < b.omega;
              });
    bool chosen = false;
    for (const auto& peak : interior) {
      if (peak.value < (1.0 - kClassTol) * gain) continue;
      if (!chosen && peak.value >= (1.0 - 1e-9) * gain_interior) {
        info.omega = peak.omega;
        chosen = true;
      } else if (!chosen || std::abs(peak.omega - info.omega) >
                                1e-6 * std::max(1.0, info.omega)) {
        info.other_peaks.push_back(peak.omega);
      }
    }
    info.v = max_singular(sys, Frequency::at(info.omega)).v;
  }
  return info;
}

}  // namespace l2plus
