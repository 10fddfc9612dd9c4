#include "l2plus/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace l2plus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, ErrorKind kind, const char* what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace

SampledSignal rectified_cosine_input(const CVector& v, double omega,
                                     double t_end, double dt) {
  require(omega > 0.0 && std::isfinite(omega), ErrorKind::InvalidArgument,
          "omega must be positive and finite");
  require(dt > 0.0 && t_end >= 0.0, ErrorKind::InvalidArgument,
          "dt must be positive and t_end nonnegative");
  require(dt <= kTwoPi / (1000.0 * omega) * (1.0 + 1e-12),
          ErrorKind::InvalidArgument,
          "StepTooCoarse: dt must not exceed 2 pi / (1000 omega)");
  const Eigen::Index n = static_cast<Eigen::Index>(std::floor(t_end / dt + 1e-9)) + 1;
  SampledSignal s;
  s.dt = dt;
  s.values.resize(n, v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = std::abs(v(i));
    const double theta = std::arg(v(i));
    for (Eigen::Index k = 0; k < n; ++k) {
      s.values(k, i) =
          r * std::max(2.0 * std::cos(omega * s.time(k) + theta), 0.0);
    }
  }
  return s;
}

SampledSignal simulate(const StateSpace& sys, const SampledSignal& w) {
  validate(sys);
  if (w.channels() != sys.n_w()) {
    throw Error(ErrorKind::DimensionMismatch, "input channels must equal n_w");
  }
  SampledSignal z;
  z.dt = w.dt;
  z.t0 = w.t0;
  z.values = w.values * sys.D.transpose();
  const Eigen::Index n = sys.n();
  if (n == 0) return z;

  const Eigen::Index m = sys.n_w();
  Matrix blk = Matrix::Zero(n + m, n + m);
  blk.topLeftCorner(n, n) = sys.A;
  blk.topRightCorner(n, m) = sys.B;
  const Matrix phi = expm(blk * w.dt);
  const Matrix Ad = phi.topLeftCorner(n, n);
  const Matrix Bd = phi.topRightCorner(n, m);

  Vector x = Vector::Zero(n);
  for (Eigen::Index k = 0; k < w.samples(); ++k) {
    const Vector wk = w.values.row(k).transpose();
    z.values.row(k) += (sys.C * x).transpose();
    x = Ad * x + Bd * wk;
  }
  return z;
}

double lp_norm(const SampledSignal& sig, NormKind p) {
  const Eigen::Index n = sig.samples();
  if (n == 0 || sig.channels() == 0) return 0.0;
  if (p == NormKind::Linf) return sig.values.cwiseAbs().maxCoeff();
  Vector s(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    s(k) = p == NormKind::L1 ? sig.values.row(k).cwiseAbs().sum()
                             : sig.values.row(k).squaredNorm();
  }
  if (n == 1) return 0.0;
  const double integral = sig.dt * (s.sum() - 0.5 * (s(0) + s(n - 1)));
  return p == NormKind::L1 ? integral : std::sqrt(integral);
}

int settle_periods_for(const StateSpace& sys, double omega) {
  if (sys.n() == 0) return 0;
  const double a = spectral_abscissa(sys.A);
  require(a < 0.0, ErrorKind::UnstableSystem, "A is not Hurwitz");
  const double t_settle = std::log(1e6) / -a;
  return static_cast<int>(std::ceil(t_settle * omega / kTwoPi));
}

double empirical_gain(const StateSpace& sys, double omega, const CVector& v,
                      int settle_periods, int measure_periods, double dt) {
  validate(sys);
  require(is_hurwitz(sys.A), ErrorKind::UnstableSystem, "A is not Hurwitz");
  require(v.size() == sys.n_w(), ErrorKind::DimensionMismatch,
          "direction length must equal n_w");
  require(measure_periods >= 1, ErrorKind::InvalidArgument,
          "measure_periods must be >= 1");
  require(settle_periods >= settle_periods_for(sys, omega),
          ErrorKind::InvalidArgument,
          "settle window too short for the slowest mode");
  const double period = kTwoPi / omega;
  if (dt <= 0.0) dt = period / 2000.0;
  // Whole samples per period so the measured window covers full periods.
  const Eigen::Index spp = static_cast<Eigen::Index>(std::ceil(period / dt - 1e-9));
  dt = period / static_cast<double>(spp);
  const Eigen::Index first = spp * settle_periods;
  const double t_end = static_cast<double>(first + spp * measure_periods) * dt;

  const SampledSignal w = rectified_cosine_input(v, omega, t_end, dt);
  const SampledSignal z = simulate(sys, w);
  auto window = [&](const SampledSignal& s) {
    SampledSignal out;
    out.dt = s.dt;
    out.values = s.values.bottomRows(s.samples() - first);
    return out;
  };
  const double nw = lp_norm(window(w), NormKind::L2);
  require(nw > 0.0, ErrorKind::InvalidArgument, "direction must be nonzero");
  return lp_norm(window(z), NormKind::L2) / nw;
}

DelayDemoResult delay_demo(double L, NormKind p, double dt, double horizon) {
  require(L > 0.0 && std::isfinite(L), ErrorKind::InvalidArgument,
          "L must be positive");
  if (dt <= 0.0) dt = L / 1000.0;
  require(dt <= L / 1000.0 * (1.0 + 1e-12), ErrorKind::InvalidArgument,
          "StepTooCoarse: dt must not exceed L / 1000");
  if (horizon <= 0.0) horizon = 200.0 * L;
  require(horizon >= L, ErrorKind::InvalidArgument, "horizon must be >= L");

  const Eigen::Index d = static_cast<Eigen::Index>(std::ceil(L / dt - 1e-9));
  dt = L / static_cast<double>(d);
  const Eigen::Index n = static_cast<Eigen::Index>(std::llround(horizon / dt)) + 1;

  // Gain of z = w - w(. - L), z observed until w's tail has passed.
  auto gain = [&](const Vector& w) {
    SampledSignal ws, zs;
    ws.dt = zs.dt = dt;
    ws.values = w;
    zs.values = Matrix::Zero(w.size() + d, 1);
    zs.values.topRows(w.size()) += w;
    zs.values.bottomRows(w.size()) -= w;
    return lp_norm(zs, p) / lp_norm(ws, p);
  };

  Vector signed_w(n), plus_w = Vector::Zero(n);
  const Eigen::Index width = std::max<Eigen::Index>(2, d / 10);
  switch (p) {
    case NormKind::L1:
      signed_w.setZero();
      signed_w.head(width).setOnes();
      signed_w.segment(d, width).setConstant(-1.0);
      plus_w.head(width).setOnes();
      break;
    case NormKind::L2:
    case NormKind::Linf:
      for (Eigen::Index k = 0; k < n; ++k) {
        signed_w(k) = (k / d) % 2 == 0 ? 1.0 : -1.0;
      }
      if (p == NormKind::L2) {
        const double omega = std::numbers::pi / L;
        for (Eigen::Index k = 0; k < n; ++k) {
          plus_w(k) = std::max(2.0 * std::cos(omega * k * dt), 0.0);
        }
      } else {
        plus_w.head(d).setOnes();
      }
      break;
  }

  DelayDemoResult r;
  r.dt = dt;
  r.achieved_norm = gain(signed_w);
  r.achieved_plus_norm = gain(plus_w);
  r.ratio = r.achieved_plus_norm / r.achieved_norm;
  return r;
}

void write_trajectory_csv(std::ostream& os, const SampledSignal& w,
                          const SampledSignal& z) {
  if (w.samples() != z.samples()) {
    throw Error(ErrorKind::DimensionMismatch, "w and z must share the time grid");
  }
  os << 't';
  for (Eigen::Index i = 0; i < w.channels(); ++i) os << ",w" << i + 1;
  for (Eigen::Index i = 0; i < z.channels(); ++i) os << ",z" << i + 1;
  os << '\n' << std::setprecision(17);
  for (Eigen::Index k = 0; k < w.samples(); ++k) {
    os << w.time(k);
    for (Eigen::Index i = 0; i < w.channels(); ++i) os << ',' << w.values(k, i);
    for (Eigen::Index i = 0; i < z.channels(); ++i) os << ',' << z.values(k, i);
    os << '\n';
  }
}

}  // namespace l2plus
