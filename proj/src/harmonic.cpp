#include "l2plus/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace l2plus {

HarmonicCoefficients fourier_coeffs(int N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  HarmonicCoefficients c;
  c.a0 = 2.0 / std::numbers::pi;
  c.a.assign(static_cast<std::size_t>(N) + 1, 0.0);
  c.a[0] = c.a0;
  c.a[1] = 1.0;
  for (int m = 2; m <= N; m += 2) {
    const int p = m / 2;
    const double sign = p % 2 == 1 ? 1.0 : -1.0;
    c.a[m] = 4.0 / std::numbers::pi * sign /
             ((2.0 * p + 1.0) * (2.0 * p - 1.0));
  }
  return c;
}

double parseval_check(int N) {
  const HarmonicCoefficients c = fourier_coeffs(N);
  double sum = 2.0 * c.a0 * c.a0 + 1.0;
  for (int m = 2; m <= N; ++m) sum += c.a[m] * c.a[m];
  return sum;
}

HarmonicDirections harmonic_directions(const PeakInfo& peak, int N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  HarmonicDirections d;
  d.kind = peak.kind;
  d.v = peak.v;
  d.vs.resize(static_cast<std::size_t>(N) + 1);
  const Eigen::Index n_w = peak.v.size();

  switch (peak.kind) {
    case PeakKind::AtFinite: {
      for (int m = 0; m <= N; ++m) {
        CVector u(n_w);
        for (Eigen::Index i = 0; i < n_w; ++i) {
          const double r = std::abs(peak.v(i));
          u(i) = r == 0.0 ? Complex(0.0)
                          : std::polar(r, m * std::arg(peak.v(i)));
        }
        d.vs[m] = u;
      }
      break;
    }
    // The boundary peaks have a real v. A nonnegative input realizes it with
    // phases 0 or pi, so even harmonics (and the mean) carry v_abs. For a
    // one-signed v this is v at every m.
    case PeakKind::AtInfinity:
    case PeakKind::AtZero: {
      CVector w = peak.v;
      normalize_phase(w);
      Vector vr = w.real();
      if (vr.cwiseMax(0.0).norm() < (-vr).cwiseMax(0.0).norm()) vr = -vr;
      d.v = vr.cast<Complex>();
      const CVector v_abs = vr.cwiseAbs().cast<Complex>();
      for (int m = 0; m <= N; ++m) d.vs[m] = m % 2 == 1 ? d.v : v_abs;
      break;
    }
  }
  return d;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Objective {
 public:
  Objective(const StateSpace& sys, HarmonicDirections dirs,
            HarmonicCoefficients coef)
      : sys_(sys), dirs_(std::move(dirs)), coef_(std::move(coef)) {
    base_ = 2.0 * coef_.a0 * coef_.a0 * gain2(0.0, dirs_.vs[0]);
  }

  /// |G(jw) u|^2, with w = inf meaning the feedthrough D.
  double gain2(double w, const CVector& u) const {
    CVector z = sys_.D.cast<Complex>() * u;
    if (sys_.n() > 0 && w != kInf) {
      CMatrix R = -sys_.A.cast<Complex>();
      R.diagonal().array() += Complex(0.0, w);
      const CVector x = R.partialPivLu().solve(sys_.B.cast<Complex>() * u);
      z += sys_.C.cast<Complex>() * x;
    }
    return z.squaredNorm();
  }

  double term(double w, int m) const {
    const double a = coef_.a[m];
    if (a == 0.0) return 0.0;
    return a * a * gain2(w == kInf ? kInf : m * w, dirs_.vs[m]);
  }

  double value(double w, int N) const {
    double sum = base_;
    for (int m = 1; m <= N; ++m) sum += term(w, m);
    return std::sqrt(sum / 2.0);
  }

  double base() const { return base_; }
  const HarmonicCoefficients& coef() const { return coef_; }

 private:
  const StateSpace& sys_;
  HarmonicDirections dirs_;
  HarmonicCoefficients coef_;
  double base_ = 0.0;
};

double peak_scale(const StateSpace& sys, const PeakInfo& peak) {
  if (peak.kind == PeakKind::AtFinite) return peak.omega;
  if (sys.n() == 0) return 1.0;
  const Eigen::VectorXcd ev = sys.A.eigenvalues();
  const double lo = ev.cwiseAbs().minCoeff();
  const double hi = ev.cwiseAbs().maxCoeff();
  return lo > 0.0 ? std::sqrt(lo * hi) : std::max(hi, 1.0);
}

std::vector<double> make_grid(double scale, const GridOptions& g) {
  if (g.points_per_decade < 1 || g.decades_below < 0 || g.decades_above < 0) {
    throw Error(ErrorKind::InvalidArgument, "invalid grid options");
  }
  const double lo = std::log10(scale) - g.decades_below;
  const int K = static_cast<int>(
      std::lround((g.decades_below + g.decades_above) * g.points_per_decade));
  std::vector<double> w(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    w[k] = std::pow(10.0, lo + static_cast<double>(k) / g.points_per_decade);
  }
  return w;
}

// Maximizes f over [lo, hi] in log frequency.
template <class F>
std::pair<double, double> golden_max(F f, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo), b = std::log(hi);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(std::exp(c)), fd = f(std::exp(d));
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(std::exp(d));
    }
  }
  return fc >= fd ? std::pair{std::exp(c), fc} : std::pair{std::exp(d), fd};
}

std::vector<int> doubling_schedule(int N_max) {
  std::vector<int> s;
  for (int N = 1; N < N_max; N *= 2) s.push_back(N);
  s.push_back(N_max);
  return s;
}

struct Prepared {
  PeakInfo peak;
  std::vector<double> grid;
};

Prepared prepare(const StateSpace& sys, const GridOptions& grid) {
  validate(sys);
  if (!is_hurwitz(sys.A)) {
    throw Error(ErrorKind::UnstableSystem, "A is not Hurwitz");
  }
  Prepared p;
  p.peak = hinf_norm(sys);
  p.grid = make_grid(peak_scale(sys, p.peak), grid);
  return p;
}

std::vector<UpsilonResult> run_schedule(const StateSpace& sys,
                                        const std::vector<int>& schedule,
                                        const GridOptions& grid) {
  const Prepared prep = prepare(sys, grid);
  const int N_max = schedule.back();
  const Objective obj(sys, harmonic_directions(prep.peak, N_max),
                      fourier_coeffs(N_max));
  const auto& w = prep.grid;
  const int K = static_cast<int>(w.size());

  Vector acc = Vector::Zero(K);  // sum of weighted harmonic terms
  std::vector<UpsilonResult> out;
  int done = 0;
  double prev_w = std::numeric_limits<double>::quiet_NaN();
  for (int N : schedule) {
    for (int m = done + 1; m <= N; ++m) {
      if (obj.coef().a[m] == 0.0) continue;
      for (int k = 0; k < K; ++k) acc(k) += obj.term(w[k], m);
    }
    done = N;

    Eigen::Index kbest = 0;
    acc.maxCoeff(&kbest);
    const double lo = w[std::max<Eigen::Index>(kbest - 1, 0)];
    const double hi = w[std::min<Eigen::Index>(kbest + 1, K - 1)];
    UpsilonResult r{N, std::sqrt((obj.base() + acc(kbest)) / 2.0), w[kbest]};
    auto consider = [&](double omega, double value) {
      if (value > r.upsilon) {
        r.upsilon = value;
        r.omega = omega;
      }
    };
    if (hi > lo) {
      const auto [wp, vp] = golden_max(
          [&](double x) { return obj.value(x, N); }, lo, hi,
          grid.polish_rel_tol);
      consider(wp, vp);
    }
    consider(0.0, obj.value(0.0, N));
    if (prep.peak.kind == PeakKind::AtInfinity) consider(kInf, obj.value(kInf, N));
    if (prep.peak.kind == PeakKind::AtFinite) {
      consider(prep.peak.omega, obj.value(prep.peak.omega, N));
    }
    if (!std::isnan(prev_w)) consider(prev_w, obj.value(prev_w, N));
    prev_w = r.omega;
    out.push_back(r);
  }
  return out;
}

}  // namespace

UpsilonResult upsilon(const StateSpace& sys, int N, const GridOptions& grid) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  return run_schedule(sys, {N}, grid).back();
}

std::vector<UpsilonResult> upsilon_sequence(const StateSpace& sys, int N_max,
                                            const GridOptions& grid) {
  if (N_max < 1) throw Error(ErrorKind::InvalidArgument, "N_max must be >= 1");
  return run_schedule(sys, doubling_schedule(N_max), grid);
}

void write_upsilon_curve_csv(std::ostream& os, const StateSpace& sys, int N,
                             const GridOptions& grid) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  const Prepared prep = prepare(sys, grid);
  const Objective obj(sys, harmonic_directions(prep.peak, N), fourier_coeffs(N));
  os << "omega,h\n" << std::setprecision(17);
  for (double w : prep.grid) os << w << ',' << obj.value(w, N) << '\n';
}

void write_upsilon_table_csv(std::ostream& os,
                             const std::vector<UpsilonResult>& rows) {
  os << "N,upsilon,omega\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.N << ',' << r.upsilon << ',' << r.omega << '\n';
  }
}

double matrix_l2plus_lower(const Matrix& M) {
  if (M.size() == 0 || M.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "ZeroMatrix: M must be nonzero");
  }
  const SingularPair sp = max_singular(M);
  Vector v = sp.v.real();
  if (v.cwiseMax(0.0).norm() < (-v).cwiseMax(0.0).norm()) v = -v;
  const Vector v_plus = v.cwiseMax(0.0);
  const double abs_part = (M * v.cwiseAbs()).squaredNorm();
  double bound = std::sqrt((sp.sigma * sp.sigma + abs_part) / 2.0);
  const double np = v_plus.norm();
  if (np > 0.0) bound = std::max(bound, (M * v_plus).norm() / np);
  return bound;
}

double matrix_l2plus_bruteforce(const Matrix& M, const BruteForceOptions& opts) {
  const Eigen::Index n = M.cols();
  if (n > opts.max_columns) {
    throw Error(ErrorKind::InvalidArgument,
                "TooManyColumns: brute force supports at most " +
                    std::to_string(opts.max_columns) + " columns");
  }
  if (n == 0 || M.rows() == 0) return 0.0;
  const Matrix H = M.transpose() * M;
  const double L = H.norm();
  if (L == 0.0) return 0.0;

  std::vector<Vector> starts;
  for (Eigen::Index i = 0; i < n; ++i) starts.push_back(Vector::Unit(n, i));
  const Vector v = max_singular(M).v.real();
  starts.push_back(v.cwiseAbs());
  starts.push_back(v.cwiseMax(0.0));
  starts.push_back((-v).cwiseMax(0.0));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < opts.random_starts; ++s) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = unif(rng);
    starts.push_back(x);
  }

  double best = 0.0;
  for (Vector x : starts) {
    if (x.norm() == 0.0) continue;
    x.normalize();
    for (int it = 0; it < opts.max_iters; ++it) {
      Vector y = (x + H * x / L).cwiseMax(0.0);
      const double ny = y.norm();
      if (ny == 0.0) break;
      y /= ny;
      const double step = (y - x).norm();
      x = y;
      if (step < 1e-14) break;
    }
    best = std::max(best, (M * x).norm());
  }
  return best;
}

SipResult sip_qp_oracle(int N, int grid_points, const conic::SolverOptions& opts) {
  if (N < 2) throw Error(ErrorKind::InvalidArgument, "N must be >= 2");
  if (grid_points < 100) {
    throw Error(ErrorKind::InvalidArgument, "grid_points must be >= 100");
  }
  conic::ConicProblem prob;
  const int s = prob.add_variable("s", conic::VarKind::Scalar);
  std::vector<int> a(static_cast<std::size_t>(N) + 1, -1);
  a[0] = prob.add_variable("a0", conic::VarKind::Scalar);
  for (int m = 2; m <= N; ++m) {
    a[m] = prob.add_variable("a" + std::to_string(m), conic::VarKind::Scalar);
  }
  prob.set_objective(s, 1.0);

  // Epigraph  |u|^2 <= s  with u = (sqrt2 a0, a2, ..., aN) as
  // -[s u^T; u I] <= 0.
  const int K = N + 1;
  const int epi = prob.add_constraint(K, conic::Constraint::Sense::NegSemidefinite);
  prob.add_entry(epi, s, 0, 0, -1.0);
  prob.add_entry(epi, a[0], 0, 1, -std::sqrt(2.0));
  for (int m = 2; m <= N; ++m) prob.add_entry(epi, a[m], 0, m, -1.0);
  for (int i = 1; i < K; ++i) prob.add_entry(epi, -1, i, i, -1.0);

  // -(a0 + cos t + sum a_m cos m t) <= 0 at each sample.
  for (int k = 0; k < grid_points; ++k) {
    const double t = std::numbers::pi * k / (grid_points - 1);
    const int c = prob.add_constraint(1, conic::Constraint::Sense::NegSemidefinite);
    prob.add_entry(c, -1, 0, 0, -std::cos(t));
    prob.add_entry(c, a[0], 0, 0, -1.0);
    for (int m = 2; m <= N; ++m) prob.add_entry(c, a[m], 0, 0, -std::cos(m * t));
  }

  const conic::ConicSolution sol = conic::solve_conic(prob, opts);
  SipResult r;
  r.status = sol.status;
  if (sol.status != conic::SolverStatus::Optimal &&
      sol.status != conic::SolverStatus::NearOptimal) {
    throw Error(ErrorKind::NumericalFailure, "sip oracle: " + sol.message);
  }
  r.coeffs.assign(static_cast<std::size_t>(N) + 1, 0.0);
  r.coeffs[0] = sol.x(a[0]);
  r.coeffs[1] = 1.0;
  double value = 1.0 + 2.0 * r.coeffs[0] * r.coeffs[0];
  for (int m = 2; m <= N; ++m) {
    r.coeffs[m] = sol.x(a[m]);
    value += r.coeffs[m] * r.coeffs[m];
  }
  r.value = value;
  return r;
}

}  // namespace l2plus
