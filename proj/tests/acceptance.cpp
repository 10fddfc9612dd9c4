// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 when any
// criterion fails. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "l2plus/copositive_sdp.hpp"
#include "l2plus/harmonic.hpp"
#include "l2plus/report.hpp"
#include "l2plus/timedomain.hpp"
#include "support.hpp"

using namespace l2plus;
using namespace l2plus::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool within_rel(double x, double ref, double tol) {
  return std::abs(x - ref) <= tol * std::abs(ref);
}

int hardware_threads() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Results shared between criteria 3, 4, 5 and 12.
struct Shared {
  bool have_sweep = false;
  SweepResult sweep;
  bool have_lower = false;
  std::vector<UpsilonResult> lower;
};

StateSpace example() { return fixture("example6.json"); }

void c1_hinf(Outcome& o, Shared&) {
  const auto t0 = Clock::now();
  const PeakInfo p = hinf_norm(example());
  const double t = seconds_since(t0);
  o.detail << "l2_norm=" << p.gain << " omega*=" << p.omega << " time=" << t << "s";
  o.require(std::abs(p.gain - 7.0667) <= 1e-3, "l2_norm = 7.0667 +- 1e-3");
  o.require(std::abs(p.omega - 0.1654) <= 1e-3, "omega* = 0.1654 +- 1e-3");
  o.require(t < 1.0, "runtime < 1 s");
}

void c2_filter_free(Outcome& o, Shared&) {
  const auto t0 = Clock::now();
  const UpperBoundResult r = upper_bound(example(), -0.8, 0);
  const double t = seconds_since(t0);
  o.detail << "gamma=" << r.gamma << " status=" << conic::to_string(r.solver_status)
           << " time=" << t << "s";
  o.require(r.ok(), "solver success");
  o.require(within_rel(r.gamma, 5.3950, 0.01), "gamma = 5.3950 +- 1%");
  o.require(t < 5.0, "runtime < 5 s");
}

const std::vector<double> kAlphas{-0.8, -1.0, -1.2};

void c3_filtered(Outcome& o, Shared& sh) {
  const auto t0 = Clock::now();
  sh.sweep = sweep(example(), kAlphas, 15, {}, hardware_threads());
  sh.have_sweep = true;
  const double t = seconds_since(t0);
  const SweepResult& s = sh.sweep;
  double ref_cell = std::numeric_limits<double>::quiet_NaN();
  bool monotone = true;
  double worst_increase = 0.0;
  for (std::size_t a = 0; a < kAlphas.size(); ++a) {
    for (int N = 1; N <= 15; ++N) {
      const auto& prev = s.cells[a * 16 + N - 1];
      const auto& cur = s.cells[a * 16 + N];
      if (!cur.ok() || !prev.ok()) {
        monotone = false;
        continue;
      }
      worst_increase = std::max(worst_increase, cur.gamma - prev.gamma);
      if (cur.gamma > prev.gamma + 1e-3) monotone = false;
    }
  }
  ref_cell = s.cells[15].gamma;  // alpha = -0.8, N = 15
  o.detail << "best=" << s.best_gamma << " at (alpha=" << s.best_alpha << ", N=" << s.best_N
           << ") gamma(-0.8,15)=" << ref_cell << " max_increase=" << worst_increase
           << " time=" << t << "s threads=" << hardware_threads();
  o.require(s.any_ok, "at least one cell solved");
  o.require(within_rel(s.best_gamma, 5.1802, 0.01), "best = 5.1802 +- 1%");
  o.require(ref_cell <= s.best_gamma * 1.003, "(alpha=-0.8, N=15) within 0.3% of best");
  o.require(monotone, "per-alpha sequences non-increasing up to 1e-3");
  o.require(t < 600.0, "sweep < 10 min");
}

void c4_lower(Outcome& o, Shared& sh) {
  const auto t0 = Clock::now();
  sh.lower = upsilon_sequence(example(), 200);
  sh.have_lower = true;
  const double t = seconds_since(t0);
  double best = 0.0;
  for (const auto& r : sh.lower) best = std::max(best, r.upsilon);
  o.detail << "best upsilon=" << best << " time=" << t << "s";
  o.require(within_rel(best, 5.1080, 0.01), "best upsilon = 5.1080 +- 1%");
  o.require(best > 7.0667 / std::sqrt(2.0), "exceeds l2_norm / sqrt2");
  o.require(t < 30.0, "runtime < 30 s");
}

void c5_gap(Outcome& o, Shared& sh) {
  if (!sh.have_sweep) {
    Outcome tmp;
    c3_filtered(tmp, sh);
  }
  if (!sh.have_lower) {
    Outcome tmp;
    c4_lower(tmp, sh);
  }
  double lower = 0.0;
  for (const auto& r : sh.lower) lower = std::max(lower, r.upsilon);
  const double gap = relative_gap(sh.sweep.best_gamma, lower);
  o.detail << "upper=" << sh.sweep.best_gamma << " lower=" << lower << " gap=" << gap;
  o.require(sh.sweep.any_ok, "upper bound available");
  o.require(gap <= 0.020, "relative gap <= 0.020");
  o.require(gap >= -1e-6, "lower <= upper");
}

void c6_positive_difference(Outcome& o, Shared&) {
  const StateSpace g1 = fixture("pos_g1.json");
  const StateSpace g2 = fixture("pos_g2.json");
  const StateSpace g3 = fixture("pos_g3.json");
  CertifyOptions opts;
  opts.threads = hardware_threads();
  const BoundsReport r12 = certify(subtract(g1, g2), opts);
  const BoundsReport r13 = certify(subtract(g1, g3), opts);
  o.detail << "||G1-G2||=" << r12.l2_norm << " bracket [" << r12.best_lower << ", "
           << r12.best_upper << "]; ||G1-G3||=" << r13.l2_norm << " bracket ["
           << r13.best_lower << ", " << r13.best_upper << "]";
  o.require(within_rel(r12.l2_norm, 12.43, 0.01), "||G1-G2|| = 12.43 +- 1%");
  o.require(within_rel(r13.l2_norm, 15.69, 0.01), "||G1-G3|| = 15.69 +- 1%");
  o.require(within_rel(r12.best_lower, 12.31, 0.01), "G1-G2 lower = 12.31 +- 1%");
  o.require(within_rel(r12.best_upper, 12.37, 0.01), "G1-G2 upper = 12.37 +- 1%");
  o.require(within_rel(r13.best_lower, 11.23, 0.01), "G1-G3 lower = 11.23 +- 1%");
  o.require(within_rel(r13.best_upper, 11.89, 0.01), "G1-G3 upper = 11.89 +- 1%");
  o.require(r13.best_upper < r12.best_lower, "intervals disjoint, G1-G3 below G1-G2");
}

void c7_fourier(Outcome& o, Shared&) {
  const double s = parseval_check(200);
  const double a0 = fourier_coeffs(2).a0;
  o.detail << "parseval(200)=2-" << 2.0 - s << " a0-2/pi=" << a0 - 2.0 / std::numbers::pi;
  o.require(s > 2.0 - 1e-6 && s <= 2.0, "parseval(200) in (2 - 1e-6, 2]");
  o.require(std::abs(a0 - 2.0 / std::numbers::pi) <= 1e-15, "a0 = 2/pi");
}

void c8_sip(Outcome& o, Shared&) {
  const auto t0 = Clock::now();
  const SipResult r = sip_qp_oracle(20, 2001);
  o.detail.precision(8);
  o.detail << "value=" << r.value << " a0=" << r.coeffs[0] << " a3=" << r.coeffs[3]
           << " status=" << conic::to_string(r.status) << " time=" << seconds_since(t0) << "s";
  o.require(r.value >= 1.9 && r.value <= 2.0, "value in [1.9, 2.0]");
  o.require(r.value >= 2.0 - 0.05, "value >= 2 - 0.05");
}

void c9_matrix(Outcome& o, Shared&) {
  Matrix M(1, 2);
  M << 1, -1;
  const double lo = matrix_l2plus_lower(M);
  const double bf = matrix_l2plus_bruteforce(M);
  o.require(std::abs(lo - 1.0) <= 1e-9 && std::abs(bf - 1.0) <= 1e-9, "[1 -1]: lower = oracle = 1");

  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  double worst_nonneg = 0.0;
  for (int k = 0; k < 500; ++k) {
    Matrix R(3, 3);
    for (int i = 0; i < 9; ++i) R.data()[i] = g(rng);
    const double oracle = matrix_l2plus_bruteforce(R);
    const double thm = matrix_l2plus_lower(R);
    const double floor = max_singular(R).sigma / std::sqrt(2.0);
    if (oracle < thm - 1e-9 || thm < floor - 1e-9) ++violations;

    Matrix P(3, 3);
    for (int i = 0; i < 9; ++i) P.data()[i] = u(rng);
    worst_nonneg = std::max(worst_nonneg, std::abs(matrix_l2plus_lower(P) - max_singular(P).sigma));
  }
  o.detail << "[1 -1]: lower=" << lo << " oracle=" << bf << "; random violations=" << violations
           << "; nonnegative max deviation=" << worst_nonneg;
  o.require(violations == 0, "oracle >= bound >= sigma/sqrt2 on 500 matrices");
  o.require(worst_nonneg <= 1e-9, "nonnegative: bound = sigma_max");
}

void c10_uniform(Outcome& o, Shared&) {
  struct Case {
    NormKind p;
    const char* name;
    double nu;
  };
  for (const Case& c : {Case{NormKind::L1, "1", 1.0}, Case{NormKind::L2, "2", 1.0 / std::sqrt(2.0)},
                        Case{NormKind::Linf, "inf", 0.5}}) {
    const auto t0 = Clock::now();
    const DelayDemoResult r = delay_demo(1.0, c.p);
    const double t = seconds_since(t0);
    o.detail << "p=" << c.name << " ratio=" << r.ratio << " (" << t << "s) ";
    o.require(within_rel(r.ratio, c.nu, 0.02), std::string("p=") + c.name + " ratio within 2%");
    o.require(t < 10.0, std::string("p=") + c.name + " runtime < 10 s");
  }
}

void c11_properties(Outcome& o, Shared&) {
  std::mt19937_64 rng(1234567);
  std::uniform_int_distribution<int> dim_n(1, 5), dim_io(1, 3);
  int sandwich = 0, lower_mono = 0, upper_mono = 0, above_norm = 0, residual = 0, failures = 0;
  const auto t0 = Clock::now();
  for (int k = 0; k < 50; ++k) {
    const int n = dim_n(rng), n_w = dim_io(rng), n_z = dim_io(rng);
    const StateSpace s = random_stable(rng, n, n_w, n_z);
    const double g = hinf_norm(s).gain;
    const std::vector<UpsilonResult> lower = upsilon_sequence(s, 64);
    for (std::size_t i = 1; i < lower.size(); ++i) {
      if (lower[i].upsilon < lower[i - 1].upsilon - 1e-12) ++lower_mono;
    }
    const double best_lower = lower.back().upsilon;
    const SweepResult sw = sweep(s, {-1.0}, 4);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& c : sw.cells) {
      if (!c.ok()) {
        ++failures;
        continue;
      }
      if (best_lower > c.gamma + 1e-6) ++sandwich;
      if (c.gamma > prev + 1e-3) ++upper_mono;
      if (c.gamma > g * (1.0 + 1e-3)) ++above_norm;
      const auto& cert = c.certificate;
      if (cert.lmi_max_eig > 1e-6 || cert.s_min_eig < -1e-6 || cert.m_min_entry < -1e-6) {
        ++residual;
      }
      prev = c.gamma;
    }
  }
  o.detail << "50 systems in " << seconds_since(t0) << "s: sandwich=" << sandwich
           << " lower_monotone=" << lower_mono << " upper_monotone=" << upper_mono
           << " above_norm=" << above_norm << " residual=" << residual
           << " solver_failures=" << failures;
  o.require(sandwich == 0, "best_lower <= upper + 1e-6");
  o.require(lower_mono == 0, "upsilon non-decreasing");
  o.require(upper_mono == 0, "gamma non-increasing in N within 1e-3");
  o.require(above_norm == 0, "upper <= ||G|| (1 + 1e-3)");
  o.require(residual == 0, "certificate residuals <= 1e-6");
  o.require(failures == 0, "every cell solved");
}

void c12_simulation(Outcome& o, Shared& sh) {
  if (!sh.have_lower) {
    Outcome tmp;
    c4_lower(tmp, sh);
  }
  if (!sh.have_sweep) {
    Outcome tmp;
    c3_filtered(tmp, sh);
  }
  const StateSpace sys = example();
  UpsilonResult best = sh.lower.front();
  for (const auto& r : sh.lower) {
    if (r.upsilon > best.upsilon) best = r;
  }
  const PeakInfo peak = hinf_norm(sys);
  const double ratio =
      empirical_gain(sys, best.omega, peak.v, settle_periods_for(sys, best.omega), 4);
  o.detail << "empirical=" << ratio << " upsilon=" << best.upsilon << " omega=" << best.omega
           << " best_upper=" << sh.sweep.best_gamma;
  o.require(ratio >= 0.99 * best.upsilon, "empirical >= 0.99 upsilon");
  o.require(ratio <= 1.005 * sh.sweep.best_gamma, "empirical <= 1.005 best upper");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Outcome&, Shared&)>>> criteria{
      {"H-infinity regression", c1_hinf},
      {"filter-free upper bound", c2_filter_free},
      {"filtered upper bound sweep", c3_filtered},
      {"harmonic lower bound", c4_lower},
      {"certified gap", c5_gap},
      {"differences of positive systems", c6_positive_difference},
      {"Fourier coefficients and Parseval sum", c7_fourier},
      {"semi-infinite program oracle", c8_sip},
      {"matrix bounds", c9_matrix},
      {"uniform constants on the delay system", c10_uniform},
      {"random-system property suite", c11_properties},
      {"simulation cross-check", c12_simulation},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  Shared shared;
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    o.detail.precision(6);
    try {
      criteria[k].second(o, shared);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failed;
    std::printf("%s [%2d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
