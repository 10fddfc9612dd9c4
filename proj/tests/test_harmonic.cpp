#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <sstream>

#include "l2plus/harmonic.hpp"
#include "support.hpp"

using namespace l2plus;
using namespace l2plus::testing;

namespace {

/// h_N(w) evaluated from scratch with the direction rules applied inline.
double h_direct(const StateSpace& s, const PeakInfo& peak, int N, double w) {
  const double a0 = rectified_cosine_coefficient(0);
  const Eigen::Index n_w = peak.v.size();
  auto dir = [&](int m) {
    CVector u(n_w);
    for (Eigen::Index i = 0; i < n_w; ++i) {
      const double r = std::abs(peak.v(i)), th = std::arg(peak.v(i));
      u(i) = std::polar(r, m * th);
    }
    return u;
  };
  double sum = 2.0 * a0 * a0 * (response(s, 0.0) * dir(0)).squaredNorm();
  for (int m = 1; m <= N; ++m) {
    const double a = rectified_cosine_coefficient(m);
    sum += a * a * (response(s, m * w) * dir(m)).squaredNorm();
  }
  return std::sqrt(sum / 2.0);
}

}  // namespace

TEST_CASE("Fourier coefficients match quadrature") {
  const HarmonicCoefficients c = fourier_coeffs(12);
  CHECK(c.a0 == 2.0 / std::numbers::pi);
  CHECK(c.a[1] == 1.0);
  CHECK(c.a[2] == doctest::Approx(4.0 / (3.0 * std::numbers::pi)).epsilon(1e-15));
  CHECK(c.a[3] == 0.0);
  CHECK(c.a[4] == doctest::Approx(-4.0 / (15.0 * std::numbers::pi)).epsilon(1e-15));
  for (int m = 0; m <= 12; ++m) {
    CHECK(std::abs(c.a[m] - rectified_cosine_coefficient(m)) <= 1e-9);
  }
  CHECK_THROWS_AS(fourier_coeffs(0), Error);
}

TEST_CASE("Parseval partial sums") {
  CHECK(parseval_check(1) == doctest::Approx(2.0 * 4.0 / (std::numbers::pi * std::numbers::pi) + 1.0));
  const double s200 = parseval_check(200);
  CHECK(s200 <= 2.0);
  CHECK(2.0 - s200 < 1e-6);
  CHECK(2.0 - s200 > 0.0);
  for (int N = 4; N <= 64; N *= 2) {
    const double s = parseval_check(N);
    CHECK(s <= 2.0);
    CHECK(s > 2.0 - 1.0 / (N * N));
    CHECK(parseval_check(N + 1) >= s);
  }
}

TEST_CASE("harmonic directions") {
  PeakInfo p;
  p.kind = PeakKind::AtZero;
  p.v = CVector(2);
  p.v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  const HarmonicDirections d = harmonic_directions(p, 3);
  CHECK(d.vs[0](1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(d.vs[2](1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(d.vs[1](0) + d.vs[1](1)) < 1e-15);
  CHECK((d.vs[3] - d.vs[1]).norm() == 0.0);

  p.kind = PeakKind::AtFinite;
  p.v = CVector::Zero(2);
  p.v(0) = std::polar(1.0, 0.7);
  const HarmonicDirections f = harmonic_directions(p, 4);
  CHECK(std::abs(f.vs[2](0) - std::polar(1.0, 1.4)) < 1e-15);
  CHECK(f.vs[2](1) == Complex(0.0));
  for (int m = 0; m <= 4; ++m) {
    CHECK(std::abs(f.vs[m](0)) == doctest::Approx(1.0));
  }
  CHECK((f.vs[1] - p.v).norm() < 1e-15);

  p.kind = PeakKind::AtInfinity;
  p.v = CVector(2);
  p.v << 0.6, 0.8;
  const HarmonicDirections i = harmonic_directions(p, 2);
  for (int m = 0; m <= 2; ++m) CHECK((i.vs[m] - p.v).norm() == 0.0);
  // Mixed signs: the mean and even harmonics of a nonnegative input carry v_abs.
  p.v << 0.6, -0.8;
  const HarmonicDirections j = harmonic_directions(p, 2);
  CHECK(std::min((j.vs[1] - p.v).norm(), (j.vs[1] + p.v).norm()) == 0.0);
  CHECK(j.vs[0](0) == Complex(0.6));
  CHECK(j.vs[0](1) == Complex(0.8));
  CHECK(j.vs[2](1) == Complex(0.8));

  // Single input: every direction is 1.
  p.kind = PeakKind::AtFinite;
  p.v = CVector::Ones(1);
  for (const auto& u : harmonic_directions(p, 5).vs) CHECK(u(0) == Complex(1.0));
}

TEST_CASE("AtZero sign convention prefers the larger positive part") {
  PeakInfo p;
  p.kind = PeakKind::AtZero;
  p.v = CVector(3);
  p.v << 0.8, -0.5, -0.33;
  p.v.normalize();
  const HarmonicDirections d = harmonic_directions(p, 1);
  const Vector v = d.v.real();
  CHECK(v.cwiseMax(0.0).norm() >= (-v).cwiseMax(0.0).norm());
  p.v = -p.v;
  CHECK((harmonic_directions(p, 1).v - d.v).norm() < 1e-15);
}

TEST_CASE("first-order lag: limit form") {
  for (int N : {1, 4, 50}) {
    const UpsilonResult r = upsilon(first_order(), N);
    CHECK(r.upsilon == doctest::Approx(std::sqrt(parseval_check(N) / 2.0)).epsilon(1e-12));
  }
  CHECK(upsilon(first_order(), 200).upsilon == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("example system lower bound") {
  const StateSpace sys = fixture("example6.json");
  const std::vector<UpsilonResult> seq = upsilon_sequence(sys, 200);
  REQUIRE(seq.size() == 9);
  CHECK(seq.front().N == 1);
  CHECK(seq.back().N == 200);
  for (std::size_t k = 1; k < seq.size(); ++k) {
    CHECK(seq[k].upsilon >= seq[k - 1].upsilon - 1e-12);
  }
  CHECK(std::abs(seq.back().upsilon - 5.1080) <= 0.01 * 5.1080);
  CHECK(seq.back().upsilon > 7.0667 / std::sqrt(2.0));

  // The reported value is attained at the reported frequency.
  const PeakInfo peak = hinf_norm(sys);
  const UpsilonResult r8 = seq[3];
  CHECK(h_direct(sys, peak, r8.N, r8.omega) == doctest::Approx(r8.upsilon).epsilon(1e-9));
}

TEST_CASE("upsilon dominates the grid and the uniform floor on random systems") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 15; ++trial) {
    const StateSpace s = random_stable(rng, 1 + trial % 5, 1 + trial % 3, 1 + (trial / 2) % 3);
    const PeakInfo peak = hinf_norm(s);
    const UpsilonResult r = upsilon(s, 8);
    CHECK(r.upsilon >= peak.gain / std::sqrt(2.0) - 1e-9);
    CHECK(r.upsilon <= peak.gain * (1.0 + 1e-9));
    if (peak.kind == PeakKind::AtFinite) {
      for (double f : {0.3, 0.9, 1.0, 1.7}) {
        CHECK(r.upsilon >= h_direct(s, peak, 8, f * peak.omega) - 1e-9);
      }
    }
  }
}

TEST_CASE("phase invariance") {
  const StateSpace sys = fixture("example6.json");
  PeakInfo peak = hinf_norm(sys);
  PeakInfo rotated = peak;
  rotated.v *= std::polar(1.0, 1.1);
  const double w = peak.omega * 1.3;
  CHECK(h_direct(sys, rotated, 16, w) == doctest::Approx(h_direct(sys, peak, 16, w)).epsilon(1e-12));
}

TEST_CASE("notch system stays at the uniform floor") {
  // G(s) = s / (s^2 + 0.2 s + 4): zero at DC; all harmonics of the peak at
  // w = 2 fall well below the peak, so upsilon barely exceeds ||G|| / sqrt2.
  StateSpace s;
  s.A = Matrix(2, 2);
  s.A << 0, 1, -4, -0.2;
  s.B = Matrix(2, 1);
  s.B << 0, 1;
  s.C = Matrix(1, 2);
  s.C << 0, 1;
  s.D = Matrix::Zero(1, 1);
  const double g = hinf_norm(s).gain;
  const double u = upsilon(s, 64).upsilon;
  CHECK(u >= g / std::sqrt(2.0) - 1e-9);
  CHECK(u <= g / std::sqrt(2.0) * 1.01);
}

TEST_CASE("static gain through the harmonic path") {
  Matrix M(2, 3);
  M << 1, -2, 0.5, 0.3, 1, -1;
  const StateSpace s = StateSpace::static_gain(M);
  const double u = upsilon(s, 200).upsilon;
  const SingularPair sp = max_singular(M);
  Vector v = sp.v.real();
  if (v.cwiseMax(0.0).norm() < (-v).cwiseMax(0.0).norm()) v = -v;
  const double thm = std::sqrt((sp.sigma * sp.sigma + (M * v.cwiseAbs()).squaredNorm()) / 2.0);
  CHECK(u >= thm - 1e-6);
  CHECK(u <= matrix_l2plus_bruteforce(M) + 1e-9);
}

TEST_CASE("matrix bounds") {
  Matrix M(1, 2);
  M << 1, -1;
  CHECK(matrix_l2plus_lower(M) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(matrix_l2plus_bruteforce(M) == doctest::Approx(1.0).epsilon(1e-12));
  Matrix D(2, 2);
  D << 1, 0, 0, 2;
  CHECK(matrix_l2plus_bruteforce(D) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(matrix_l2plus_lower(Matrix::Identity(2, 2)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(matrix_l2plus_lower(Matrix::Zero(2, 2)), Error);
  CHECK_THROWS_AS(matrix_l2plus_bruteforce(Matrix::Ones(2, 7)), Error);
}

TEST_CASE("brute force matches an exhaustive angle search for two columns") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix M(3, 2);
    for (int i = 0; i < 6; ++i) M.data()[i] = g(rng);
    double best = 0.0;
    for (int k = 0; k <= 200000; ++k) {
      const double th = std::numbers::pi / 2 * k / 200000.0;
      Vector x(2);
      x << std::cos(th), std::sin(th);
      best = std::max(best, (M * x).norm());
    }
    const double bf = matrix_l2plus_bruteforce(M);
    CHECK(bf >= best - 1e-9);
    CHECK(bf <= best + 1e-6);
    CHECK(bf >= matrix_l2plus_lower(M) - 1e-9);
  }
}

TEST_CASE("semi-infinite program oracle") {
  const SipResult r = sip_qp_oracle(8, 401);
  CHECK(r.value >= 1.0);
  CHECK(r.coeffs[1] == 1.0);
  // The sampled constraint holds at the samples.
  for (int k = 0; k < 401; ++k) {
    const double t = std::numbers::pi * k / 400.0;
    double w = r.coeffs[0];
    for (int m = 1; m <= 8; ++m) w += r.coeffs[m] * std::cos(m * t);
    CHECK(w >= -1e-6);
  }
  // The optimum stays near the infinite-order value 2.
  CHECK(r.value <= 2.2);
  CHECK_THROWS_AS(sip_qp_oracle(1, 200), Error);
  CHECK_THROWS_AS(sip_qp_oracle(4, 50), Error);
}

TEST_CASE("CSV output") {
  std::ostringstream table;
  write_upsilon_table_csv(table, {{1, 2.5, 0.25}});
  CHECK(table.str() == "N,upsilon,omega\n1,2.5,0.25\n");
  std::ostringstream curve;
  GridOptions g;
  g.points_per_decade = 2;
  write_upsilon_curve_csv(curve, first_order(), 4, g);
  std::istringstream is(curve.str());
  std::string line;
  int rows = 0;
  std::getline(is, line);
  CHECK(line == "omega,h");
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 13);
}

TEST_CASE("unstable systems are rejected") {
  StateSpace s = first_order();
  s.A(0, 0) = 1.0;
  CHECK_THROWS_AS(upsilon(s, 4), Error);
}
