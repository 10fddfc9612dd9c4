#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <sstream>

#include "l2plus/harmonic.hpp"
#include "l2plus/timedomain.hpp"
#include "support.hpp"

using namespace l2plus;
using namespace l2plus::testing;

namespace {

constexpr double kPi = std::numbers::pi;

SampledSignal constant(double value, double t_end, double dt, int channels = 1) {
  SampledSignal s;
  s.dt = dt;
  const Eigen::Index n = static_cast<Eigen::Index>(std::llround(t_end / dt)) + 1;
  s.values = Matrix::Constant(n, channels, value);
  return s;
}

}  // namespace

TEST_CASE("rectified cosine samples") {
  const double dt = 2.0 * kPi / 4000.0;
  const SampledSignal w = rectified_cosine_input(CVector::Ones(1), 1.0, 2.0 * kPi, dt);
  CHECK(w.values(0, 0) == doctest::Approx(2.0));
  CHECK(w.values(1000, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w.values(2000, 0) == 0.0);
  CHECK((w.values.array() >= 0.0).all());
  // Mean over one period is 2/pi; mean square is 1.
  CHECK(lp_norm(w, NormKind::L1) / (2.0 * kPi) == doctest::Approx(2.0 / kPi).epsilon(1e-5));
  const double ms = std::pow(lp_norm(w, NormKind::L2), 2) / (2.0 * kPi);
  CHECK(std::abs(ms - 1.0) <= 1e-4);
}

TEST_CASE("rectified cosine phases") {
  CVector v(2);
  v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  const double dt = 2.0 * kPi / 2000.0;
  const SampledSignal w = rectified_cosine_input(v, 1.0, 4.0 * kPi, dt);
  for (Eigen::Index k = 0; k + 1000 < w.samples(); k += 37) {
    CHECK(w.values(k + 1000, 1) == doctest::Approx(w.values(k, 0)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(rectified_cosine_input(v, 1.0, 1.0, 0.01), Error);
  CHECK_THROWS_AS(rectified_cosine_input(v, 0.0, 1.0, 1e-4), Error);
}

TEST_CASE("step response of a first-order lag") {
  const SampledSignal u = constant(1.0, 5.0, 0.01);
  const SampledSignal z = simulate(first_order(), u);
  for (Eigen::Index k = 0; k < z.samples(); k += 50) {
    CHECK(std::abs(z.values(k, 0) - (1.0 - std::exp(-z.time(k)))) <= 1e-6);
  }
  CHECK(simulate(first_order(), constant(0.0, 1.0, 0.01)).values.norm() == 0.0);
  CHECK_THROWS_AS(simulate(first_order(), constant(1.0, 1.0, 0.01, 2)), Error);
}

TEST_CASE("sinusoidal steady state of the example system") {
  const StateSpace sys = fixture("example6.json");
  const double w = 0.5;
  const double period = 2.0 * kPi / w;
  const int settle = settle_periods_for(sys, w);
  const double dt = period / 2000.0;
  SampledSignal u;
  u.dt = dt;
  const Eigen::Index n = 2000 * (settle + 1) + 1;
  u.values = Matrix::Zero(n, sys.n_w());
  for (Eigen::Index k = 0; k < n; ++k) u.values(k, 0) = std::cos(w * k * dt);
  const SampledSignal z = simulate(sys, u);
  const CMatrix G = response(sys, w);
  // Amplitude of each output over the final period.
  for (Eigen::Index i = 0; i < sys.n_z(); ++i) {
    const double amp = z.values.col(i).tail(2001).cwiseAbs().maxCoeff();
    CHECK(std::abs(amp - std::abs(G(i, 0))) <= 0.005 * std::abs(G(i, 0)) + 1e-9);
  }
}

TEST_CASE("signal norms") {
  const SampledSignal one = constant(1.0, 1.0, 0.001);
  CHECK(lp_norm(one, NormKind::Linf) == 1.0);
  CHECK(lp_norm(one, NormKind::L1) == doctest::Approx(1.0));
  CHECK(lp_norm(one, NormKind::L2) == doctest::Approx(1.0));
  SampledSignal c;
  c.dt = 2.0 * kPi / 10000.0;
  c.values.resize(10001, 1);
  for (Eigen::Index k = 0; k <= 10000; ++k) c.values(k, 0) = 2.0 * std::cos(k * c.dt);
  CHECK(std::pow(lp_norm(c, NormKind::L2), 2) / (2.0 * kPi) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("empirical gain of a first-order lag near DC") {
  const StateSpace s = first_order();
  const double w = 1e-3;
  const double r = empirical_gain(s, w, CVector::Ones(1), settle_periods_for(s, w), 1);
  CHECK(r == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(empirical_gain(fixture("example6.json"), 0.16, CVector::Ones(3) / std::sqrt(3.0), 0, 1), Error);
}

TEST_CASE("empirical gain matches the harmonic prediction") {
  const StateSpace sys = fixture("example6.json");
  const UpsilonResult u = upsilon(sys, 200);
  const PeakInfo peak = hinf_norm(sys);
  const int settle = settle_periods_for(sys, u.omega);
  const double r = empirical_gain(sys, u.omega, peak.v, settle, 2);
  CHECK(r >= 0.99 * u.upsilon);
  CHECK(r <= 1.01 * u.upsilon);
  // Halving the step barely moves the ratio.
  const double period = 2.0 * kPi / u.omega;
  const double r2 = empirical_gain(sys, u.omega, peak.v, settle, 2, period / 4000.0);
  CHECK(std::abs(r2 - r) <= 0.002 * r);
}

TEST_CASE("positive systems map nonnegative inputs to nonnegative outputs") {
  const StateSpace sys = fixture("pos_g1.json");
  CVector v(2);
  v << 0.6, std::polar(0.8, 2.0);
  const double w = 0.7;
  const SampledSignal in = rectified_cosine_input(v, w, 40.0, 2.0 * kPi / (2000.0 * w));
  const SampledSignal out = simulate(sys, in);
  CHECK(out.values.minCoeff() >= -1e-9);
}

TEST_CASE("delay system reaches the uniform constants") {
  const DelayDemoResult r1 = delay_demo(1.0, NormKind::L1);
  CHECK(std::abs(r1.ratio - 1.0) <= 0.02);
  const DelayDemoResult r2 = delay_demo(1.0, NormKind::L2);
  CHECK(std::abs(r2.ratio - 1.0 / std::sqrt(2.0)) <= 0.02 / std::sqrt(2.0));
  CHECK(std::abs(r2.achieved_norm - 2.0) <= 0.02 * 2.0);
  CHECK(std::abs(r2.achieved_plus_norm - std::sqrt(2.0)) <= 0.02 * std::sqrt(2.0));
  const DelayDemoResult ri = delay_demo(1.0, NormKind::Linf);
  CHECK(std::abs(ri.ratio - 0.5) <= 0.01);
  // dt is adjusted so that L is a whole number of steps.
  const DelayDemoResult r3 = delay_demo(0.3, NormKind::L2, 0.3 / 1234.5);
  CHECK(std::abs(0.3 / r3.dt - std::round(0.3 / r3.dt)) < 1e-9);
  CHECK(std::abs(delay_demo(1.0, NormKind::L2, 1.0 / 2000.0).ratio - r2.ratio) <= 0.002 * r2.ratio);
  CHECK_THROWS_AS(delay_demo(1.0, NormKind::L2, 0.01), Error);
  CHECK_THROWS_AS(delay_demo(-1.0, NormKind::L2), Error);
}

TEST_CASE("trajectory CSV") {
  const SampledSignal w = constant(1.0, 0.02, 0.01);
  const SampledSignal z = simulate(first_order(), w);
  std::ostringstream os;
  write_trajectory_csv(os, w, z);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,w1,z1");
  std::getline(is, line);
  CHECK(line == "0,1,0");
  CHECK_THROWS_AS(write_trajectory_csv(os, w, constant(1.0, 0.05, 0.01)), Error);
}
