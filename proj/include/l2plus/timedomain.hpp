#pragma once

#include <iosfwd>

#include "l2plus/state_space.hpp"

namespace l2plus {

/// Uniformly sampled vector signal; row k holds the sample at t0 + k dt.
struct SampledSignal {
  Matrix values;  // samples x channels
  double dt = 1.0;
  double t0 = 0.0;

  Eigen::Index samples() const { return values.rows(); }
  Eigen::Index channels() const { return values.cols(); }
  double time(Eigen::Index k) const { return t0 + static_cast<double>(k) * dt; }
};

/// w_i(t) = |v_i| max(2 cos(omega t + theta_i), 0), theta_i = arg v_i, for
/// t in [0, t_end]. Throws InvalidArgument ("StepTooCoarse") when
/// dt > 2 pi / (1000 omega).
SampledSignal rectified_cosine_input(const CVector& v, double omega,
                                     double t_end, double dt);

/// Zero-order-hold response from x(0) = 0. Throws DimensionMismatch.
SampledSignal simulate(const StateSpace& sys, const SampledSignal& w);

enum class NormKind { L1, L2, Linf };

/// Trapezoidal integral of |w(t)|_p^p raised to 1/p; max |w(t)|_inf for Linf.
double lp_norm(const SampledSignal& sig, NormKind p);

/// Smallest whole number of periods 2 pi / omega after which transients
/// decay below 1e-6 (from the spectral abscissa of A).
int settle_periods_for(const StateSpace& sys, double omega);

/// Ratio of the RMS values of z and w over `measure_periods` periods after
/// `settle_periods` periods of the rectified cosine input built from v.
/// dt <= 0 selects period / 2000. Throws UnstableSystem, and
/// InvalidArgument when the settle window is shorter than
/// settle_periods_for.
double empirical_gain(const StateSpace& sys, double omega, const CVector& v,
                      int settle_periods, int measure_periods, double dt = 0.0);

struct DelayDemoResult {
  double ratio = 0.0;               // achieved_plus_norm / achieved_norm
  double achieved_norm = 0.0;       // signed input estimate of ||G*||_p
  double achieved_plus_norm = 0.0;  // nonnegative input estimate of ||G*||_p+
  double dt = 0.0;                  // step actually used (L / dt integral)
};

/// Gains of z(t) = w(t) - w(t - L) for worst-case signed and nonnegative
/// inputs over [0, horizon]. dt <= 0 selects L / 1000; horizon <= 0 selects
/// 200 L. Throws InvalidArgument for L <= 0 and "StepTooCoarse" when
/// dt > L / 1000.
DelayDemoResult delay_demo(double L, NormKind p, double dt = 0.0,
                           double horizon = 0.0);

/// Writes "t,w1..,z1.." rows; w and z must share the sampling grid.
void write_trajectory_csv(std::ostream& os, const SampledSignal& w,
                          const SampledSignal& z);

}  // namespace l2plus
