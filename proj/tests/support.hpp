#pragma once

#include <cmath>
#include <random>
#include <string>

#include "l2plus/io.hpp"
#include "l2plus/state_space.hpp"

namespace l2plus::testing {

inline std::string data_path(const std::string& file) {
  return std::string(L2PLUS_DATA_DIR) + "/" + file;
}

inline StateSpace fixture(const std::string& file) {
  return read_system(data_path(file));
}

inline StateSpace first_order() {
  StateSpace s;
  s.A = Matrix::Constant(1, 1, -1.0);
  s.B = Matrix::Ones(1, 1);
  s.C = Matrix::Ones(1, 1);
  s.D = Matrix::Zero(1, 1);
  return s;
}

/// Random stable system with spectral abscissa <= -0.1.
inline StateSpace random_stable(std::mt19937_64& rng, int n, int n_w, int n_z) {
  std::normal_distribution<double> g(0.0, 1.0);
  auto rand = [&](int r, int c) {
    Matrix M(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) M(i, j) = g(rng);
    return M;
  };
  StateSpace s;
  s.A = rand(n, n);
  if (n > 0) {
    const double a = spectral_abscissa(s.A);
    s.A -= (a + 0.1 + std::abs(g(rng))) * Matrix::Identity(n, n);
  }
  s.B = rand(n, n_w);
  s.C = rand(n_z, n);
  s.D = 0.5 * rand(n_z, n_w);
  return s;
}

/// G(jw) from a dense complex solve, independent of the library.
inline CMatrix response(const StateSpace& s, double w) {
  CMatrix G = s.D.cast<Complex>();
  if (s.n() == 0) return G;
  CMatrix R = Complex(0.0, w) * CMatrix::Identity(s.n(), s.n()) - s.A.cast<Complex>();
  G += s.C.cast<Complex>() * R.fullPivLu().solve(s.B.cast<Complex>());
  return G;
}

inline double sigma_max(const CMatrix& G) {
  return Eigen::JacobiSVD<CMatrix>(G).singularValues()(0);
}

/// sup_w sigma_max(G(jw)) by a dense log sweep with local ternary search.
inline double hinf_sweep(const StateSpace& s) {
  double best = sigma_max(response(s, 0.0));
  double best_w = 0.0;
  const int K = 4000;
  for (int k = 0; k <= K; ++k) {
    const double w = std::pow(10.0, -4.0 + 8.0 * k / K);
    const double v = sigma_max(response(s, w));
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  best = std::max(best, sigma_max(s.D.cast<Complex>()));
  if (best_w > 0.0) {
    double a = std::log(best_w) - 0.01, b = std::log(best_w) + 0.01;
    for (int it = 0; it < 200; ++it) {
      const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      if (sigma_max(response(s, std::exp(m1))) < sigma_max(response(s, std::exp(m2))))
        a = m1;
      else
        b = m2;
    }
    best = std::max(best, sigma_max(response(s, std::exp(0.5 * (a + b)))));
  }
  return best;
}

/// Cosine coefficient (1/pi) int_{-pi}^{pi} max(2 cos t, 0) cos(m t) dt by
/// composite Simpson on the support [-pi/2, pi/2].
inline double rectified_cosine_coefficient(int m) {
  const int K = 20000;
  const double a = -M_PI / 2, h = M_PI / K;
  double s = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double t = a + k * h;
    const double f = 2.0 * std::cos(t) * std::cos(m * t);
    s += f * (k == 0 || k == K ? 1.0 : (k % 2 ? 4.0 : 2.0));
  }
  const double integral = s * h / 3.0;
  return m == 0 ? integral / (2.0 * M_PI) : integral / M_PI;
}

}  // namespace l2plus::testing
