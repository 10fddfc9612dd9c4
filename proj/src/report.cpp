#include "l2plus/report.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

namespace l2plus {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

BoundsReport::BoundsReport()
    : best_upper(kNaN), best_lower(kNaN), relative_gap(kNaN) {}

bool BoundsReport::has_upper() const { return !std::isnan(best_upper); }
bool BoundsReport::has_lower() const { return !std::isnan(best_lower); }

double relative_gap(double upper, double lower) {
  if (upper == 0.0 && lower == 0.0) return 0.0;
  return (upper - lower) / upper;
}

BoundsReport certify(const StateSpace& sys, const CertifyOptions& opts) {
  validate(sys);
  if (!is_hurwitz(sys.A)) {
    throw Error(ErrorKind::UnstableSystem, "A is not Hurwitz");
  }
  BoundsReport r;
  r.system_name = sys.name;
  r.peak = hinf_norm(sys);
  r.l2_norm = r.peak.gain;
  r.uniform_floor = r.l2_norm / std::sqrt(2.0);

  if (opts.upper) {
    conic::SolverOptions so;
    so.abs_tol = so.rel_tol = opts.solver_tol;
    const int threads = opts.threads > 0
                            ? opts.threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const SweepResult sw = sweep(sys, opts.alphas, opts.max_degree, so, threads);
    r.upper_bounds = sw.cells;
    if (sw.any_ok) {
      r.best_upper = sw.best_gamma;
      r.best_alpha = sw.best_alpha;
      r.best_N = sw.best_N;
    }
  }
  if (opts.lower) {
    r.lower_bounds = upsilon_sequence(sys, opts.max_harmonics, opts.grid);
    for (const auto& row : r.lower_bounds) {
      if (!r.has_lower() || row.upsilon > r.best_lower) {
        r.best_lower = row.upsilon;
        r.best_lower_omega = row.omega;
        r.best_lower_N = row.N;
      }
    }
    r.exceeds_uniform_floor = r.best_lower >= r.uniform_floor - 1e-6;
  }
  if (r.has_upper() && r.has_lower()) {
    r.relative_gap = relative_gap(r.best_upper, r.best_lower);
  }
  return r;
}

std::string report_json(const BoundsReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = 1;
  j["system_name"] = r.system_name;
  j["l2_norm"] = number(r.l2_norm);
  ordered_json peak;
  peak["kind"] = to_string(r.peak.kind);
  peak["omega"] = number(r.peak.omega);
  ordered_json v_re = ordered_json::array(), v_im = ordered_json::array();
  for (Eigen::Index i = 0; i < r.peak.v.size(); ++i) {
    v_re.push_back(r.peak.v(i).real());
    v_im.push_back(r.peak.v(i).imag());
  }
  peak["v_real"] = v_re;
  peak["v_imag"] = v_im;
  j["peak"] = peak;

  ordered_json ub = ordered_json::array();
  for (const auto& c : r.upper_bounds) {
    ordered_json row;
    row["alpha"] = c.alpha;
    row["N"] = c.N;
    row["gamma"] = number(c.gamma);
    row["status"] = conic::to_string(c.solver_status);
    row["objective_gap"] = number(c.objective_gap);
    row["p_bound_active"] = c.certificate.p_bound_active;
    ub.push_back(row);
  }
  j["upper_bounds"] = ub;
  ordered_json lb = ordered_json::array();
  for (const auto& l : r.lower_bounds) {
    ordered_json row;
    row["N"] = l.N;
    row["upsilon"] = number(l.upsilon);
    row["omega"] = number(l.omega);
    lb.push_back(row);
  }
  j["lower_bounds"] = lb;
  j["best_upper"] = number(r.best_upper);
  j["best_alpha"] = r.best_alpha;
  j["best_N"] = r.best_N;
  j["best_lower"] = number(r.best_lower);
  j["best_lower_N"] = r.best_lower_N;
  j["best_lower_omega"] = number(r.best_lower_omega);
  j["relative_gap"] = number(r.relative_gap);
  j["uniform_floor"] = number(r.uniform_floor);
  j["exceeds_uniform_floor"] = r.exceeds_uniform_floor;
  return j.dump(2) + "\n";
}

void write_report_csv(std::ostream& os, const BoundsReport& r) {
  os << "table,alpha,N,value,omega,status\n" << std::setprecision(17);
  for (const auto& c : r.upper_bounds) {
    os << "upper," << c.alpha << ',' << c.N << ',' << c.gamma << ",,"
       << conic::to_string(c.solver_status) << '\n';
  }
  for (const auto& l : r.lower_bounds) {
    os << "lower,," << l.N << ',' << l.upsilon << ',' << l.omega << ",\n";
  }
}

}  // namespace l2plus
