#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "l2plus/copositive_sdp.hpp"
#include "l2plus/harmonic.hpp"
#include "l2plus/io.hpp"
#include "l2plus/report.hpp"
#include "l2plus/timedomain.hpp"

using namespace l2plus;

namespace {

enum Exit { kOk = 0, kParse = 2, kUnstable = 3, kSolver = 4 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnstableSystem: return kUnstable;
    case ErrorKind::NumericalFailure:
    case ErrorKind::Infeasible: return kSolver;
    default: return kParse;
  }
}

std::vector<double> parse_csv(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw 0;
    } catch (...) {
      throw Error(ErrorKind::ParseError, "bad number in list: '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, "empty list");
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  os << text;
}

std::string omega_text(double w) {
  std::ostringstream os;
  if (std::isinf(w)) {
    os << "inf";
  } else {
    os << std::fixed << std::setprecision(4) << w;
  }
  return os.str();
}

std::string peak_text(const PeakInfo& p) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << p.gain << " @ "
     << (p.kind == PeakKind::AtFinite ? "omega*=" : "omega=")
     << (p.kind == PeakKind::AtZero ? "0" : omega_text(p.omega)) << " ("
     << to_string(p.kind) << ")";
  return os.str();
}

std::string vector_text(const CVector& v) {
  std::ostringstream os;
  os << std::setprecision(6) << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    if (v(i).imag() == 0.0) {
      os << v(i).real();
    } else {
      os << v(i).real() << (v(i).imag() < 0 ? " - " : " + ")
         << std::abs(v(i).imag()) << 'j';
    }
  }
  return os.str() + "]";
}

struct Flags {
  std::string alpha = "-0.8,-1.0,-1.2";
  int max_degree = 15;
  int max_harmonics = 200;
  double solver_tol = 1e-8;
  int grid_per_decade = 200;
  double dt = 0.0;
  std::string out;
  std::string csv;
  std::uint64_t seed = 1;
  std::string triplets;
  std::vector<std::string> files;
  std::string matrix;
  std::string p = "2";
  double delay = 1.0;
};

CertifyOptions certify_options(const Flags& f) {
  CertifyOptions o;
  o.alphas = parse_csv(f.alpha);
  o.max_degree = f.max_degree;
  o.max_harmonics = f.max_harmonics;
  o.solver_tol = f.solver_tol;
  o.grid.points_per_decade = f.grid_per_decade;
  return o;
}

void print_summary(const BoundsReport& r) {
  std::cout << std::fixed << std::setprecision(4);
  std::cout << "system: " << (r.system_name.empty() ? "(unnamed)" : r.system_name)
            << "\nl2_norm: " << peak_text(r.peak) << '\n';
  if (!r.upper_bounds.empty()) {
    std::cout << "upper bounds:\n";
    for (const auto& c : r.upper_bounds) {
      std::cout << "  alpha=" << std::setw(7) << c.alpha << "  N=" << std::setw(2)
                << c.N << "  gamma=" << c.gamma << "  "
                << conic::to_string(c.solver_status) << '\n';
    }
  }
  if (!r.lower_bounds.empty()) {
    std::cout << "lower bounds:\n";
    for (const auto& l : r.lower_bounds) {
      std::cout << "  N=" << std::setw(3) << l.N << "  upsilon=" << l.upsilon
                << "  omega=" << omega_text(l.omega) << '\n';
    }
  }
  if (r.has_upper()) {
    std::cout << "best upper: " << r.best_upper << " (alpha=" << r.best_alpha
              << ", N=" << r.best_N << ")\n";
  }
  if (r.has_lower()) {
    std::cout << "best lower: " << r.best_lower << " (N=" << r.best_lower_N << ")\n"
              << "uniform floor: " << r.uniform_floor
              << (r.exceeds_uniform_floor ? " (exceeded)" : " (not exceeded)") << '\n';
  }
  if (r.has_upper() && r.has_lower()) {
    std::cout << "relative gap: " << r.relative_gap << '\n';
  }
}

int emit_report(const BoundsReport& r, const Flags& f) {
  print_summary(r);
  if (!f.out.empty()) write_file(f.out, report_json(r));
  if (!f.csv.empty()) {
    std::ostringstream os;
    write_report_csv(os, r);
    write_file(f.csv, os.str());
  }
  const bool upper_ok = r.upper_bounds.empty() || r.has_upper();
  const bool lower_ok = r.lower_bounds.empty() || r.has_lower();
  return upper_ok && lower_ok ? kOk : kSolver;
}

int cmd_hinf(const Flags& f) {
  const StateSpace sys = read_system(f.files.at(0));
  const PeakInfo p = hinf_norm(sys);
  std::cout << peak_text(p) << "\nv = " << vector_text(p.v) << '\n';
  if (!f.out.empty()) {
    BoundsReport r;
    r.system_name = sys.name;
    r.peak = p;
    r.l2_norm = p.gain;
    r.uniform_floor = p.gain / std::sqrt(2.0);
    write_file(f.out, report_json(r));
  }
  return kOk;
}

int cmd_certify(const Flags& f, bool upper, bool lower) {
  const StateSpace sys = read_system(f.files.at(0));
  CertifyOptions o = certify_options(f);
  o.upper = upper;
  o.lower = lower;
  if (upper && !f.triplets.empty()) {
    const AugmentedSystem aug = augment(
        sys, build_filter(o.alphas.front(), o.max_degree, sys.n_w()));
    std::ofstream os(f.triplets);
    if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write " + f.triplets);
    conic::write_triplets(os, assemble_lmi(aug).problem);
  }
  const BoundsReport r = certify(sys, o);
  if (lower && !upper && !f.csv.empty()) {
    print_summary(r);
    if (!f.out.empty()) write_file(f.out, report_json(r));
    std::ostringstream os;
    write_upsilon_curve_csv(os, sys, o.max_harmonics, o.grid);
    write_file(f.csv, os.str());
    return r.has_lower() ? kOk : kSolver;
  }
  return emit_report(r, f);
}

int cmd_diff(const Flags& f) {
  const StateSpace a = read_system(f.files.at(0));
  const StateSpace b = read_system(f.files.at(1));
  StateSpace d = subtract(a, b);
  d.name = (a.name.empty() ? f.files[0] : a.name) + " - " +
           (b.name.empty() ? f.files[1] : b.name);
  return emit_report(certify(d, certify_options(f)), f);
}

int cmd_matrix(const Flags& f) {
  Matrix M;
  const std::string& src = f.matrix;
  if (!src.empty() && src.front() == '[') {
    M = parse_matrix(src);
  } else {
    std::ifstream in(src);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + src);
    std::ostringstream ss;
    ss << in.rdbuf();
    M = parse_matrix(ss.str());
  }
  const double lower = matrix_l2plus_lower(M);
  const double sigma = max_singular(M).sigma;
  BruteForceOptions bo;
  bo.seed = f.seed;
  double oracle = std::numeric_limits<double>::quiet_NaN();
  if (M.cols() <= bo.max_columns) oracle = matrix_l2plus_bruteforce(M, bo);
  std::cout << std::setprecision(10) << "sigma_max: " << sigma << "\nlower: " << lower
            << "\noracle: ";
  if (std::isnan(oracle)) {
    std::cout << "skipped (more than " << bo.max_columns << " columns)\n";
  } else {
    std::cout << oracle << '\n';
  }
  if (!f.out.empty()) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["sigma_max"] = sigma;
    j["lower"] = lower;
    j["oracle"] = std::isnan(oracle) ? nlohmann::ordered_json() : nlohmann::ordered_json(oracle);
    write_file(f.out, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_uniform_demo(const Flags& f) {
  NormKind p;
  double nu;
  if (f.p == "1") {
    p = NormKind::L1;
    nu = 1.0;
  } else if (f.p == "2") {
    p = NormKind::L2;
    nu = 1.0 / std::sqrt(2.0);
  } else if (f.p == "inf") {
    p = NormKind::Linf;
    nu = 0.5;
  } else {
    throw Error(ErrorKind::ParseError, "--p must be 1, 2 or inf");
  }
  const DelayDemoResult r = delay_demo(f.delay, p, f.dt);
  std::cout << std::fixed << std::setprecision(4) << "p=" << f.p << " L=" << f.delay
            << "\nsigned gain: " << r.achieved_norm
            << "\nnonnegative gain: " << r.achieved_plus_norm << "\nratio: " << r.ratio
            << " (uniform constant " << nu << ")\n";
  if (!f.out.empty()) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["p"] = f.p;
    j["delay"] = f.delay;
    j["dt"] = r.dt;
    j["achieved_norm"] = r.achieved_norm;
    j["achieved_plus_norm"] = r.achieved_plus_norm;
    j["ratio"] = r.ratio;
    write_file(f.out, j.dump(2) + "\n");
  }
  if (!f.csv.empty() && p == NormKind::L2) {
    // One period pair of the nonnegative input and its delayed difference.
    const StateSpace pass = StateSpace::static_gain(Matrix::Identity(1, 1));
    const double omega = std::numbers::pi / f.delay;
    const double dt = f.dt > 0.0 ? f.dt : f.delay / 1000.0;
    SampledSignal w = rectified_cosine_input(CVector::Ones(1), omega, 4.0 * f.delay, dt);
    SampledSignal z = simulate(pass, w);
    const Eigen::Index d = static_cast<Eigen::Index>(std::llround(f.delay / dt));
    for (Eigen::Index k = d; k < z.samples(); ++k) z.values(k, 0) -= w.values(k - d, 0);
    std::ofstream os(f.csv);
    write_trajectory_csv(os, w, z);
  }
  return kOk;
}

int cmd_positivity(const Flags& f) {
  const StateSpace sys = read_system(f.files.at(0));
  const bool metzler = is_metzler(sys.A);
  const bool internal = is_internally_positive(sys);
  std::cout << std::boolalpha << "Metzler A: " << metzler
            << "\ninternally positive: " << internal << '\n';
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["metzler"] = metzler;
  j["internally_positive"] = internal;
  if (is_hurwitz(sys.A)) {
    double horizon = 10.0;
    if (sys.n() > 0) horizon = std::log(1e9) / -spectral_abscissa(sys.A);
    const bool external = is_externally_positive_sampled(sys, horizon, horizon / 2000.0);
    std::cout << "externally positive (sampled): " << external << '\n';
    j["externally_positive_sampled"] = external;
  } else {
    std::cout << "externally positive (sampled): skipped, A is not Hurwitz\n";
    j["externally_positive_sampled"] = nullptr;
  }
  if (!f.out.empty()) write_file(f.out, j.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds on the L2+ induced norm of LTI systems"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", f.out, "JSON report path");
    c->add_option("--csv", f.csv, "CSV output path");
  };
  auto add_upper = [&](CLI::App* c) {
    c->add_option("--alpha", f.alpha, "Comma-separated filter poles")->capture_default_str();
    c->add_option("--max-degree", f.max_degree, "Largest filter degree")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    c->add_option("--solver-tol", f.solver_tol, "Solver tolerance")
        ->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto add_lower = [&](CLI::App* c) {
    c->add_option("--max-harmonics", f.max_harmonics, "Largest harmonic order")
        ->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--grid-per-decade", f.grid_per_decade, "Frequency grid density")
        ->check(CLI::PositiveNumber)->capture_default_str();
  };

  auto* hinf = app.add_subcommand("hinf", "L2 induced norm and peak direction");
  hinf->add_option("file", f.files, "System JSON")->required()->expected(1);
  hinf->add_option("--out", f.out, "JSON report path");

  auto* cert = app.add_subcommand("certify", "Upper and lower bounds with their gap");
  cert->add_option("file", f.files, "System JSON")->required()->expected(1);
  add_upper(cert);
  add_lower(cert);
  add_common(cert);

  auto* upper = app.add_subcommand("upper", "Upper bounds over the (alpha, N) grid");
  upper->add_option("file", f.files, "System JSON")->required()->expected(1);
  add_upper(upper);
  add_common(upper);
  upper->add_option("--triplets", f.triplets,
                    "Dump the largest-degree problem of the first alpha as triplets");

  auto* lower = app.add_subcommand("lower", "Harmonic lower bounds");
  lower->add_option("file", f.files, "System JSON")->required()->expected(1);
  add_lower(lower);
  lower->add_option("--out", f.out, "JSON report path");
  lower->add_option("--csv", f.csv, "CSV of h_N(omega) for the largest N");

  auto* diff = app.add_subcommand("diff", "Bounds for the difference of two systems");
  diff->add_option("files", f.files, "Two system JSON files")->required()->expected(2);
  add_upper(diff);
  add_lower(diff);
  add_common(diff);

  auto* matrix = app.add_subcommand("matrix", "L2+ norm bounds for a static matrix");
  matrix->add_option("matrix", f.matrix, "JSON file or inline rows such as [[1,-1]]")
      ->required();
  matrix->add_option("--seed", f.seed, "Seed for the brute-force oracle")->capture_default_str();
  matrix->add_option("--out", f.out, "JSON report path");

  auto* demo = app.add_subcommand("uniform-demo", "Delay system attaining the uniform constant");
  demo->add_option("--p", f.p, "Norm index: 1, 2 or inf")->capture_default_str();
  demo->add_option("--delay", f.delay, "Delay L in seconds")
      ->check(CLI::PositiveNumber)->capture_default_str();
  demo->add_option("--dt", f.dt, "Time step (default L/1000)");
  add_common(demo);

  auto* pos = app.add_subcommand("positivity", "Internal and external positivity checks");
  pos->add_option("file", f.files, "System JSON")->required()->expected(1);
  pos->add_option("--out", f.out, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (app.got_subcommand(hinf)) return cmd_hinf(f);
    if (app.got_subcommand(cert)) return cmd_certify(f, true, true);
    if (app.got_subcommand(upper)) return cmd_certify(f, true, false);
    if (app.got_subcommand(lower)) return cmd_certify(f, false, true);
    if (app.got_subcommand(diff)) return cmd_diff(f);
    if (app.got_subcommand(matrix)) return cmd_matrix(f);
    if (app.got_subcommand(demo)) return cmd_uniform_demo(f);
    if (app.got_subcommand(pos)) return cmd_positivity(f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  }
  return kOk;
}
