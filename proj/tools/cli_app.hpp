// Command-line front end: solve | check | probe | oracle.
//
// Exit codes: 0 success/accepted, 1 rejected certificate (or infeasible for
// oracle), 2 parse or validation error, 3 non-convergence, 4 enumeration guard.
#pragma once

#include "cone_kkt/cone_kkt.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cone_kkt::cli {

enum ExitCode : int {
  kOk = 0,
  kRejected = 1,
  kParseError = 2,
  kNotConverged = 3,
  kGuardExceeded = 4,
};

inline std::uint64_t default_seed() {
  if (const char* s = std::getenv("CONE_KKT_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
    }
  }
  return 0;
}

inline std::string fmt_vec(const Vector& v) {
  std::ostringstream os;
  os << std::setprecision(10) << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

inline std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline void print_residuals(std::ostream& os, const KktResiduals& r, double tol) {
  os << "  condition                  residual        status\n";
  for (KktCondition c : kAllConditions) {
    const double v = residual_of(r, c);
    os << "  " << std::left << std::setw(26) << to_string(c) << " " << std::setw(15)
       << std::scientific << std::setprecision(6) << v << " "
       << (v <= tol ? "ok" : "VIOLATED") << "\n"
       << std::defaultfloat;
  }
}

inline std::filesystem::path default_cert_path(const std::filesystem::path& problem) {
  std::filesystem::path out = problem;
  out.replace_extension();
  out += ".cert.json";
  return out;
}

struct Args {
  std::string problem;
  std::string certificate;
  std::string out;
  double tol = kDefaultCertTol;
  std::size_t max_iters = SolverOptions{}.max_iters;
  double step_scale = SolverOptions{}.step_scale;
  std::size_t dirs = ProbeOptions{}.n_random_dirs;
  std::optional<std::uint64_t> seed;

  SolverOptions solver() const {
    SolverOptions o;
    o.max_iters = max_iters;
    o.step_scale = step_scale;
    o.seed = seed.value_or(default_seed());
    return o;
  }
};

inline int cmd_solve(const Args& a, std::ostream& out, std::ostream& err) {
  const ProblemSpec prob = io::load_problem(a.problem);
  const SaddleSolution sol = solve_saddle(prob, a.solver());
  out << "problem " << prob.name << ": " << sol.trace.iters << " iterations, converged="
      << (sol.trace.converged ? "true" : "false") << "\n";
  if (!sol.trace.converged) {
    out << io::trace_to_json(sol.trace).dump(2) << "\n";
    err << "error: solver did not converge within " << a.max_iters << " iterations\n";
    return kNotConverged;
  }
  const Verdict v = verify_certificate(prob, sol.certificate, a.tol);
  out << "  x0 = " << fmt_vec(sol.certificate.x0) << "\n"
      << "  z0 = " << fmt_vec(sol.certificate.z0) << "\n"
      << "  objective = " << std::setprecision(12) << prob.objective.value(sol.certificate.x0)
      << std::defaultfloat << "\n";
  print_residuals(out, v.residuals, a.tol);
  out << "verdict: " << (v.accepted ? "accepted" : "rejected") << "\n";

  const std::filesystem::path dest =
      a.out.empty() ? default_cert_path(a.problem) : std::filesystem::path(a.out);
  io::save_json(dest, io::certificate_to_json(
                          io::make_certificate_file(prob, sol.certificate, v, a.tol)));
  out << "certificate written to " << dest.string() << "\n";
  return v.accepted ? kOk : kRejected;
}

inline int cmd_check(const Args& a, std::ostream& out, std::ostream&) {
  const ProblemSpec prob = io::load_problem(a.problem);
  const io::CertificateFile cf = io::load_certificate(a.certificate);
  const Certificate cert{cf.x0, cf.z0};
  check_certificate_dims(prob, cert);
  const Verdict v = verify_certificate(prob, cert, a.tol);
  out << "problem " << prob.name << ", tolerance " << a.tol << "\n";
  print_residuals(out, v.residuals, a.tol);
  out << "verdict: " << (v.accepted ? "accepted" : "rejected") << "\n";
  for (const auto& f : v.failures)
    out << "  failed: " << to_string(f.condition) << " (residual " << f.residual << ")\n";
  return v.accepted ? kOk : kRejected;
}

inline int cmd_probe(const Args& a, std::ostream& out, std::ostream& err) {
  const ProblemSpec prob = io::load_problem(a.problem);
  ProbeOptions po;
  po.n_random_dirs = a.dirs;
  po.seed = a.seed.value_or(default_seed());
  po.solver = a.solver();
  const RegularityReport r = probe_regularity(prob, po);

  out << "problem " << prob.name << "\n";
  out << "strong simultaneity: eps_hat = " << std::setprecision(8) << r.eps.eps_hat
      << " (estimated over " << r.eps.directions_probed << " directions, p = "
      << (r.eps.norm_p == kInfNorm ? std::string("inf") : fmt_num(r.eps.norm_p))
      << ", bisection tolerance " << r.eps.bisect_tol << ")\n";
  for (const auto& w : r.eps.warnings) out << "  warning: " << w << "\n";
  if (r.slater.holds)
    out << "slater: holds, margin " << r.slater.margin << ", witness "
        << fmt_vec(*r.slater.witness) << "\n";
  else
    out << "slater: fails: " << r.slater.reason << "\n";
  if (!r.equivalence.applicable)
    out << "equivalence: not applicable (P has empty interior)\n";
  else
    out << "equivalence: " << (r.equivalence.consistent ? "consistent" : "INCONSISTENT")
        << " (slater " << (r.equivalence.slater_holds ? "holds" : "fails")
        << ", eps positive " << (r.equivalence.eps_positive ? "yes" : "no") << ")\n";
  out << std::defaultfloat;

  if (!a.out.empty()) io::save_json(a.out, io::regularity_to_json(r));
  if (r.eps.flagged() > 0) {
    err << "error: phase-1 did not converge along " << r.eps.flagged() << " direction(s)\n";
    return kNotConverged;
  }
  return kOk;
}

inline int cmd_oracle(const Args& a, std::ostream& out, std::ostream& err) {
  const ProblemSpec prob = io::load_problem(a.problem);
  OracleSolution os;
  try {
    os = oracle_solve(prob);
  } catch (const OracleInfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kRejected;
  }
  const SaddleSolution sol = solve_saddle(prob, a.solver());
  const double solver_value = prob.objective.value(sol.certificate.x0);
  out << "problem " << prob.name << "\n" << std::setprecision(12);
  out << "                 oracle                 solver\n";
  out << "  objective      " << std::left << std::setw(22) << os.value << " "
      << solver_value << "\n";
  out << "  |z|            " << std::setw(22) << os.z_recovered.norm() << " "
      << sol.certificate.z0.norm() << "\n" << std::defaultfloat;
  out << "  oracle x   = " << fmt_vec(os.x_opt) << "\n";
  out << "  oracle z   = " << fmt_vec(os.z_recovered) << " (minimal norm)\n";
  out << "  solver x   = " << fmt_vec(sol.certificate.x0) << "\n";
  out << "  solver z   = " << fmt_vec(sol.certificate.z0) << "\n";
  out << "  unique_multiplier=" << (os.unique_multiplier ? "true" : "false") << "\n";
  out << "  solver converged=" << (sol.trace.converged ? "true" : "false") << " after "
      << sol.trace.iters << " iterations\n";
  if (!a.out.empty()) {
    io::json j = io::oracle_to_json(os);
    j["solver"] = {{"x0", io::to_json(sol.certificate.x0)},
                   {"z0", io::to_json(sol.certificate.z0)},
                   {"value", solver_value},
                   {"trace", io::trace_to_json(sol.trace)}};
    io::save_json(a.out, j);
  }
  return kOk;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solve, certify and probe cone-constrained convex programs", "cone-kkt"};
  app.require_subcommand(1);
  Args a;

  auto add_solver_flags = [&](CLI::App* c) {
    c->add_option("--max-iters", a.max_iters, "Iteration cap for the saddle solver");
    c->add_option("--step-scale", a.step_scale, "Step scale in (0,1)");
  };
  auto add_seed = [&](CLI::App* c) {
    c->add_option("--seed", a.seed, "RNG seed (default: $CONE_KKT_SEED or 0)");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve a problem and write a certificate");
  solve->add_option("problem", a.problem, "Problem JSON file")->required();
  solve->add_option("--tol", a.tol, "Certificate acceptance tolerance");
  solve->add_option("--out", a.out, "Certificate output path");
  add_solver_flags(solve);
  add_seed(solve);

  CLI::App* check = app.add_subcommand("check", "Verify a certificate against a problem");
  check->add_option("problem", a.problem, "Problem JSON file")->required();
  check->add_option("certificate", a.certificate, "Certificate JSON file")->required();
  check->add_option("--tol", a.tol, "Acceptance tolerance");

  CLI::App* probe = app.add_subcommand("probe", "Estimate eps0, test Slater, compare them");
  probe->add_option("problem", a.problem, "Problem JSON file")->required();
  probe->add_option("--dirs", a.dirs, "Random directions on top of the basis directions");
  probe->add_option("--out", a.out, "Write the JSON report here");
  add_solver_flags(probe);
  add_seed(probe);

  CLI::App* oracle = app.add_subcommand("oracle", "Exact enumeration vs. the saddle solver");
  oracle->add_option("problem", a.problem, "Problem JSON file")->required();
  oracle->add_option("--out", a.out, "Write the JSON comparison here");
  add_solver_flags(oracle);
  add_seed(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  try {
    if (*solve) return cmd_solve(a, out, err);
    if (*check) return cmd_check(a, out, err);
    if (*probe) return cmd_probe(a, out, err);
    if (*oracle) return cmd_oracle(a, out, err);
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const EnumerationGuardError& e) {
    err << "error: " << e.what() << "\n";
    return kGuardExceeded;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
  return kParseError;
}

}  // namespace cone_kkt::cli
