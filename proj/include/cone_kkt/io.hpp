// JSON problem and certificate files (schema_version 1) and report encoders.
//
// Problem file:
//   { "schema_version": 1, "name": "...", "dim_x": n, "dim_y": m,
//     "Q": [[...]] | "zero", "c": [...], "d": 0, "A": [[...]], "b": [...],
//     "cone_K": ["nonneg"|"zero"|"free", ...], "cone_P": [...],
//     "p_norm_y": 2 | "inf" }
//
// Doubles are written in shortest round-trip form, so reading back a written
// file reproduces every number bit for bit.
#pragma once

#include "cone_kkt/kkt.hpp"
#include "cone_kkt/oracle.hpp"
#include "cone_kkt/problem.hpp"
#include "cone_kkt/regularity.hpp"
#include "cone_kkt/solver.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cone_kkt::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + ": expected a number");
  return j.get<double>();
}

inline Vector vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  Vector v(static_cast<std::ptrdiff_t>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<std::ptrdiff_t>(i)) = number(j[i], what + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix matrix(const json& j, const std::string& what, std::ptrdiff_t cols) {
  if (!j.is_array()) throw ParseError(what + ": expected an array of rows");
  Matrix m(static_cast<std::ptrdiff_t>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector(j[r], what + " row " + std::to_string(r));
    if (row.size() != cols)
      throw ParseError(what + " row " + std::to_string(r) + " has " +
                       std::to_string(row.size()) + " entries, expected " +
                       std::to_string(cols));
    m.row(static_cast<std::ptrdiff_t>(r)) = row.transpose();
  }
  return m;
}

inline ConeSpec cone(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array of cone tags");
  std::vector<ConeTag> tags;
  for (const auto& e : j) {
    if (!e.is_string()) throw ParseError(what + ": cone tags must be strings");
    auto t = parse_cone_tag(e.get<std::string>());
    if (!t) throw ParseError(what + ": unknown cone tag \"" + e.get<std::string>() + "\"");
    tags.push_back(*t);
  }
  return ConeSpec(std::move(tags));
}

inline std::ptrdiff_t dimension(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw ParseError(std::string(key) + ": expected a positive integer");
  return static_cast<std::ptrdiff_t>(v.get<long long>());
}

inline void check_schema(const json& j) {
  const json& v = field(j, "schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw ParseError("unsupported schema_version (expected 1)");
}

}  // namespace detail

inline json to_json(const Vector& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

inline json to_json(const Matrix& m) {
  json a = json::array();
  for (std::ptrdiff_t r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
  return a;
}

inline json to_json(const ConeSpec& c) {
  json a = json::array();
  for (ConeTag t : c.tags()) a.push_back(std::string(to_string(t)));
  return a;
}

inline json norm_exponent_json(double p) {
  return p == kInfNorm ? json("inf") : json(p);
}

/// Parses a problem document without validating it.
inline ProblemSpec problem_from_json(const json& j) {
  detail::check_schema(j);
  ProblemSpec p;
  const json& name = detail::field(j, "name");
  if (!name.is_string()) throw ParseError("name: expected a string");
  p.name = name.get<std::string>();
  const auto n = detail::dimension(j, "dim_x");
  const auto m = detail::dimension(j, "dim_y");

  const json& q = detail::field(j, "Q");
  if (q.is_string()) {
    if (q.get<std::string>() != "zero") throw ParseError("Q: expected a matrix or \"zero\"");
    p.objective.Q = Matrix::Zero(n, n);
  } else {
    p.objective.Q = detail::matrix(q, "Q", n);
  }
  p.objective.c = detail::vector(detail::field(j, "c"), "c");
  p.objective.d = detail::number(detail::field(j, "d"), "d");
  p.A = LinearMap(detail::matrix(detail::field(j, "A"), "A", n));
  p.b = detail::vector(detail::field(j, "b"), "b");
  p.K = detail::cone(detail::field(j, "cone_K"), "cone_K");
  p.P = detail::cone(detail::field(j, "cone_P"), "cone_P");
  if (auto it = j.find("p_norm_y"); it != j.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "inf") throw ParseError("p_norm_y: expected a number or \"inf\"");
      p.p_norm_y = kInfNorm;
    } else {
      p.p_norm_y = detail::number(*it, "p_norm_y");
    }
  }
  if (p.objective.c.size() != n)
    throw ParseError("c has " + std::to_string(p.objective.c.size()) + " entries, dim_x is " + std::to_string(n));
  if (p.b.size() != m)
    throw ParseError("b has " + std::to_string(p.b.size()) + " entries, dim_y is " + std::to_string(m));
  return p;
}

inline json problem_to_json(const ProblemSpec& p) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = p.name;
  j["dim_x"] = p.dim_x();
  j["dim_y"] = p.dim_y();
  if (p.objective.Q.size() > 0 && p.objective.Q.isZero(0.0))
    j["Q"] = "zero";
  else
    j["Q"] = to_json(p.objective.Q);
  j["c"] = to_json(p.objective.c);
  j["d"] = p.objective.d;
  j["A"] = to_json(p.A.matrix());
  j["b"] = to_json(p.b);
  j["cone_K"] = to_json(p.K);
  j["cone_P"] = to_json(p.P);
  j["p_norm_y"] = norm_exponent_json(p.p_norm_y);
  return j;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// Reads and validates a problem file. Throws ParseError or ValidationError.
inline ProblemSpec load_problem(const std::filesystem::path& path) {
  try {
    return validate(problem_from_json(read_json(path)));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// Writes `content` to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void save_json(const std::filesystem::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

struct CertificateFile {
  std::string problem_name;
  Vector x0;
  Vector z0;
  KktResiduals residuals;
  bool accepted = false;
  double tolerance = kDefaultCertTol;
  std::vector<std::string> notes;
};

inline std::vector<std::string> standard_notes() {
  return {
      "primal feasibility is checked as b - A x0 in P and x0 in K",
      "complementary slackness is checked as <z0, A x0 - b> = 0 at x0",
      "a zero multiplier z0 is accepted; non-vanishing is not enforced",
  };
}

inline CertificateFile make_certificate_file(const ProblemSpec& prob, const Certificate& cert,
                                             const Verdict& v, double tol) {
  CertificateFile f;
  f.problem_name = prob.name;
  f.x0 = cert.x0;
  f.z0 = cert.z0;
  f.residuals = v.residuals;
  f.accepted = v.accepted;
  f.tolerance = tol;
  f.notes = standard_notes();
  return f;
}

inline json certificate_to_json(const CertificateFile& f) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["problem_name"] = f.problem_name;
  j["x0"] = to_json(f.x0);
  j["z0"] = to_json(f.z0);
  json r = json::object();
  for (KktCondition c : kAllConditions)
    r[std::string(residual_key(c))] = residual_of(f.residuals, c);
  j["residuals"] = r;
  j["verdict"] = f.accepted ? "accepted" : "rejected";
  j["tolerance"] = f.tolerance;
  j["notes"] = f.notes;
  return j;
}

inline CertificateFile certificate_from_json(const json& j) {
  detail::check_schema(j);
  CertificateFile f;
  const json& name = detail::field(j, "problem_name");
  if (!name.is_string()) throw ParseError("problem_name: expected a string");
  f.problem_name = name.get<std::string>();
  f.x0 = detail::vector(detail::field(j, "x0"), "x0");
  f.z0 = detail::vector(detail::field(j, "z0"), "z0");
  if (!f.x0.allFinite() || !f.z0.allFinite()) throw ParseError("certificate entries must be finite");
  if (auto it = j.find("residuals"); it != j.end()) {
    for (KktCondition c : kAllConditions) {
      const std::string key(residual_key(c));
      const double r = detail::number(detail::field(*it, key.c_str()), key);
      if (r < 0.0) throw ParseError(key + ": residuals must be non-negative");
      residual_of(f.residuals, c) = r;
    }
  }
  if (auto it = j.find("verdict"); it != j.end()) {
    if (!it->is_string() || (*it != "accepted" && *it != "rejected"))
      throw ParseError("verdict: expected \"accepted\" or \"rejected\"");
    f.accepted = *it == "accepted";
  }
  if (auto it = j.find("tolerance"); it != j.end()) f.tolerance = detail::number(*it, "tolerance");
  if (auto it = j.find("notes"); it != j.end()) {
    if (!it->is_array()) throw ParseError("notes: expected an array of strings");
    for (const auto& s : *it) {
      if (!s.is_string()) throw ParseError("notes: expected an array of strings");
      f.notes.push_back(s.get<std::string>());
    }
  }
  return f;
}

inline CertificateFile load_certificate(const std::filesystem::path& path) {
  try {
    return certificate_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline json trace_to_json(const SolveTrace& t) {
  json j;
  j["iters"] = t.iters;
  j["converged"] = t.converged;
  j["step"] = t.step;
  json r = json::object();
  for (KktCondition c : kAllConditions)
    r[std::string(residual_key(c))] = residual_of(t.final_residuals, c);
  j["final_residuals"] = r;
  json h = json::array();
  for (const auto& p : t.history)
    h.push_back({{"iter", p.iter}, {"lagrangian", p.lagrangian}, {"merit", p.merit}});
  j["lagrangian_history"] = h;
  return j;
}

inline json regularity_to_json(const RegularityReport& r) {
  json eps;
  eps["eps_hat"] = r.eps.eps_hat;
  eps["directions_probed"] = r.eps.directions_probed;
  eps["norm_p"] = norm_exponent_json(r.eps.norm_p);
  eps["lambda_max"] = r.eps.lambda_max;
  eps["bisect_tol"] = r.eps.bisect_tol;
  json dirs = json::array();
  for (const auto& d : r.eps.per_direction)
    dirs.push_back({{"direction", to_json(d.direction)}, {"lambda", d.lambda},
                    {"converged", d.converged}});
  eps["per_direction"] = dirs;
  eps["warnings"] = r.eps.warnings;

  json sl;
  sl["holds"] = r.slater.holds;
  sl["margin"] = r.slater.margin;
  sl["witness"] = r.slater.witness ? to_json(*r.slater.witness) : json(nullptr);
  sl["reason"] = r.slater.reason;

  json eq;
  eq["applicable"] = r.equivalence.applicable;
  eq["slater_holds"] = r.equivalence.slater_holds;
  eq["eps_positive"] = r.equivalence.eps_positive;
  eq["consistent"] = r.equivalence.consistent;

  return {{"schema_version", kSchemaVersion}, {"epsilon", eps}, {"slater", sl},
          {"equivalence", eq}};
}

inline json oracle_to_json(const OracleSolution& s) {
  return {{"x_opt", to_json(s.x_opt)},
          {"value", s.value},
          {"active_set", s.active_set},
          {"z_recovered", to_json(s.z_recovered)},
          {"unique_multiplier", s.unique_multiplier}};
}

}  // namespace cone_kkt::io
