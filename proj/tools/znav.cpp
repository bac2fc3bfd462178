#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "znav/znav.hpp"

namespace {

using ojson = nlohmann::ordered_json;
using namespace znav;

constexpr int kSchemaVersion = 1;

enum Exit { Ok = 0, Failed = 1, Invalid = 2, OutOfDomain = 3, Numeric = 4 };

int exit_code(const Error& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const UnknownScenarioError*>(&e))
    return Invalid;
  if (dynamic_cast<const StepError*>(&e) || dynamic_cast<const SingularError*>(&e) ||
      dynamic_cast<const NegativeFormError*>(&e) || dynamic_cast<const StepFailureError*>(&e) ||
      dynamic_cast<const EmptyPathError*>(&e))
    return Numeric;
  return OutOfDomain;
}

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson jnum(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson jvec(const Vec& v) {
  ojson a = ojson::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back({v(k).real(), v(k).imag()});
  return a;
}

// "0.5+0.1i, 0.2" -> complex vector; each component is a constant expression.
Vec parse_point(const std::string& src, int n, const std::string& what) {
  std::vector<std::string> parts;
  std::stringstream ss(src);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (static_cast<int>(parts.size()) != n)
    throw ValidationError(what + ": expected " + std::to_string(n) + " comma-separated components");
  Vec v(n);
  for (int k = 0; k < n; ++k) {
    const auto e = expr::parse_field(parts[k], 0);
    if (e.max_var >= 0) throw ValidationError(what + ": components must be constants");
    v(k) = expr::eval_field(e, Vec());
  }
  return v;
}

// A path to a scenario file, or the name of a builtin scenario.
ScenarioFile load(const std::string& src) {
  if (std::filesystem::exists(src)) return load_scenario(src);
  for (const auto& n : builtin_names())
    if (n == src) return scenario_file_from_builtin(builtin(n));
  throw ValidationError("no scenario file or builtin named '" + src + "'");
}

ojson header(const char* command, const ScenarioFile& f) {
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"scenario", f.name}};
}

void emit(const ojson& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

int cmd_solve(const std::string& file, const std::string& at, const std::string& eta_src) {
  const ScenarioFile f = load(file);
  const ZermeloStructure& s = f.structure;
  const Vec z = parse_point(at, s.n, "--at");
  const Vec eta = parse_point(eta_src, s.n, "--eta");
  const auto cls = classify_solution(s);
  const auto p = s.at(z);
  ojson j = header("solve", f);
  j["z"] = jvec(z);
  j["eta"] = jvec(eta);
  j["kind"] = kind_name(cls.kind);
  j["convexity_warning"] = cls.warning;
  j["F"] = solve_forward(s, z, eta);
  j["eps"] = p.eps;
  j["f2"] = p.f2;
  j["W_norm2_h"] = p.W2;
  j["eta_norm_h"] = hermitian_norm(p.h, eta);
  if (cls.kind == SolutionKind::ConformalHermitian) {
    j["alpha"] = hermitian_norm(p.h / p.eps, eta);
    j["beta_abs"] = 0.0;
    j["b_norm2"] = 0.0;
  } else {
    const RandersData r = build_randers_data(s);
    const auto rp = r.at(z);
    j["alpha"] = hermitian_norm(rp.a, eta);
    j["beta_abs"] = std::abs(cplx(rp.b.transpose() * eta));
    j["b_norm2"] = rp.b_norm2;
  }
  emit(j, "");
  return Ok;
}

int cmd_geodesic(const std::string& file, const std::string& csv_path, const std::string& summary_path) {
  if (csv_path == "-" && (summary_path.empty() || summary_path == "-"))
    throw ValidationError("--csv - and the summary cannot both go to standard output; pass --summary FILE");
  const ScenarioFile f = load(file);
  if (!f.geodesic) throw ValidationError("scenario '" + f.name + "' has no geodesic block");
  const GeodesicSpec& g = *f.geodesic;
  const ZermeloStructure& s = f.structure;
  const Vec v0 = initial_velocity(f);
  GeodesicOptions opt;
  opt.tol = g.tol;
  opt.samples = g.samples;
  const GeodesicPath path = integrate_geodesic(forward_spray(s), g.start, v0, g.t0, g.t1, opt);

  const FinslerMetric mF = forward_metric(s);
  const auto dec = resultant_decomposition(s, path);
  if (!csv_path.empty()) {
    std::ofstream file_out;
    if (csv_path != "-") {
      file_out.open(csv_path);
      if (!file_out) throw ValidationError("cannot write '" + csv_path + "'");
    }
    std::ostream& out = csv_path == "-" ? std::cout : file_out;
    out << "t";
    for (int k = 1; k <= s.n; ++k) out << ",re_z" << k << ",im_z" << k;
    for (int k = 1; k <= s.n; ++k) out << ",re_eta" << k << ",im_eta" << k;
    out << ",F,norm_v_h,norm_W_h,norm_u_h\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
      out << num17(path.times[i]);
      for (int k = 0; k < s.n; ++k) out << ',' << num17(path.points[i](k).real()) << ',' << num17(path.points[i](k).imag());
      for (int k = 0; k < s.n; ++k)
        out << ',' << num17(path.velocities[i](k).real()) << ',' << num17(path.velocities[i](k).imag());
      out << ',' << num17(mF(path.points[i], path.velocities[i])) << ',' << num17(dec[i].norm_v) << ','
          << num17(dec[i].norm_W) << ',' << num17(dec[i].norm_u) << '\n';
    }
  }

  ojson j = header("geodesic", f);
  j["termination"] = termination_name(path.terminated_reason);
  j["t_span"] = {g.t0, path.times.back()};
  j["samples"] = path.size();
  j["accepted_steps"] = path.accepted_steps;
  j["rejected_steps"] = path.rejected_steps;
  j["start"] = jvec(g.start);
  j["velocity"] = jvec(v0);
  j["end"] = jvec(path.points.back());
  const auto lF = path_length_detailed(mF, path);
  j["l_F"] = lF.value;
  j["l_F_error_estimate"] = lF.error_estimate;
  if (classify_solution(s).kind != SolutionKind::ConformalHermitian)
    j["l_a"] = path_length(hermitian_metric(build_randers_data(s).a), path);
  j["l_h"] = path_length(hermitian_metric(s.h), path);
  emit(j, summary_path);
  return path.terminated_reason == Termination::Completed ? Ok : Numeric;
}

int cmd_classify(const std::string& file, int samples, int directions, std::uint64_t seed) {
  const ScenarioFile f = load(file);
  ClassifyOptions opt;
  opt.points = samples;
  opt.directions = directions;
  opt.seed = seed;
  opt.sample_domain = f.sample_domain;
  opt.sample_radius = f.sample_radius;
  const auto rep = classify(f.structure, opt);
  ojson j = header("classify", f);
  j["kind"] = rep.kind;
  j["seed"] = seed;
  j["samples_used"] = rep.samples_used;
  j["tolerances"] = {{"first", rep.tolerances.first},
                     {"second", rep.tolerances.second},
                     {"projective", rep.tolerances.projective},
                     {"constant_rel", rep.tolerances.constant_rel}};
  ojson flags = ojson::object();
  for (const auto& [name, r] : rep.flags) {
    ojson e = {{"value", flag_name(r.flag)}, {"residual", jnum(r.residual)}, {"tolerance", jnum(r.tolerance)}};
    if (!r.note.empty()) e["note"] = r.note;
    flags[name] = e;
  }
  j["flags"] = flags;
  ojson diag = ojson::object();
  for (const auto& [name, v] : rep.diagnostics) diag[name] = jnum(v);
  j["diagnostics"] = diag;
  emit(j, "");
  return Ok;
}

int cmd_verify(bool all, std::vector<std::string> names, const std::string& json_path) {
  if (all) names = builtin_names();
  if (names.empty()) throw ValidationError("verify needs --all or scenario names");
  std::vector<Scenario> scenarios;
  for (const auto& n : names) scenarios.push_back(builtin(n));
  std::sort(scenarios.begin(), scenarios.end(), [](const Scenario& a, const Scenario& b) { return a.name < b.name; });

  bool ok = true;
  ojson rows = ojson::array();
  std::printf("%-26s %-34s %-6s %-12s %s\n", "scenario", "check", "status", "residual", "tolerance");
  for (const auto& sc : scenarios) {
    const ScenarioReport rep = verify_scenario(sc);
    ok &= rep.passed();
    ojson checks = ojson::array();
    for (const auto& c : rep.checks) {
      std::printf("%-26s %-34s %-6s %-12.3e %.3e\n", sc.name.c_str(), c.name.c_str(), c.passed ? "pass" : "FAIL",
                  c.residual, c.tolerance);
      checks.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"residual", jnum(c.residual)},
                        {"tolerance", jnum(c.tolerance)},
                        {"detail", c.detail}});
    }
    std::printf("%-26s %-34s %s\n", sc.name.c_str(), "overall", rep.passed() ? "pass" : "FAIL");
    rows.push_back({{"scenario", sc.name}, {"passed", rep.passed()}, {"checks", checks}});
  }
  if (!json_path.empty()) {
    const ojson j = {{"schema_version", kSchemaVersion}, {"command", "verify"}, {"passed", ok}, {"scenarios", rows}};
    std::ofstream out(json_path);
    if (!out) throw ValidationError("cannot write '" + json_path + "'");
    out << j.dump(2) << "\n";
  }
  return ok ? Ok : Failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zermelo navigation on complex Finsler manifolds"};
  app.require_subcommand(1);

  std::string file, at, eta, csv, summary, json_out;
  int samples = 64, directions = 8;
  std::uint64_t seed = 0;
  bool all = false;
  std::vector<std::string> names;

  auto* solve = app.add_subcommand("solve", "evaluate F and the Randers data at a point");
  solve->add_option("scenario", file, "scenario JSON file or builtin name")->required();
  solve->add_option("--at", at, "point z, comma-separated complex components")->required();
  solve->add_option("--eta", eta, "direction eta, comma-separated complex components")->required();

  auto* geo = app.add_subcommand("geodesic", "integrate the geodesic of the scenario");
  geo->add_option("scenario", file, "scenario JSON file or builtin name")->required();
  geo->add_option("--csv", csv, "trajectory CSV path, '-' for standard output");
  geo->add_option("--summary", summary, "summary JSON path (default standard output)");

  auto* cls = app.add_subcommand("classify", "sample the geometric flags of the solution metric");
  cls->add_option("scenario", file, "scenario JSON file or builtin name")->required();
  cls->add_option("--samples", samples, "number of sample points")->check(CLI::PositiveNumber);
  cls->add_option("--directions", directions, "directions per point")->check(CLI::PositiveNumber);
  cls->add_option("--seed", seed, "sampling seed");

  auto* ver = app.add_subcommand("verify", "check builtin scenarios against their closed forms");
  ver->add_flag("--all", all, "verify every builtin scenario");
  ver->add_option("names", names, "builtin scenario names");
  ver->add_option("--json", json_out, "write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Invalid;
  }

  try {
    if (*solve) return cmd_solve(file, at, eta);
    if (*geo) return cmd_geodesic(file, csv, summary);
    if (*cls) return cmd_classify(file, samples, directions, seed);
    if (*ver) return cmd_verify(all, names, json_out);
  } catch (const Error& e) {
    std::cerr << "znav: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "znav: " << e.what() << "\n";
    return Numeric;
  }
  return Invalid;
}
