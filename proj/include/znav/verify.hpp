#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "classification.hpp"
#include "errors.hpp"
#include "finsler.hpp"
#include "geodesic.hpp"
#include "navigation.hpp"
#include "sampling.hpp"
#include "scenarios.hpp"
#include "spray.hpp"

namespace znav {

struct Check {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  std::vector<Check> checks;
  ClassificationReport classification;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
};

struct VerifyOptions {
  int points = 16;
  int directions = 4;
  std::uint64_t seed = 0;
  double path_tol = 1e-6;
  double length_tol = 1e-6;
  double along_tol = 1e-7;
  GeodesicOptions geodesic;
  Tolerances tolerances = Tolerances::from_env();
};

namespace detail {

inline Check residual_check(std::string name, double residual, double tol, std::string detail = {}) {
  return {std::move(name), residual <= tol, residual, tol, std::move(detail)};
}

inline double angle_distance(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi)); }

}  // namespace detail

inline ScenarioReport verify_scenario(const Scenario& sc, const VerifyOptions& opt = {}) {
  ScenarioReport rep;
  rep.name = sc.name;
  const ZermeloStructure& s = sc.structure;
  const auto cls = classify_solution(s);
  const Domain dom = intersect([&s](const Vec& p) { return s.contains(p); }, sc.sample_domain);
  const auto pts = sample_points(s.n, opt.points, dom, sc.sample_radius, opt.seed);

  try {
    double eps_min = INFINITY;
    for (const auto& p : pts) eps_min = std::min(eps_min, s.at(p).eps);
    rep.checks.push_back({"mild_wind", eps_min > 0.0, eps_min, 0.0, "minimum eps over samples"});
  } catch (const Error& e) {
    rep.checks.push_back({"mild_wind", false, 0.0, 0.0, e.what()});
    return rep;
  }

  const FinslerMetric mF = forward_metric(s);
  if (cls.kind == SolutionKind::Randers) {
    const RandersData r = build_randers_data(s);
    double defect = 0.0, solve_defect = 0.0;
    const auto dirs = sample_directions(s.n, static_cast<int>(pts.size()), opt.seed + 7);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      defect = std::max(defect, std::abs(r.at(pts[k]).b_norm2 - b_norm2_closed_form(s, pts[k])));
      const double F = solve_forward(s, pts[k], dirs[k]);
      solve_defect = std::max(solve_defect, std::abs(r.F(pts[k], dirs[k]) - F) / F);
    }
    rep.checks.push_back(detail::residual_check("b_norm2_formula", defect, 1e-10));
    rep.checks.push_back(detail::residual_check("randers_matches_forward", solve_defect, 1e-10));
  }

  ClassifyOptions co;
  co.points = opt.points;
  co.directions = opt.directions;
  co.seed = opt.seed;
  co.sample_domain = sc.sample_domain;
  co.sample_radius = sc.sample_radius;
  co.tolerances = opt.tolerances;
  rep.classification = classify(s, co);

  if (!sc.reference) return rep;
  const ReferenceSolution& ref = *sc.reference;
  for (const auto& [name, expected] : ref.flags) {
    auto it = rep.classification.flags.find(name);
    if (it == rep.classification.flags.end()) {
      rep.checks.push_back({"flag:" + name, false, 0.0, 0.0, "flag not reported"});
      continue;
    }
    const Flag want = expected ? Flag::True : Flag::False;
    rep.checks.push_back({"flag:" + name, it->second.flag == want, it->second.residual, it->second.tolerance,
                          std::string("got ") + flag_name(it->second.flag) + ", want " + flag_name(want)});
  }

  const auto [z0, v0] = ref.geodesic.at(ref.t0);
  GeodesicPath path;
  try {
    path = integrate_geodesic(forward_spray(s), z0, v0, ref.t0, ref.t1, opt.geodesic);
  } catch (const Error& e) {
    rep.checks.push_back({"geodesic", false, 0.0, opt.path_tol, e.what()});
    return rep;
  }
  double sup = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k)
    sup = std::max(sup, (path.points[k] - ref.geodesic.at(path.times[k]).first).cwiseAbs().maxCoeff());
  rep.checks.push_back(detail::residual_check("geodesic_sup_error", sup, opt.path_tol,
                                              termination_name(path.terminated_reason)));
  rep.checks.back().passed &= path.terminated_reason == Termination::Completed;

  for (const auto& [which, expected] : ref.lengths) {
    double l = 0.0;
    if (which == "F") l = path_length(mF, path);
    else if (which == "h") l = path_length(hermitian_metric(s.h), path);
    else if (which == "a") l = path_length(hermitian_metric(build_randers_data(s).a), path);
    else throw ValidationError("unknown reference length '" + which + "'");
    rep.checks.push_back(detail::residual_check("length_" + which, std::abs(l - expected), opt.length_tol,
                                                "computed " + std::to_string(l)));
  }

  if (!ref.along.empty()) {
    const auto dec = resultant_decomposition(s, path);
    for (const auto& [which, expected] : ref.along) {
      double worst = 0.0;
      for (const auto& d : dec) {
        if (which == "norm_v_h") worst = std::max(worst, std::abs(d.norm_v - expected));
        else if (which == "arg_vW") worst = std::max(worst, detail::angle_distance(d.arg_vW, expected));
        else if (which == "cos_uW") worst = std::max(worst, std::abs(d.cos_uW - expected));
        else throw ValidationError("unknown path diagnostic '" + which + "'");
      }
      rep.checks.push_back(detail::residual_check("along_" + which, worst, which == "norm_v_h" ? 1e-8 : opt.along_tol));
    }
  }

  if (cls.kind == SolutionKind::Randers && rep.classification.flag("projectively_flat") == Flag::True) {
    // locally Minkowski: g depends on eta only, and all holomorphic curvatures vanish
    const RandersData r = build_randers_data(s);
    const auto dirs = sample_directions(s.n, static_cast<int>(pts.size()), opt.seed + 11);
    double gvar = 0.0, kmax = 0.0;
    const FinslerMetric ma = hermitian_metric(r.a), mh = hermitian_metric(s.h);
    const Spray sF = forward_spray(s), sa = hermitian_spray_evaluator(r.a), sh = hermitian_spray_evaluator(s.h);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Mat g0 = fundamental_tensor(mF, pts[0], dirs[k]).g;
      gvar = std::max(gvar, (fundamental_tensor(mF, pts[k], dirs[k]).g - g0).cwiseAbs().maxCoeff());
      kmax = std::max({kmax, std::abs(holomorphic_curvature(mF, sF, pts[k], dirs[k]).K),
                       std::abs(holomorphic_curvature(ma, sa, pts[k], dirs[k]).K),
                       std::abs(holomorphic_curvature(mh, sh, pts[k], dirs[k]).K)});
    }
    rep.checks.push_back(detail::residual_check("fundamental_tensor_z_variation", gvar, 1e-8));
    rep.checks.push_back(detail::residual_check("curvatures_vanish", kmax, 1e-6));
  }
  return rep;
}

}  // namespace znav
