#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "expr.hpp"
#include "linalg.hpp"
#include "navigation.hpp"
#include "scenarios.hpp"
#include "wirtinger.hpp"

namespace znav {

struct GeodesicSpec {
  Vec start;
  Vec velocity;          // used as given unless from_F_unit
  bool from_F_unit = false;  // velocity is a direction rescaled to F(start, velocity) = 1
  double t0 = 0.0, t1 = 1.0;
  double tol = 1e-10;
  int samples = 257;
};

struct ScenarioFile {
  std::string name;
  int dimension = 0;
  std::string metric_source;  // builtin id or "expressions"
  ZermeloStructure structure;
  std::optional<GeodesicSpec> geodesic;
  Domain sample_domain;
  double sample_radius = 1.0;
};

namespace detail {

using json = nlohmann::json;

inline cplx json_complex(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ValidationError(what + ": expected a number or [re, im]");
}

inline Vec json_point(const json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ValidationError(what + ": expected an array of " + std::to_string(n) + " complex values");
  Vec v(n);
  for (int k = 0; k < n; ++k) v(k) = json_complex(j[k], what + "[" + std::to_string(k) + "]");
  return v;
}

// A field entry is an expression string or a constant complex value.
inline expr::FieldExpr json_expr(const json& j, int n, const std::string& what) {
  try {
    if (j.is_string()) return expr::parse_field(j.get<std::string>(), n);
    const cplx c = json_complex(j, what);
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.17g)+(%.17g)*i", c.real(), c.imag());
    return expr::parse_field(buf, n);
  } catch (const ParseError& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ValidationError(what + ": unknown key '" + k + "'");
}

// Each predicate expression must evaluate to a positive real number inside the domain.
inline Domain json_domain(const json& j, int n, const std::string& what) {
  std::vector<expr::FieldExpr> preds;
  if (j.is_string()) preds.push_back(json_expr(j, n, what));
  else if (j.is_array())
    for (std::size_t k = 0; k < j.size(); ++k) preds.push_back(json_expr(j[k], n, what + "[" + std::to_string(k) + "]"));
  else throw ValidationError(what + ": expected an expression or a list of expressions");
  if (preds.empty()) return {};
  return [preds](const Vec& z) {
    for (const auto& p : preds) {
      cplx v;
      try {
        v = expr::eval_field(p, z);
      } catch (const DomainError&) {
        return false;
      }
      if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real()))) return false;
    }
    return true;
  };
}

}  // namespace detail

inline ScenarioFile parse_scenario(const nlohmann::json& j) {
  using detail::json_expr;
  using json = nlohmann::json;
  if (!j.is_object()) throw ValidationError("scenario: expected a JSON object");
  detail::check_keys(j, {"name", "dimension", "metric", "wind", "speed", "speed2", "cos_phi", "domain", "geodesic",
                         "sampling", "outputs"},
                     "scenario");
  for (const char* k : {"name", "dimension", "metric", "wind", "cos_phi"})
    if (!j.contains(k)) throw ValidationError(std::string("scenario: missing '") + k + "'");
  ScenarioFile f;
  if (!j["name"].is_string()) throw ValidationError("name: expected a string");
  f.name = j["name"].get<std::string>();
  if (!j["dimension"].is_number_integer() || j["dimension"].get<int>() < 1)
    throw ValidationError("dimension: expected a positive integer");
  const int n = f.dimension = j["dimension"].get<int>();

  Domain dom;
  if (j.contains("domain")) dom = detail::json_domain(j["domain"], n, "domain");

  ZermeloStructure& s = f.structure;
  s.n = n;
  const json& jm = j["metric"];
  if (jm.is_string()) {
    f.metric_source = jm.get<std::string>();
    if (f.metric_source == "euclidean") {
      s.h.eval = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
    } else if (f.metric_source == "hartogs" || f.metric_source == "hartogs_weighted") {
      if (n != 2) throw ValidationError("metric: Hartogs metrics need dimension 2");
      const bool weighted = f.metric_source == "hartogs_weighted";
      s.h.eval = [weighted](const Vec& p) { return detail::hartogs_hessian(p, weighted); };
      dom = intersect(detail::in_hartogs, dom);
    } else {
      throw ValidationError("metric: unknown builtin '" + f.metric_source + "'");
    }
  } else if (jm.is_array()) {
    f.metric_source = "expressions";
    if (static_cast<int>(jm.size()) != n) throw ValidationError("metric: expected " + std::to_string(n) + " rows");
    std::vector<expr::FieldExpr> entries;
    for (int i = 0; i < n; ++i) {
      if (!jm[i].is_array() || static_cast<int>(jm[i].size()) != n)
        throw ValidationError("metric[" + std::to_string(i) + "]: expected " + std::to_string(n) + " entries");
      for (int k = 0; k < n; ++k)
        entries.push_back(json_expr(jm[i][k], n, "metric[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
    }
    s.h.eval = [entries, n](const Vec& z) {
      Mat m(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) m(i, k) = expr::eval_field(entries[i * n + k], z);
      if (!is_hermitian(m, 1e-10))
        throw ValidationError("metric is not Hermitian at " + format_point(z));
      return m;
    };
  } else {
    throw ValidationError("metric: expected a builtin id or a matrix of expressions");
  }

  const json& jw = j["wind"];
  if (jw.is_string() && jw.get<std::string>() == "zero") {
    s.wind_zero = true;
    s.wind.eval = [n](const Vec&) { return Vec(Vec::Zero(n)); };
  } else if (jw.is_array()) {
    if (static_cast<int>(jw.size()) != n) throw ValidationError("wind: expected " + std::to_string(n) + " components");
    std::vector<expr::FieldExpr> comps;
    for (int k = 0; k < n; ++k) comps.push_back(json_expr(jw[k], n, "wind[" + std::to_string(k) + "]"));
    s.wind.eval = [comps, n](const Vec& z) {
      Vec w(n);
      for (int k = 0; k < n; ++k) w(k) = expr::eval_field(comps[k], z);
      return w;
    };
  } else {
    throw ValidationError("wind: expected \"zero\" or a vector of expressions");
  }

  if (j.contains("speed") == j.contains("speed2")) throw ValidationError("scenario: give exactly one of 'speed', 'speed2'");
  if (j.contains("speed")) {
    const expr::FieldExpr fe = json_expr(j["speed"], n, "speed");
    s.speed2.eval = [fe](const Vec& z) {
      const cplx v = expr::eval_field(fe, z);
      return v * v;
    };
  } else {
    const expr::FieldExpr fe = json_expr(j["speed2"], n, "speed2");
    s.speed2.eval = [fe](const Vec& z) { return expr::eval_field(fe, z); };
  }

  if (!j["cos_phi"].is_number()) throw ValidationError("cos_phi: expected a number");
  s.cos_phi = j["cos_phi"].get<double>();
  if (!(s.cos_phi >= -1.0 && s.cos_phi <= 1.0)) throw ValidationError("cos_phi must lie in [-1, 1]");

  s.domain = dom;
  s.h.dim = s.wind.dim = s.speed2.dim = n;
  s.h.domain = s.wind.domain = s.speed2.domain = dom;

  if (j.contains("sampling")) {
    const json& js = j["sampling"];
    detail::check_keys(js, {"domain", "radius"}, "sampling");
    if (js.contains("domain")) f.sample_domain = detail::json_domain(js["domain"], n, "sampling.domain");
    if (js.contains("radius")) {
      if (!js["radius"].is_number() || !(js["radius"].get<double>() > 0.0))
        throw ValidationError("sampling.radius must be positive");
      f.sample_radius = js["radius"].get<double>();
    }
  }

  int samples = 257;
  if (j.contains("outputs")) {
    const json& jo = j["outputs"];
    detail::check_keys(jo, {"samples"}, "outputs");
    if (jo.contains("samples")) {
      if (!jo["samples"].is_number_integer() || jo["samples"].get<int>() < 2)
        throw ValidationError("outputs.samples must be an integer >= 2");
      samples = jo["samples"].get<int>();
    }
  }

  if (j.contains("geodesic")) {
    const json& jg = j["geodesic"];
    detail::check_keys(jg, {"start", "velocity", "direction", "t_span", "tol"}, "geodesic");
    GeodesicSpec g;
    g.samples = samples;
    if (!jg.contains("start") || !jg.contains("velocity")) throw ValidationError("geodesic: needs 'start' and 'velocity'");
    g.start = detail::json_point(jg["start"], n, "geodesic.start");
    if (jg["velocity"].is_string()) {
      if (jg["velocity"].get<std::string>() != "from_F_unit")
        throw ValidationError("geodesic.velocity: expected complex values or \"from_F_unit\"");
      if (!jg.contains("direction")) throw ValidationError("geodesic: \"from_F_unit\" needs 'direction'");
      g.from_F_unit = true;
      g.velocity = detail::json_point(jg["direction"], n, "geodesic.direction");
    } else {
      if (jg.contains("direction")) throw ValidationError("geodesic: 'direction' only applies to \"from_F_unit\"");
      g.velocity = detail::json_point(jg["velocity"], n, "geodesic.velocity");
    }
    if (jg.contains("t_span")) {
      const json& t = jg["t_span"];
      if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number())
        throw ValidationError("geodesic.t_span: expected [t0, t1]");
      g.t0 = t[0].get<double>();
      g.t1 = t[1].get<double>();
      if (!(g.t1 > g.t0)) throw ValidationError("geodesic.t_span must satisfy t0 < t1");
    }
    if (jg.contains("tol")) {
      if (!jg["tol"].is_number() || !(jg["tol"].get<double>() > 0.0)) throw ValidationError("geodesic.tol must be positive");
      g.tol = jg["tol"].get<double>();
    }
    f.geodesic = g;
  }
  return f;
}

inline ScenarioFile parse_scenario_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(e.what());
  }
}

inline ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

inline ScenarioFile scenario_file_from_builtin(const Scenario& sc) {
  ScenarioFile f;
  f.name = sc.name;
  f.dimension = sc.structure.n;
  f.metric_source = "builtin";
  f.structure = sc.structure;
  f.sample_domain = sc.sample_domain;
  f.sample_radius = sc.sample_radius;
  if (sc.reference) {
    GeodesicSpec g;
    const auto [z0, v0] = sc.reference->geodesic.at(sc.reference->t0);
    g.start = z0;
    g.velocity = v0;
    g.t0 = sc.reference->t0;
    g.t1 = sc.reference->t1;
    f.geodesic = g;
  }
  return f;
}

// Initial velocity of the geodesic block, rescaled to unit F if requested.
inline Vec initial_velocity(const ScenarioFile& f) {
  if (!f.geodesic) throw ValidationError("scenario has no geodesic block");
  const GeodesicSpec& g = *f.geodesic;
  if (!g.from_F_unit) return g.velocity;
  if (g.velocity.norm() == 0.0) throw ZeroDirectionError("geodesic.direction is zero");
  return g.velocity / solve_forward(f.structure, g.start, g.velocity);
}

}  // namespace znav
