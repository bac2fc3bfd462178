#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "navigation.hpp"
#include "wirtinger.hpp"

namespace znav {

// Closed-form curve with its velocity, t -> (gamma(t), gamma'(t)).
struct ReferenceGeodesic {
  enum class Shape { Hartogs, Line } shape = Shape::Hartogs;
  // Hartogs: gamma(t) = (lambda, lambda (mu e^{rate t} - 1) / (mu e^{rate t} + 1)).
  double lambda = 0.5, mu = 1.0, rate = 0.0;
  // Line: gamma(t) = start + t velocity.
  Vec start, velocity;

  std::pair<Vec, Vec> at(double t) const {
    if (shape == Shape::Line) return {Vec(start + t * velocity), velocity};
    const double e = mu * std::exp(rate * t);
    Vec z(2), v(2);
    z << lambda, lambda * (e - 1.0) / (e + 1.0);
    v << 0.0, lambda * 2.0 * rate * e / ((e + 1.0) * (e + 1.0));
    return {z, v};
  }
};

struct ReferenceSolution {
  ReferenceGeodesic geodesic;
  double t0 = 0.0, t1 = 1.0;
  std::map<std::string, double> lengths;  // keys F, a, h
  std::map<std::string, bool> flags;      // expected classification flags
  std::map<std::string, double> along;    // norm_v_h, arg_vW, cos_uW expected at every path sample
  std::string constraint;                 // parameter constraint, human-readable
};

struct Scenario {
  std::string name, description;
  ZermeloStructure structure;
  Domain sample_domain;        // stricter region used for classification samples
  double sample_radius = 1.0;  // coordinate box half-width for sampling
  std::optional<ReferenceSolution> reference;
};

namespace detail {

inline double abs2(cplx x) { return std::norm(x); }

// Hessian of -log(1 - |z|^2) - log(|z|^2 - |w|^2), optionally weighted by |z|^2.
inline Mat hartogs_hessian(const Vec& p, bool weighted) {
  const cplx z = p(0), w = p(1);
  const double D = abs2(z) - abs2(w);
  const double D2 = D * D;
  const double s = 1.0 - abs2(z);
  Mat m(2, 2);
  m(0, 0) = 1.0 / (s * s) + abs2(w) / D2;
  m(0, 1) = -std::conj(z) * w / D2;
  m(1, 0) = -z * std::conj(w) / D2;
  m(1, 1) = abs2(z) / D2;
  return weighted ? Mat(abs2(z) * m) : m;
}

inline bool in_hartogs(const Vec& p) {
  if (p.size() != 2) return false;
  const double z = std::abs(p(0)), w = std::abs(p(1));
  return w < z - 1e-6 && z < 1.0 - 1e-6;
}

inline bool in_hartogs_sample(const Vec& p) {
  const double z = std::abs(p(0)), w = std::abs(p(1));
  return z > 0.15 && z < 0.85 && w < 0.75 * z;
}

inline bool in_ball(const Vec& p, double r) { return p.norm() < r; }

inline ScalarField constant_scalar(int n, double c, Domain dom) { return {n, [c](const Vec&) { return cplx(c); }, dom}; }

// W = c (|z|^2 - |w|^2) / (2z) d/dw.
inline VectorField hartogs_wind(cplx c, Domain dom) {
  return {2,
          [c](const Vec& p) -> Vec {
            Vec W(2);
            W << 0.0, c * (abs2(p(0)) - abs2(p(1))) / (2.0 * p(0));
            return W;
          },
          dom};
}

inline Scenario hartogs_scenario(const std::string& name, bool weighted, bool wind, cplx wind_coeff, double cos_phi,
                                 double rate, double lambda) {
  Scenario sc;
  sc.name = name;
  const Domain dom = in_hartogs;
  ZermeloStructure& s = sc.structure;
  s.n = 2;
  s.domain = dom;
  s.h = {2, [weighted](const Vec& p) { return hartogs_hessian(p, weighted); }, dom};
  if (weighted)
    s.speed2 = {2, [](const Vec& p) { return cplx(0.5 * abs2(p(0))); }, dom};
  else
    s.speed2 = constant_scalar(2, 0.5, dom);
  s.cos_phi = cos_phi;
  s.wind_zero = !wind;
  s.wind = wind ? hartogs_wind(wind_coeff, dom) : VectorField{2, [](const Vec&) { return Vec(Vec::Zero(2)); }, dom};
  sc.sample_domain = in_hartogs_sample;
  sc.sample_radius = 0.85;

  ReferenceSolution ref;
  ref.geodesic.lambda = lambda;
  ref.geodesic.mu = 1.0;
  ref.geodesic.rate = rate;
  sc.reference = ref;
  return sc;
}

}  // namespace detail

inline std::vector<std::string> builtin_names() {
  return {"euclidean_const_wind", "euclidean_rotation_wind", "euclidean_shear_wind", "hartogs_ex1",
          "hartogs_ex1_nowind",   "hartogs_ex2",             "hartogs_ex2_nowind",   "hartogs_ex3",
          "hartogs_ex4"};
}

// Hartogs triangle examples use lambda as the first coordinate of the reference geodesic.
inline Scenario builtin(const std::string& name, double lambda = 0.5) {
  using detail::hartogs_scenario;
  const double r2 = std::sqrt(2.0);
  if (name.rfind("hartogs_", 0) == 0 && !(lambda > 0.0 && lambda < 1.0))
    throw ValidationError("lambda must lie in (0, 1) for Hartogs scenarios");
  if (name == "hartogs_ex1") {
    auto sc = hartogs_scenario(name, true, true, -1.0, -1.0, r2 - 1.0, lambda);
    sc.description = "weighted Hartogs metric, f^2 = |z|^2/2, W = -(|z|^2-|w|^2)/(2z) d/dw, Randers";
    auto& r = *sc.reference;
    r.lengths = {{"F", 1.0}, {"a", 2.0 - r2}, {"h", (r2 - 1.0) * lambda / 2.0}};
    r.flags = {{"generalized_berwald", true}, {"complex_berwald", true},     {"douglas", true},
               {"kahler_a", true},            {"kahler_h", false},           {"projectively_related_a_F", true},
               {"projectively_related_h_F", false}};
    r.along = {{"norm_v_h", (r2 - 1.0) * lambda / 2.0}, {"arg_vW", std::numbers::pi}};
    r.constraint = "lambda k = (sqrt2 - 1)/2";
    return sc;
  }
  if (name == "hartogs_ex2") {
    auto sc = hartogs_scenario(name, true, true, I, 0.0, 1.0, lambda);
    sc.description = "weighted Hartogs metric, f^2 = |z|^2/2, W = i(|z|^2-|w|^2)/(2z) d/dw, conformal F = (2/|z|) h";
    auto& r = *sc.reference;
    r.lengths = {{"F", 1.0}, {"h", lambda / 2.0}};
    r.flags = {{"homothetic", false}, {"projectively_related_h_F", false}};
    r.along = {{"cos_uW", -r2 / 2.0}};
    r.constraint = "lambda k = 1/2";
    return sc;
  }
  if (name == "hartogs_ex3") {
    auto sc = hartogs_scenario(name, false, true, -1.0, -1.0, r2 - 1.0, lambda);
    sc.description = "Hartogs Kahler metric, f^2 = 1/2, W = -(|z|^2-|w|^2)/(2z) d/dw, Randers with eps = 1/4";
    auto& r = *sc.reference;
    r.lengths = {{"F", 1.0}, {"a", 2.0 - r2}, {"h", (r2 - 1.0) / 2.0}};
    r.flags = {{"generalized_berwald", true},      {"complex_berwald", true},          {"douglas", true},
               {"kahler_a", true},                 {"kahler_h", true},                 {"eps_constant", true},
               {"projectively_related_h_a", true}, {"projectively_related_h_F", true}, {"projectively_related_a_F", true}};
    r.constraint = "lambda k = (sqrt2 - 1)/2";
    return sc;
  }
  if (name == "hartogs_ex4") {
    auto sc = hartogs_scenario(name, false, true, I, 0.0, 1.0, lambda);
    sc.description = "Hartogs Kahler metric, f^2 = 1/2, W = i(|z|^2-|w|^2)/(2z) d/dw, conformal F = 2h";
    auto& r = *sc.reference;
    r.lengths = {{"F", 1.0}, {"h", 0.5}};
    r.flags = {{"homothetic", true}, {"projectively_related_h_F", true}, {"kahler_h", true}};
    r.constraint = "lambda k = 1/2";
    return sc;
  }
  if (name == "hartogs_ex1_nowind" || name == "hartogs_ex2_nowind") {
    const double rate = name == "hartogs_ex1_nowind" ? r2 : -r2;
    auto sc = hartogs_scenario(name, true, false, 0.0, -1.0, rate, lambda);
    sc.description = "weighted Hartogs metric, f^2 = |z|^2/2, no wind, conformal F = (sqrt2/|z|) h";
    auto& r = *sc.reference;
    r.lengths = {{"F", 1.0}, {"h", lambda * r2 / 2.0}};
    r.flags = {{"homothetic", false}, {"projectively_related_h_F", false}};
    r.constraint = "lambda k = sqrt2/2";
    return sc;
  }
  if (name.rfind("euclidean_", 0) == 0) {
    Scenario sc;
    sc.name = name;
    const Domain dom = [](const Vec& p) { return p.size() == 2 && detail::in_ball(p, 2.0); };
    ZermeloStructure& s = sc.structure;
    s.n = 2;
    s.domain = dom;
    s.h = {2, [](const Vec&) { return Mat(Mat::Identity(2, 2)); }, dom};
    s.speed2 = detail::constant_scalar(2, 0.81, dom);
    s.cos_phi = -1.0;
    sc.sample_domain = [](const Vec& p) { return detail::in_ball(p, 0.8); };
    sc.sample_radius = 0.8;
    if (name == "euclidean_const_wind") {
      s.wind = {2, [](const Vec&) { return Vec((Vec(2) << 0.3, cplx(0.0, 0.2)).finished()); }, dom};
      sc.description = "Euclidean C^2, f^2 = 0.81, constant W = (0.3, 0.2i), locally Minkowski Randers";
      ReferenceSolution ref;
      ref.geodesic.shape = ReferenceGeodesic::Shape::Line;
      ref.geodesic.start = (Vec(2) << cplx(0.1, 0.05), cplx(-0.2, 0.1)).finished();
      // unit F speed along (0.6, 0.3 - 0.2i)
      Vec dir = (Vec(2) << 0.6, cplx(0.3, -0.2)).finished();
      const double F = solve_forward(s, ref.geodesic.start, dir);
      ref.geodesic.velocity = dir / F;
      ref.lengths = {{"F", 1.0}, {"h", ref.geodesic.velocity.norm()}};
      ref.flags = {{"generalized_berwald", true}, {"complex_berwald", true},  {"douglas", true},
                   {"projectively_flat", true},   {"kahler_a", true},         {"kahler_h", true},
                   {"eps_constant", true},        {"projectively_related_a_F", true}};
      ref.constraint = "F(z0, eta0) = 1";
      sc.reference = ref;
      return sc;
    }
    if (name == "euclidean_shear_wind") {
      s.wind = {2, [](const Vec& p) { return Vec((Vec(2) << 0.3 * p(1), 0.2).finished()); }, dom};
      sc.description = "Euclidean C^2, f^2 = 0.81, W = (0.3 z2, 0.2), non-Berwald Randers";
      return sc;
    }
    if (name == "euclidean_rotation_wind") {
      s.wind = {2, [](const Vec& p) { return Vec(cplx(0.0, 0.4) * p); }, dom};
      sc.description = "Euclidean C^2, f^2 = 0.81, W = 0.4i z, non-Berwald Randers";
      return sc;
    }
  }
  throw UnknownScenarioError("unknown scenario '" + name + "'");
}

}  // namespace znav
