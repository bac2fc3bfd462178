#pragma once

#include <cmath>
#include <complex>
#include <cstring>
#include <random>

#include "znav/znav.hpp"

namespace znav::test {

inline Vec v2(cplx a, cplx b) { return (Vec(2) << a, b).finished(); }

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

inline double max_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }
inline double max_diff(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline Vec random_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  for (int k = 0; k < n; ++k) v(k) = scale * cplx(g(rng), g(rng));
  return v;
}

inline Mat random_pd(std::mt19937_64& rng, int n) {
  Mat m(n, n);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m * m.adjoint() + Mat::Identity(n, n);
}

// Hermitian field from a constant matrix.
inline MatrixField constant_metric(const Mat& m) {
  return {static_cast<int>(m.rows()), [m](const Vec&) { return m; }, {}};
}

// Flat structure on C^n with constant wind.
inline ZermeloStructure flat_structure(const Vec& W, double f2, double cos_phi, const Mat& h = Mat()) {
  const int n = static_cast<int>(W.size());
  const Mat hm = h.size() ? h : Mat(Mat::Identity(n, n));
  ZermeloStructure s;
  s.n = n;
  s.h = constant_metric(hm);
  s.speed2 = {n, [f2](const Vec&) { return cplx(f2); }, {}};
  s.wind = {n, [W](const Vec&) { return W; }, {}};
  s.wind_zero = W.norm() == 0.0;
  s.cos_phi = cos_phi;
  return s;
}

inline Domain sampling_domain(const Scenario& sc) {
  const ZermeloStructure s = sc.structure;
  return intersect([s](const Vec& p) { return s.contains(p); }, sc.sample_domain);
}

inline std::vector<SamplePair> plan_for(const Scenario& sc, int points, int dirs, std::uint64_t seed) {
  return sample_plan(sc.structure.n, points, dirs, sampling_domain(sc), sc.sample_radius, seed);
}

inline std::vector<Vec> points_for(const Scenario& sc, int points, std::uint64_t seed) {
  return sample_points(sc.structure.n, points, sampling_domain(sc), sc.sample_radius, seed);
}

// Hartogs b of the weighted example: b_1 = 2w/D, b_2 = -2z/D.
inline Vec hartogs_b_closed(const Vec& p) {
  const double D = std::norm(p(0)) - std::norm(p(1));
  return v2(2.0 * p(1) / D, -2.0 * p(0) / D);
}

// Hartogs a of the weighted example: 8 [[1/(2(1-|z|^2)^2) + |w|^2/D^2, -w zbar/D^2], [-z wbar/D^2, |z|^2/D^2]].
inline Mat hartogs_a_closed(const Vec& p) {
  const cplx z = p(0), w = p(1);
  const double D = std::norm(z) - std::norm(w), s = 1.0 - std::norm(z);
  Mat a(2, 2);
  a << 1.0 / (2 * s * s) + std::norm(w) / (D * D), -w * std::conj(z) / (D * D), -z * std::conj(w) / (D * D),
      std::norm(z) / (D * D);
  return 8.0 * a;
}

// Spray of that a: G^1 = zbar eta1^2/(1-|z|^2), G^2 as in the worked example.
inline Vec hartogs_a_spray_closed(const Vec& p, const Vec& e) {
  const cplx z = p(0), w = p(1);
  const double D = std::norm(z) - std::norm(w), s = 1.0 - std::norm(z);
  Vec G(2);
  G(0) = std::conj(z) * e(0) * e(0) / s;
  G(1) = std::conj(z) * w * (1.0 - std::norm(w)) * e(0) * e(0) / (z * s * D) -
         (std::norm(z) + std::norm(w)) * e(0) * e(1) / (z * D) + std::conj(w) * e(1) * e(1) / D;
  return G;
}

}  // namespace znav::test
