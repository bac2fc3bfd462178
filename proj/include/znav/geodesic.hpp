#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "navigation.hpp"
#include "path.hpp"
#include "spray.hpp"

namespace znav {

struct GeodesicOptions {
  double tol = 1e-10;      // local error per step, mixed absolute/relative
  int samples = 257;       // uniform output grid size
  int max_steps = 200000;
  double max_step = 0.0;   // 0: (t1 - t0) / 64
  double min_step = 1e-10;
};

namespace detail {

struct GeodesicState {
  double t;
  Vec y, f;  // y = (z, eta), f = dy/dt
};

// Cubic Hermite interpolation between two accepted states.
inline Vec hermite(const GeodesicState& a, const GeodesicState& b, double t) {
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * a.y + (s3 - 2 * s2 + s) * h * a.f + (-2 * s3 + 3 * s2) * b.y +
         (s3 - s2) * h * b.f;
}

}  // namespace detail

// Integrates d^2 gamma/dt^2 + 2 G(gamma, gamma') = theta*(gamma, gamma') by Dormand-Prince 5(4) on
// y = (gamma, gamma'), sampling the result on a uniform grid through cubic Hermite dense output.
inline GeodesicPath integrate_geodesic(const Spray& spray, const Vec& z0, const Vec& eta0, double t0,
                                       double t1, const GeodesicOptions& opt = {}) {
  const Eigen::Index n = spray.n;
  if (z0.size() != n || eta0.size() != n) throw ValidationError("initial data has wrong dimension");
  if (!all_finite(eta0) || eta0.norm() == 0.0) throw ZeroDirectionError("initial velocity is zero");
  if (!(t1 > t0)) throw ValidationError("t_span must satisfy t0 < t1");
  if (!(opt.tol > 0.0)) throw ValidationError("tol must be positive");
  if (opt.samples < 2) throw ValidationError("need at least two output samples");
  if (!spray.contains(z0)) throw DomainError("start point " + format_point(z0) + " outside the domain");

  const auto rhs = [&](const Vec& y) -> Vec {
    const Vec z = y.head(n), eta = y.tail(n);
    if (!spray.contains(z)) throw DomainError("point " + format_point(z) + " outside the domain");
    const auto s = spray.eval(z, eta);
    Vec f(2 * n);
    f.head(n) = eta;
    f.tail(n) = s.theta - 2.0 * s.G;
    if (!all_finite(f)) throw DomainError("non-finite spray at " + format_point(z));
    return f;
  };

  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double e[7] = {71.0 / 57600,      0, -71.0 / 16695, 71.0 / 1920,
                                  -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

  GeodesicPath path;
  Vec y0(2 * n);
  y0 << z0, eta0;
  std::vector<detail::GeodesicState> states{{t0, y0, rhs(y0)}};

  const double hmax = opt.max_step > 0.0 ? opt.max_step : (t1 - t0) / 64.0;
  double h = std::min(hmax, 1e-2 * (t1 - t0));
  double t = t0;
  bool left = false;
  while (t < t1) {
    if (path.accepted_steps + path.rejected_steps >= opt.max_steps) {
      path.terminated_reason = Termination::StepFailure;
      break;
    }
    h = std::min(h, t1 - t);
    const auto& cur = states.back();
    std::array<Vec, 7> k;
    k[0] = cur.f;
    Vec ynew;
    bool domain_fail = false;
    try {
      for (int s = 1; s < 7; ++s) {
        Vec ys = cur.y;
        for (int j = 0; j < s; ++j)
          if (a[s][j] != 0.0) ys += h * a[s][j] * k[j];
        if (s == 6) ynew = ys;
        k[s] = rhs(ys);
      }
    } catch (const DomainError&) {
      domain_fail = true;
    }
    if (domain_fail) {
      ++path.rejected_steps;
      h *= 0.5;
      if (h < opt.min_step) {
        left = true;
        break;
      }
      continue;
    }
    double err = 0.0;
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      cplx d = 0.0;
      for (int s = 0; s < 7; ++s) d += e[s] * k[s](i);
      const double sc = opt.tol * (1.0 + std::max(std::abs(cur.y(i)), std::abs(ynew(i))));
      err = std::max(err, std::abs(h * d) / sc);
    }
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    if (err <= 1.0) {
      t = (t1 - (t + h) < 1e-14 * (t1 - t0)) ? t1 : t + h;
      states.push_back({t, ynew, k[6]});
      ++path.accepted_steps;
    } else {
      ++path.rejected_steps;
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(hmax, h * fac);
    if (h < opt.min_step && t < t1) throw StepFailureError("step size underflow at t = " + std::to_string(t));
  }
  if (left) path.terminated_reason = Termination::LeftDomain;

  const double tend = states.back().t;
  if (!(tend > t0)) throw DomainError("geodesic leaves the domain immediately");
  std::size_t seg = 0;
  for (int k = 0; k < opt.samples; ++k) {
    const double tk = k + 1 == opt.samples ? tend : t0 + (tend - t0) * k / (opt.samples - 1);
    while (seg + 2 < states.size() && states[seg + 1].t < tk) ++seg;
    const Vec y = tk == states[seg].t ? states[seg].y
                  : tk == states[seg + 1].t ? states[seg + 1].y
                                            : detail::hermite(states[seg], states[seg + 1], tk);
    path.times.push_back(tk);
    path.points.push_back(y.head(n));
    path.velocities.push_back(y.tail(n));
  }
  return path;
}

struct ResultantSample {
  Vec v, W, u;  // v = u + W
  double norm_v = 0.0, norm_W = 0.0, norm_u = 0.0;
  double arg_vW = std::numeric_limits<double>::quiet_NaN();  // arg h(v, Wbar)
  double cos_uW = std::numeric_limits<double>::quiet_NaN();  // Re h(u, Wbar) / (|u| |W|)
};

inline std::vector<ResultantSample> resultant_decomposition(const ZermeloStructure& s, const GeodesicPath& path) {
  std::vector<ResultantSample> out;
  out.reserve(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto p = s.at(path.points[k]);
    ResultantSample r;
    r.v = path.velocities[k];
    r.W = p.W;
    r.u = r.v - r.W;
    r.norm_v = hermitian_norm(p.h, r.v);
    r.norm_W = hermitian_norm(p.h, r.W);
    r.norm_u = hermitian_norm(p.h, r.u);
    if (r.norm_W > 0.0) {
      if (r.norm_v > 0.0) r.arg_vW = std::arg(quad(p.h, r.v, r.W));
      if (r.norm_u > 0.0) r.cos_uW = quad(p.h, r.u, r.W).real() / (r.norm_u * r.norm_W);
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace znav
