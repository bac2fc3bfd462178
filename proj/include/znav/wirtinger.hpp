#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace znav {

using Domain = std::function<bool(const Vec&)>;

inline std::string format_point(const Vec& z) {
  std::string s = "(";
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    if (k) s += ", ";
    s += std::to_string(z(k).real()) + (z(k).imag() < 0 ? "-" : "+") +
         std::to_string(std::abs(z(k).imag())) + "i";
  }
  return s + ")";
}

inline bool all_finite(const Vec& z) {
  for (Eigen::Index k = 0; k < z.size(); ++k)
    if (!std::isfinite(z(k).real()) || !std::isfinite(z(k).imag())) return false;
  return true;
}

// A field over an open subset of C^n. `domain` empty means the whole chart.
template <class T>
struct Field {
  int dim = 0;
  std::function<T(const Vec&)> eval;
  Domain domain;

  bool contains(const Vec& z) const { return all_finite(z) && (!domain || domain(z)); }

  T operator()(const Vec& z) const {
    if (z.size() != dim) throw ValidationError("point has dimension " + std::to_string(z.size()) +
                                               ", field expects " + std::to_string(dim));
    if (!contains(z)) throw DomainError("point " + format_point(z) + " outside field domain");
    return eval(z);
  }
};

using ScalarField = Field<cplx>;
using VectorField = Field<Vec>;
using MatrixField = Field<Mat>;

inline Domain intersect(Domain a, Domain b) {
  if (!a) return b;
  if (!b) return a;
  return [a = std::move(a), b = std::move(b)](const Vec& z) { return a(z) && b(z); };
}

struct DiffOptions {
  double step = 1e-5;
  int order = 2;       // 2 or 4
  double scale = 0.0;  // 0: per-coordinate max(1, |x_k|); otherwise a fixed length scale

  static DiffOptions accurate() { return {1e-4, 4, 0.0}; }
  static DiffOptions nested_outer() { return {1e-4, 4, 0.0}; }
  // Derivatives with respect to a tangent vector of size `norm`.
  static DiffOptions vertical(double norm) { return {1e-3, 4, norm}; }
};

namespace detail {

template <class T>
using deriv_t = std::conditional_t<std::is_arithmetic_v<T>, cplx, T>;

template <class Fn>
using value_t = std::decay_t<std::invoke_result_t<const Fn&, const Vec&>>;

inline double step_for(const Vec& z, Eigen::Index k, const DiffOptions& o) {
  const double s = o.scale > 0.0 ? o.step * o.scale : o.step * std::max(1.0, std::abs(z(k)));
  const double x = std::max(std::abs(z(k).real()), std::abs(z(k).imag()));
  if (!(s > 0.0) || x + s == x || !std::isfinite(s))
    throw StepError("finite-difference step underflows at coordinate " + std::to_string(k));
  return s;
}

template <class Fn>
auto eval_checked(const Fn& f, const Vec& p, const Domain& dom) {
  if (dom && !dom(p)) throw DomainError("stencil point " + format_point(p) + " leaves the domain");
  return f(p);
}

// Real-direction derivative of f at z along `dir`, scaled by step s.
template <class Fn>
auto directional(const Fn& f, const Vec& z, const Vec& dir, double s, int order, const Domain& dom)
    -> deriv_t<value_t<Fn>> {
  using R = deriv_t<value_t<Fn>>;
  const R fp = R(eval_checked(f, Vec(z + s * dir), dom));
  const R fm = R(eval_checked(f, Vec(z - s * dir), dom));
  if (order == 4) {
    const R fp2 = R(eval_checked(f, Vec(z + 2.0 * s * dir), dom));
    const R fm2 = R(eval_checked(f, Vec(z - 2.0 * s * dir), dom));
    return R((8.0 * (fp - fm) - (fp2 - fm2)) / (12.0 * s));
  }
  return R((fp - fm) / (2.0 * s));
}

}  // namespace detail

// Both Wirtinger derivatives (d/dz^k, d/dzbar^k) from one real stencil.
template <class Fn>
auto wirtinger_pair(const Fn& f, const Vec& z, Eigen::Index k, const DiffOptions& o = {},
                    const Domain& dom = {}) {
  using R = detail::deriv_t<detail::value_t<Fn>>;
  const double s = detail::step_for(z, k, o);
  Vec e = Vec::Zero(z.size());
  e(k) = 1.0;
  const R dx = detail::directional(f, z, e, s, o.order, dom);
  e(k) = I;
  const R dy = detail::directional(f, z, e, s, o.order, dom);
  return std::pair<R, R>{R(0.5 * (dx - I * dy)), R(0.5 * (dx + I * dy))};
}

template <class R>
struct WirtingerGrad {
  std::vector<R> d;     // d/dz^k
  std::vector<R> dbar;  // d/dzbar^k
};

template <class Fn>
auto wirtinger_all(const Fn& f, const Vec& z, const DiffOptions& o = {}, const Domain& dom = {}) {
  using R = detail::deriv_t<detail::value_t<Fn>>;
  WirtingerGrad<R> g;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    auto [d, db] = wirtinger_pair(f, z, k, o, dom);
    g.d.push_back(std::move(d));
    g.dbar.push_back(std::move(db));
  }
  return g;
}

// Scalar-valued f: gradient vector (d f / d z^k)_k or its conjugate-variable version.
template <class Fn>
Vec wirtinger_gradient(const Fn& f, const Vec& z, bool conjugate, const DiffOptions& o = {},
                       const Domain& dom = {}) {
  auto g = wirtinger_all(f, z, o, dom);
  Vec r(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) r(k) = conjugate ? g.dbar[k] : g.d[k];
  return r;
}

// Vector-valued f: J(i, k) = d f_i / d z^k (or d/dzbar^k).
template <class Fn>
Mat wirtinger_jacobian(const Fn& f, const Vec& z, bool conjugate, const DiffOptions& o = {},
                       const Domain& dom = {}) {
  auto g = wirtinger_all(f, z, o, dom);
  Mat J(g.d.empty() ? 0 : g.d[0].size(), z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) J.col(k) = conjugate ? g.dbar[k] : g.d[k];
  return J;
}

// Spec-level operation on a scalar field; k is 0-based.
inline cplx wirtinger_d(const ScalarField& field, const Vec& z, Eigen::Index k, bool conjugate,
                        const DiffOptions& o = {}) {
  if (k < 0 || k >= z.size()) throw ValidationError("derivative index out of range");
  if (!field.contains(z)) throw DomainError("point " + format_point(z) + " outside field domain");
  auto [d, db] = wirtinger_pair([&](const Vec& p) { return field.eval(p); }, z, k, o,
                                [&](const Vec& p) { return field.contains(p); });
  return conjugate ? db : d;
}

}  // namespace znav
