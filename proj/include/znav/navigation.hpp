#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"
#include "wirtinger.hpp"

namespace znav {

// Generalized navigation data (h, f, W, phi) with constant phase phi.
// The resultant velocity is composed as v = u + W.
struct ZermeloStructure {
  int n = 0;
  MatrixField h;         // h_{i jbar}(z)
  ScalarField speed2;    // f(z)^2 = ||u(z)||_h^2, real
  VectorField wind;      // W^i(z)
  double cos_phi = -1.0;
  bool wind_zero = false;  // metadata flag; sampling cannot prove W == 0
  Domain domain;

  struct Pointwise {
    Mat h;
    Vec W;
    Vec W_low;  // W_i = h_{i jbar} conj(W^j)
    double f2 = 0.0;
    double W2 = 0.0;
    double eps = 0.0;  // f^2 - ||W||_h^2
  };

  bool contains(const Vec& z) const {
    return z.size() == n && all_finite(z) && (!domain || domain(z)) && h.contains(z) &&
           speed2.contains(z) && (wind_zero || wind.contains(z));
  }

  Pointwise at(const Vec& z) const {
    if (z.size() != n) throw ValidationError("point dimension does not match structure");
    if (!contains(z)) throw DomainError("point " + format_point(z) + " outside the structure domain");
    Pointwise p;
    p.h = h.eval(z);
    const cplx f2 = speed2.eval(z);
    if (std::abs(f2.imag()) > 1e-10 * std::max(1.0, std::abs(f2.real())))
      throw ValidationError("speed field is not real at " + format_point(z));
    p.f2 = f2.real();
    if (!(p.f2 > 0.0) || p.f2 > 1.0 + 1e-12)
      throw ValidationError("ship speed must satisfy 0 < f <= 1, got f^2 = " + std::to_string(p.f2));
    p.W = wind_zero ? Vec(Vec::Zero(n)) : wind.eval(z);
    if (p.W.size() != n) throw ValidationError("wind has wrong dimension");
    p.W_low = p.h * p.W.conjugate();
    p.W2 = quad(p.h, p.W, p.W).real();
    p.eps = p.f2 - p.W2;
    if (!(p.eps > 0.0))
      throw WindTooStrongError("||W||_h^2 = " + std::to_string(p.W2) + " >= f^2 = " +
                               std::to_string(p.f2) + " at " + format_point(z));
    return p;
  }

  double eps(const Vec& z) const { return at(z).eps; }
};

enum class SolutionKind { Randers, ConformalHermitian, AlphaBetaNonRanders };

inline const char* kind_name(SolutionKind k) {
  switch (k) {
    case SolutionKind::Randers: return "Randers";
    case SolutionKind::ConformalHermitian: return "ConformalHermitian";
    case SolutionKind::AlphaBetaNonRanders: return "AlphaBetaNonRanders";
  }
  return "?";
}

struct SolutionClass {
  SolutionKind kind = SolutionKind::Randers;
  bool warning = false;  // metric may fail convexity
};

inline SolutionClass classify_solution(const ZermeloStructure& s) {
  if (s.wind_zero || s.cos_phi == 0.0) return {SolutionKind::ConformalHermitian, false};
  if (s.cos_phi < 0.0) return {SolutionKind::Randers, false};
  return {SolutionKind::AlphaBetaNonRanders, true};
}

// F(z, eta) = (sqrt(p^2 + ||eta||^2 eps) - p) / eps,  p = |h(eta, Wbar)| cos(phi).
inline double solve_forward(const ZermeloStructure& s, const Vec& z, const Vec& eta) {
  const auto p = s.at(z);
  if (eta.size() != s.n) throw ValidationError("direction dimension does not match structure");
  const double n2 = hermitian_norm(p.h, eta);
  if (s.wind_zero) return n2 / std::sqrt(p.f2);
  const double pr = std::abs(quad(p.h, eta, p.W)) * s.cos_phi;
  return (std::sqrt(pr * pr + n2 * n2 * p.eps) - pr) / p.eps;
}

// arg h(v, Wbar) in (-pi, pi].
inline double orthogonality_angle(const ZermeloStructure& s, const Vec& z, const Vec& v) {
  if (s.wind_zero) throw ZeroWindError("structure has no wind");
  const auto p = s.at(z);
  if (p.W2 <= 0.0) throw ZeroWindError("wind vanishes at " + format_point(z));
  if (v.norm() == 0.0) throw ZeroDirectionError("v = 0");
  const cplx q = quad(p.h, v, p.W);
  // orthogonal pair: arg is undefined, report a right angle
  if (std::abs(q) <= 1e-14 * std::sqrt(p.W2 * std::max(quad(p.h, v, v).real(), 0.0)))
    return std::numbers::pi / 2.0;
  const double a = std::arg(q);
  return a <= -std::numbers::pi ? std::numbers::pi : a;
}

// Complex Randers data F = alpha + |beta|, with the ship speed kept for the inverse map.
struct RandersData {
  int n = 0;
  MatrixField a;     // a_{i jbar}
  VectorField b;     // b_i
  ScalarField f2;    // f(z)^2
  Domain domain;
  double sign = 1.0;  // F = alpha + sign |beta|; -1 only for the alpha-beta (cos phi > 0) case

  struct Pointwise {
    Mat a, a_inv;
    Vec b, b_up;  // b^i = a^{jbar i} conj(b_j)
    double b_norm2 = 0.0;
  };

  bool contains(const Vec& z) const {
    return z.size() == n && all_finite(z) && (!domain || domain(z)) && a.contains(z) && b.contains(z);
  }

  Pointwise at(const Vec& z) const {
    if (!contains(z)) throw DomainError("point " + format_point(z) + " outside the Randers domain");
    Pointwise p;
    p.a = a.eval(z);
    p.a_inv = hermitian_inverse(p.a);
    p.b = b.eval(z);
    p.b_up = p.a_inv.transpose() * p.b.conjugate();
    p.b_norm2 = p.b.dot(p.b_up.conjugate()).real();
    return p;
  }

  double alpha(const Vec& z, const Vec& eta) const { return hermitian_norm(a.eval(z), eta); }
  cplx beta(const Vec& z, const Vec& eta) const { return b.eval(z).transpose() * eta; }

  double F(const Vec& z, const Vec& eta) const {
    if (!contains(z)) throw DomainError("point " + format_point(z) + " outside the Randers domain");
    return alpha(z, eta) + sign * std::abs(beta(z, eta));
  }
};

// a = h/eps + W_i conj(W_j) cos^2/eps^2,  b_i = -W_i cos/eps.
inline RandersData build_randers_data(const ZermeloStructure& s) {
  if (s.wind_zero) throw ZeroWindError("W is identically zero; the solution is conformal Hermitian");
  RandersData r;
  r.n = s.n;
  r.domain = [s](const Vec& z) { return s.contains(z); };
  const double c = s.cos_phi;
  r.a.dim = r.b.dim = r.f2.dim = s.n;
  r.a.domain = r.b.domain = r.f2.domain = r.domain;
  r.a.eval = [s, c](const Vec& z) -> Mat {
    const auto p = s.at(z);
    return Mat(p.h / p.eps + (c * c / (p.eps * p.eps)) * p.W_low * p.W_low.adjoint());
  };
  r.b.eval = [s, c](const Vec& z) -> Vec {
    const auto p = s.at(z);
    return Vec(-(c / p.eps) * p.W_low);
  };
  r.f2.eval = [s](const Vec& z) -> cplx { return s.at(z).f2; };
  r.sign = c <= 0.0 ? 1.0 : -1.0;
  return r;
}

// Closed form ||b||^2 = ||W||^2 cos^2 / (f^2 - ||W||^2 sin^2).
inline double b_norm2_closed_form(const ZermeloStructure& s, const Vec& z) {
  const auto p = s.at(z);
  const double c2 = s.cos_phi * s.cos_phi;
  return p.W2 * c2 / (p.f2 - p.W2 * (1.0 - c2));
}

// Inverse problem: h = w (a - b conj(b)^T), W^i = f^2 b^i / w,  w = f^2 (1 - ||b||^2).
inline ZermeloStructure solve_inverse(const RandersData& r) {
  ZermeloStructure s;
  s.n = r.n;
  s.cos_phi = -1.0;
  s.domain = [r](const Vec& z) { return r.contains(z) && r.f2.contains(z); };
  s.h.dim = s.speed2.dim = s.wind.dim = r.n;
  s.h.domain = s.speed2.domain = s.wind.domain = s.domain;
  auto checked = [r](const Vec& z) {
    auto p = r.at(z);
    if (!(p.b_norm2 > 0.0 && p.b_norm2 < 1.0))
      throw ConvexityError("||b||^2 = " + std::to_string(p.b_norm2) + " not in (0, 1) at " +
                           format_point(z));
    const double f2 = r.f2.eval(z).real();
    if (!(f2 > 0.0) || f2 > 1.0 + 1e-12)
      throw ValidationError("ship speed must satisfy 0 < f <= 1");
    return std::pair{p, f2};
  };
  s.h.eval = [checked](const Vec& z) -> Mat {
    auto [p, f2] = checked(z);
    const double w = f2 * (1.0 - p.b_norm2);
    return Mat(w * (p.a - p.b * p.b.adjoint()));
  };
  s.wind.eval = [checked](const Vec& z) -> Vec {
    auto [p, f2] = checked(z);
    const double w = f2 * (1.0 - p.b_norm2);
    return Vec((f2 / w) * p.b_up);
  };
  s.speed2.eval = [checked](const Vec& z) -> cplx { return checked(z).second; };
  return s;
}

}  // namespace znav
