#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "finsler.hpp"
#include "linalg.hpp"
#include "navigation.hpp"
#include "sampling.hpp"
#include "spray.hpp"
#include "wirtinger.hpp"

namespace znav {

enum class Flag { True, False, Inconclusive };

inline const char* flag_name(Flag f) {
  switch (f) {
    case Flag::True: return "true";
    case Flag::False: return "false";
    case Flag::Inconclusive: return "inconclusive";
  }
  return "?";
}

// ZNAV_TOL_SCALE multiplies every tolerance; unset means 1.
inline double tolerance_scale_from_env() {
  const char* v = std::getenv("ZNAV_TOL_SCALE");
  if (!v || !*v) return 1.0;
  char* end = nullptr;
  const double s = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(s > 0.0) || !std::isfinite(s))
    throw ValidationError(std::string("ZNAV_TOL_SCALE must be a positive number, got '") + v + "'");
  return s;
}

struct Tolerances {
  double first = 1e-7;         // identities built from first derivatives
  double second = 1e-4;        // curvature and Weyl quantities
  double projective = 1e-6;    // projective-change residuals
  double constant_rel = 1e-9;  // relative spread declaring a sampled function constant

  Tolerances scaled(double s) const { return {first * s, second * s, projective * s, constant_rel * s}; }
  static Tolerances from_env() { return Tolerances{}.scaled(tolerance_scale_from_env()); }
};

// true below tol, false at 10x tol or more, inconclusive in between.
inline Flag decide(double residual, double tol) {
  if (!std::isfinite(residual)) return Flag::Inconclusive;
  if (residual < tol) return Flag::True;
  if (residual >= 10.0 * tol) return Flag::False;
  return Flag::Inconclusive;
}

inline Flag flag_and(Flag a, Flag b) {
  if (a == Flag::False || b == Flag::False) return Flag::False;
  if (a == Flag::True && b == Flag::True) return Flag::True;
  return Flag::Inconclusive;
}

struct FlagResult {
  Flag flag = Flag::Inconclusive;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;
};

inline FlagResult make_flag(double residual, double tol, std::string note = {}) {
  return {decide(residual, tol), residual, tol, std::move(note)};
}

inline FlagResult given_flag(Flag f, std::string note) { return {f, 0.0, 0.0, std::move(note)}; }

struct ClassificationReport {
  std::string kind;
  std::map<std::string, FlagResult> flags;
  std::map<std::string, double> diagnostics;
  int samples_used = 0;
  Tolerances tolerances;

  Flag flag(const std::string& name) const {
    auto it = flags.find(name);
    if (it == flags.end()) throw ValidationError("report has no flag '" + name + "'");
    return it->second.flag;
  }
};

namespace detail {

inline double rel(double diff, double scale) { return diff / std::max(1.0, scale); }

inline double vnorm(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

inline Domain metric_domain(const FinslerMetric& m) {
  return [&m](const Vec& p) { return m.contains(p); };
}

// dF/d eta^i = conj(dF^2/d etabar^i) / (2F).
inline Vec vertical_gradient(const FinslerMetric& m, const Vec& z, const Vec& eta, double F) {
  return F2_grad(m, z, eta) / (2.0 * F);
}

inline cplx horizontal_derivative(const FinslerMetric& m, const Vec& z, const Vec& eta) {
  const Vec d = wirtinger_gradient([&](const Vec& p) { return m.F(p, eta); }, z, false, DiffOptions::accurate(),
                                   metric_domain(m));
  return d.transpose() * eta;
}

}  // namespace detail

// Holomorphic curvature in direction eta:
// K = -(4/F^4) (dG^k/dzbar^h) etabar^h dF^2/d eta^k.
struct CurvatureSample {
  double K = 0.0;
  double imaginary_residual = 0.0;
  Vec z, eta;
};

inline Vec antiholomorphic_spray_derivative(const Spray& spray, const Vec& z, const Vec& eta) {
  const Domain dom = [&spray](const Vec& p) { return spray.contains(p); };
  const Mat J = wirtinger_jacobian([&](const Vec& p) { return spray.coefficients(p, eta); }, z, true,
                                   DiffOptions::nested_outer(), dom);
  return J * eta.conjugate();
}

inline CurvatureSample holomorphic_curvature(const FinslerMetric& m, const Spray& spray, const Vec& z,
                                             const Vec& eta) {
  if (!all_finite(eta) || eta.norm() == 0.0) throw ZeroDirectionError("curvature needs eta != 0");
  const double F = m(z, eta);
  const Vec dG = antiholomorphic_spray_derivative(spray, z, eta);
  const cplx s = F2_grad(m, z, eta).transpose() * dG;
  const cplx K = -4.0 / (F * F * F * F) * s;
  CurvatureSample c;
  c.K = K.real();
  c.imaginary_residual = std::abs(K.imag()) / std::max(1.0, std::abs(K.real()));
  c.z = z;
  c.eta = eta;
  return c;
}

inline FlagResult kahler_test(const MatrixField& g, const std::vector<Vec>& points, const Tolerances& tol = {}) {
  double worst = 0.0;
  for (const auto& z : points) {
    const auto [r, scale] = kahler_torsion(g, z);
    worst = std::max(worst, detail::rel(r, scale));
  }
  return make_flag(worst, tol.first);
}

inline FlagResult generalized_berwald_test(const RandersData& r, const std::vector<SamplePair>& samples,
                                           const Tolerances& tol = {}) {
  double worst = 0.0;
  for (const auto& s : samples) {
    double scale = 0.0;
    const cplx A = berwald_scalar_A(r, s.z, s.eta, DiffOptions::accurate(), &scale);
    worst = std::max(worst, detail::rel(std::abs(A), scale));
  }
  return make_flag(worst, tol.first);
}

// theta* of the spray vanishes (weakly Kahler).
inline FlagResult weakly_kahler_test(const Spray& spray, const std::vector<SamplePair>& samples,
                                     const Tolerances& tol = {}) {
  double worst = 0.0;
  for (const auto& s : samples) {
    const auto e = spray(s.z, s.eta);
    worst = std::max(worst, detail::rel(detail::vnorm(e.theta), detail::vnorm(e.G)));
  }
  return make_flag(worst, tol.first);
}

inline FlagResult constant_test(const std::function<double(const Vec&)>& f, const std::vector<Vec>& points,
                                const Tolerances& tol = {}) {
  if (points.empty()) throw ValidationError("constant test needs samples");
  const double f0 = f(points.front());
  double worst = 0.0;
  for (const auto& z : points) worst = std::max(worst, std::abs(f(z) - f0) / std::max(std::abs(f0), 1e-300));
  return make_flag(worst, tol.constant_rel);
}

// Douglas residuals for a Randers solution: G^h = G^a + (d eps . eta / 2 eps) eta and
// theta*_h = theta*_a + (1/eps) dbar_m eps (h_00 h^{mbar i} - etabar^m eta^i).
struct DouglasResiduals {
  double spray = 0.0, theta = 0.0;
};

inline DouglasResiduals douglas_residuals(const ZermeloStructure& s, const RandersData& r, const Vec& z,
                                          const Vec& eta) {
  const auto Sh = hermitian_spray(s.h, z, eta);
  const auto Sa = hermitian_spray(r.a, z, eta);
  const Domain dom = [&s](const Vec& p) { return s.contains(p); };
  const auto eps = [&s](const Vec& p) { return cplx(s.eps(p)); };
  const Vec d = wirtinger_gradient(eps, z, false, DiffOptions::accurate(), dom);
  const Vec db = wirtinger_gradient(eps, z, true, DiffOptions::accurate(), dom);
  const auto P = s.at(z);
  const double e = P.eps;
  const double h00 = quad(P.h, eta, eta).real();
  const Mat hinv = hermitian_inverse(P.h);
  const Vec shift_G = (cplx(d.transpose() * eta) / (2.0 * e)) * eta;
  const Vec shift_t = (1.0 / e) * (h00 * (hinv.transpose() * db) - cplx(db.transpose() * eta.conjugate()) * eta);
  DouglasResiduals res;
  res.spray = detail::rel(detail::vnorm(Sh.G - Sa.G - shift_G),
                          std::max({detail::vnorm(Sh.G), detail::vnorm(Sa.G), detail::vnorm(shift_G)}));
  res.theta = detail::rel(detail::vnorm(Sh.theta - Sa.theta - shift_t),
                          std::max({detail::vnorm(Sh.theta), detail::vnorm(Sa.theta), detail::vnorm(shift_t)}));
  return res;
}

struct DouglasReport {
  FlagResult douglas;           // both identities
  FlagResult spray_identity;    // G^h relation alone; tracks the A = 0 flag
  FlagResult a_criterion;       // A = 0 and theta*_F = theta*_a
};

inline DouglasReport douglas_test(const ZermeloStructure& s, const RandersData& r,
                                  const std::vector<SamplePair>& samples, const Tolerances& tol = {}) {
  if (classify_solution(s).kind != SolutionKind::Randers)
    throw HypothesisNotMetError("douglas_test needs a Randers solution");
  double rs = 0.0, rt = 0.0, rA = 0.0;
  for (const auto& p : samples) {
    const auto d = douglas_residuals(s, r, p.z, p.eta);
    rs = std::max(rs, d.spray);
    rt = std::max(rt, d.theta);
    double scale = 0.0;
    const cplx A = berwald_scalar_A(r, p.z, p.eta, DiffOptions::accurate(), &scale);
    const auto F = randers_spray(r, p.z, p.eta);
    const auto a = hermitian_spray(r.a, p.z, p.eta);
    rA = std::max({rA, detail::rel(std::abs(A), scale),
                   detail::rel(detail::vnorm(F.theta - a.theta), std::max(detail::vnorm(F.G), detail::vnorm(a.G)))});
  }
  return {make_flag(std::max(rs, rt), tol.first), make_flag(rs, tol.first), make_flag(rA, tol.first)};
}

// Projective change between a generalized Berwald spray (1) and another metric F~ (2):
// Q = delta_k F~ eta^k, residuals of dbar_r Q = Q dbar_r F~ / F~, B = -(theta1 . dF~) eta / F~,
// G2 = G1 + B + P eta with P = (Q + theta1 . dF~) / F~.
struct ProjectiveResiduals {
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  double max() const { return std::max({r1, r2, r3}); }
};

inline ProjectiveResiduals projective_residuals(const Spray& s1, const Spray& s2, const FinslerMetric& m2,
                                                const Vec& z, const Vec& eta) {
  const auto Q = [&](const Vec& e) -> cplx {
    const double F = m2(z, e);
    const Vec dF = detail::vertical_gradient(m2, z, e, F);
    return detail::horizontal_derivative(m2, z, e) - 2.0 * cplx(s1.coefficients(z, e).transpose() * dF);
  };
  const auto e1 = s1(z, eta);
  const auto e2 = s2(z, eta);
  const double F = m2(z, eta);
  const Vec dF = detail::vertical_gradient(m2, z, eta, F);
  const Vec dFbar = F2_grad_bar(m2, z, eta) / (2.0 * F);
  const cplx q = Q(eta);
  const Vec dQbar = wirtinger_gradient(Q, eta, true, DiffOptions::vertical(max_abs(eta)));
  const cplx th_dF = e1.theta.transpose() * dF;
  const Vec B = 0.5 * (e2.theta - e1.theta);
  const cplx P = (q + th_dF) / F;
  ProjectiveResiduals r;
  r.r1 = detail::rel(detail::vnorm(dQbar - (q / F) * dFbar), std::max(detail::vnorm(dQbar), std::abs(q)));
  const double scale = std::max({detail::vnorm(e1.G), detail::vnorm(e2.G), detail::vnorm(e1.theta),
                                 detail::vnorm(e2.theta), std::abs(q)});
  r.r2 = detail::rel(detail::vnorm(B + (th_dF / F) * eta), scale);
  r.r3 = detail::rel(detail::vnorm(e2.G - e1.G - B - P * eta), scale);
  return r;
}

inline FlagResult projectively_related_test(const Spray& s1, const Spray& s2, const FinslerMetric& m2,
                                            const std::vector<SamplePair>& samples, Flag s1_generalized_berwald,
                                            const Tolerances& tol = {}) {
  if (s1_generalized_berwald == Flag::False)
    throw HypothesisNotMetError("projective relatedness test needs a generalized Berwald first metric");
  double worst = 0.0;
  for (const auto& p : samples) worst = std::max(worst, projective_residuals(s1, s2, m2, p.z, p.eta).max());
  FlagResult f = make_flag(worst, tol.projective);
  if (s1_generalized_berwald == Flag::Inconclusive) {
    f.flag = f.flag == Flag::True ? Flag::Inconclusive : f.flag;
    f.note = "generalized Berwald flag of the first metric is inconclusive";
  }
  return f;
}

// Residual of G^i = (1/F)(dF/dz^k) eta^k eta^i, combined with the complex Berwald flag.
inline FlagResult projective_flatness_test(const FinslerMetric& m, const Spray& spray,
                                           const std::vector<SamplePair>& samples, Flag complex_berwald,
                                           const Tolerances& tol = {}) {
  double worst = 0.0;
  for (const auto& p : samples) {
    const double F = m(p.z, p.eta);
    const Vec G = spray.coefficients(p.z, p.eta);
    const Vec target = (detail::horizontal_derivative(m, p.z, p.eta) / F) * p.eta;
    worst = std::max(worst, detail::rel(detail::vnorm(G - target), std::max(detail::vnorm(G), detail::vnorm(target))));
  }
  FlagResult f = make_flag(worst, tol.first);
  f.flag = flag_and(f.flag, complex_berwald);
  if (complex_berwald != Flag::True) f.note = std::string("complex Berwald flag is ") + flag_name(complex_berwald);
  return f;
}

struct WeylTensor {
  int n = 0;
  std::vector<cplx> c;  // W^i_{j kbar h} at ((i * n + j) * n + k) * n + h

  cplx& operator()(int i, int j, int k, int h) { return c[((i * n + j) * n + k) * n + h]; }
  cplx operator()(int i, int j, int k, int h) const { return c[((i * n + j) * n + k) * n + h]; }
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : c) m = std::max(m, std::abs(x));
    return m;
  }
};

// W^i_{j kbar h} = K^i_{j kbar h} - (K_{kbar j} delta^i_h + K_{kbar h} delta^i_j)/(n+1),
// K^i_{j kbar h} = -delta_kbar L^i_{jh}, L^i_{jh} = d N^i_h / d eta^j,
// delta_kbar = d/dzbar^k - conj(N^l_k) d/d etabar^l.
inline WeylTensor weyl_invariant(const FinslerMetric& m, const Spray& spray, const Vec& z, const Vec& eta,
                                 Flag complex_berwald) {
  if (complex_berwald != Flag::True)
    throw HypothesisNotMetError(std::string("Weyl invariant needs a complex Berwald metric; flag is ") +
                                flag_name(complex_berwald));
  if (!all_finite(eta) || eta.norm() == 0.0) throw ZeroDirectionError("Weyl invariant needs eta != 0");
  const int n = m.n;
  WeylTensor W{n, std::vector<cplx>(static_cast<std::size_t>(n) * n * n * n, 0.0)};
  if (n == 1) return W;
  const Domain dom = [&spray](const Vec& p) { return spray.contains(p); };
  // L(p, e)[j] = matrix (i, h) of d N^i_h / d eta^j
  const auto L = [&](const Vec& p, const Vec& e) {
    return wirtinger_all([&](const Vec& x) { return spray.connection(p, x); }, e, DiffOptions::vertical(max_abs(e))).d;
  };
  const DiffOptions outer{1e-3, 4, 0.0};
  const auto Lz = wirtinger_all(
      [&](const Vec& p) {
        const auto l = L(p, eta);
        Mat stacked(n * n, n);
        for (int j = 0; j < n; ++j) stacked.block(j * n, 0, n, n) = l[j];
        return stacked;
      },
      z, outer, dom);
  const auto Le = wirtinger_all(
      [&](const Vec& e) {
        const auto l = L(z, e);
        Mat stacked(n * n, n);
        for (int j = 0; j < n; ++j) stacked.block(j * n, 0, n, n) = l[j];
        return stacked;
      },
      eta, DiffOptions::vertical(max_abs(eta)));
  const Mat N = spray.connection(z, eta);
  std::vector<cplx> K(W.c.size());
  auto kidx = [n](int i, int j, int k, int h) { return ((i * n + j) * n + k) * n + h; };
  for (int k = 0; k < n; ++k) {
    Mat dk = Lz.dbar[k];
    for (int l = 0; l < n; ++l) dk -= std::conj(N(l, k)) * Le.dbar[l];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int h = 0; h < n; ++h) K[kidx(i, j, k, h)] = -dk(j * n + i, h);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int h = 0; h < n; ++h) {
          cplx Kkj = 0.0, Kkh = 0.0;
          for (int q = 0; q < n; ++q) {
            Kkj += K[kidx(q, q, k, j)];
            Kkh += K[kidx(q, q, k, h)];
          }
          W(i, j, k, h) = K[kidx(i, j, k, h)] - (Kkj * double(i == h) + Kkh * double(i == j)) / double(n + 1);
        }
  return W;
}

namespace detail {

struct EpsDerivatives {
  double eps = 0.0;
  Vec d, db;  // d eps / dz, d eps / dzbar
  Mat ddb;    // ddb(j, m) = d^2 eps / dz^j dzbar^m
};

inline EpsDerivatives eps_derivatives(const ZermeloStructure& s, const Vec& z) {
  const Domain dom = [&s](const Vec& p) { return s.contains(p); };
  const auto eps = [&s](const Vec& p) { return cplx(s.eps(p)); };
  EpsDerivatives e;
  e.eps = s.eps(z);
  e.d = wirtinger_gradient(eps, z, false, DiffOptions::accurate(), dom);
  e.db = wirtinger_gradient(eps, z, true, DiffOptions::accurate(), dom);
  e.ddb = wirtinger_jacobian(
      [&](const Vec& p) { return wirtinger_gradient(eps, p, false, DiffOptions::accurate(), dom); }, z, true,
      DiffOptions::nested_outer(), dom);
  return e;
}

// (1/c) (dbar c . etabar)(d c . eta) - d dbar c(eta, etabar)
inline cplx log_hessian_form(const EpsDerivatives& e, double c, const Vec& eta) {
  const cplx first = cplx(e.db.transpose() * eta.conjugate()) * cplx(e.d.transpose() * eta) / c;
  const cplx second = eta.transpose() * e.ddb * eta.conjugate();
  return first - second;
}

}  // namespace detail

struct CurvatureHypotheses {
  Flag generalized_berwald = Flag::Inconclusive;
  Flag eps_constant = Flag::Inconclusive;
  Flag a_F_projectively_related = Flag::Inconclusive;
  Flag kahler_h = Flag::Inconclusive;
  Flag a_projectively_flat = Flag::Inconclusive;
};

struct CurvatureRelationReport {
  double K_F = 0.0, K_a = 0.0, K_h = 0.0;
  std::map<std::string, double> residuals;  // relation -> relative |LHS - RHS|
  std::vector<std::string> skipped;         // relations whose hypotheses were not met
};

// Curvature relations for a generalized Berwald Randers solution:
//   K_F = (alpha^3/F^3) K_a - (4 conj(beta)/(F^3 |beta|)) b_l dG_a^l/dzbar^m etabar^m
//   K_h = (eps alpha^4/h^4) K_a + (4/(eps h^4)) conj(W_0) W_l dG_a^l/dzbar^m etabar^m
//         - (2/(eps h^2)) ((1/eps) dbar eps d eps - d dbar eps)(eta, etabar)
//   K_F = (1/(F^2 |W_0|)) [eps alpha^3 K_a - (h^4/F) K_h + (2h^2/(eps F)) ((1/eps) dbar eps d eps - d dbar eps)]
//   K_F = (1/(F^2 |W_0|)) [eps alpha^3 K_a - (h^4/F) K_h]             when eps is constant
//   K_h = ((n eps + ||W||^2)/(n eps^2)) K_a - (2/eps) h^{mbar j} (dbar_m eps d_j eps - dbar_m d_j eps)
//                                                                    when h is Kahler and a projectively flat
inline CurvatureRelationReport curvature_relation_check(const ZermeloStructure& s, const RandersData& r,
                                                        const Vec& z, const Vec& eta,
                                                        const CurvatureHypotheses& hyp) {
  if (hyp.generalized_berwald != Flag::True)
    throw HypothesisNotMetError(std::string("curvature relations need generalized Berwald; flag is ") +
                                flag_name(hyp.generalized_berwald));
  const FinslerMetric mF = randers_metric(r), ma = hermitian_metric(r.a), mh = hermitian_metric(s.h);
  const Spray sF = randers_spray_evaluator(r), sa = hermitian_spray_evaluator(r.a), sh = hermitian_spray_evaluator(s.h);
  CurvatureRelationReport rep;
  rep.K_F = holomorphic_curvature(mF, sF, z, eta).K;
  rep.K_a = holomorphic_curvature(ma, sa, z, eta).K;
  rep.K_h = holomorphic_curvature(mh, sh, z, eta).K;

  const auto P = s.at(z);
  const auto R = r.at(z);
  const double al = hermitian_norm(R.a, eta), h = hermitian_norm(P.h, eta);
  const cplx beta = R.b.transpose() * eta;
  const double mb = std::abs(beta), F = al + mb;
  const double e = P.eps;
  const cplx W0 = P.W_low.transpose() * eta;
  const Vec dGa = antiholomorphic_spray_derivative(sa, z, eta);
  const auto ed = detail::eps_derivatives(s, z);
  const cplx lh = detail::log_hessian_form(ed, e, eta);
  const double F3 = F * F * F, h2 = h * h, h4 = h2 * h2;

  const auto put = [&rep](const std::string& name, cplx lhs, cplx rhs, double scale) {
    rep.residuals[name] = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs), scale});
  };
  {
    const cplx t1 = al * al * al / F3 * rep.K_a;
    const cplx t2 = 4.0 * std::conj(beta) / (F3 * mb) * cplx(R.b.transpose() * dGa);
    put("randers_a", rep.K_F, t1 - t2, std::max(std::abs(t1), std::abs(t2)));
  }
  const cplx t_h1 = e * std::pow(al, 4) / h4 * rep.K_a;
  const cplx t_h2 = 4.0 / (e * h4) * std::conj(W0) * cplx(P.W_low.transpose() * dGa);
  const cplx t_h3 = 2.0 / (e * h2) * lh;
  put("h_a", rep.K_h, t_h1 + t_h2 - t_h3, std::max({std::abs(t_h1), std::abs(t_h2), std::abs(t_h3)}));

  const double pref = 1.0 / (F * F * std::abs(W0));
  const cplx u1 = e * al * al * al * rep.K_a, u2 = h4 / F * rep.K_h, u3 = 2.0 * h2 / (e * F) * lh;
  const double us = pref * std::max({std::abs(u1), std::abs(u2), std::abs(u3)});
  put("randers_h_a", rep.K_F, pref * (u1 - u2 + u3), us);
  if (hyp.eps_constant == Flag::True && hyp.a_F_projectively_related == Flag::True)
    put("randers_h_a_constant_eps", rep.K_F, pref * (u1 - u2), us);
  else
    rep.skipped.push_back("randers_h_a_constant_eps");

  if (hyp.kahler_h == Flag::True && hyp.a_projectively_flat == Flag::True) {
    const double n = s.n;
    const Mat X = ed.db * ed.d.transpose() - ed.ddb.transpose();  // X(m, j)
    const Mat hinv = hermitian_inverse(P.h);                       // h^{mbar j} = hinv(m, j)
    const cplx tr = (hinv.transpose() * X).trace();
    const cplx c2 = (n * e + P.W2) / (n * e * e) * rep.K_a;
    put("constant_curvatures", rep.K_h, c2 - 2.0 / e * tr, std::max(std::abs(c2), std::abs(2.0 / e * tr)));
  } else {
    rep.skipped.push_back("constant_curvatures");
  }
  return rep;
}

// Conformal solution F = rho h (rho^2 = 1/eps):
//   G^h = G^F - (d rho^2 . eta / 2 rho^2) eta,
//   theta*_h = theta*_F - (1/rho^2) dbar_m rho^2 (h_00 h^{mbar i} - etabar^m eta^i),
//   K_F = K_h/rho^2 + (2/(rho^2 F^2)) ((1/rho^2) dbar rho^2 d rho^2 - d dbar rho^2)(eta, etabar).
struct ConformalReport {
  double spray = 0.0, theta = 0.0, curvature = 0.0;
  FlagResult homothetic;
  FlagResult projectively_related;
  Tolerances tolerances;
  bool all_pass() const {
    return spray < tolerances.first && theta < tolerances.first && curvature < tolerances.second;
  }
};

inline ConformalReport conformal_relation_check(const ZermeloStructure& s, const std::vector<SamplePair>& samples,
                                                const Tolerances& tol = {}, bool with_curvature = true) {
  if (classify_solution(s).kind != SolutionKind::ConformalHermitian)
    throw HypothesisNotMetError("conformal relations need a conformal Hermitian solution");
  if (samples.empty()) throw ValidationError("conformal relation check needs samples");
  const MatrixField gF = conformal_form(s);
  const FinslerMetric mF = hermitian_metric(gF, Provenance::Conformal), mh = hermitian_metric(s.h);
  const Spray sF = hermitian_spray_evaluator(gF), sh = hermitian_spray_evaluator(s.h);
  const Domain dom = [&s](const Vec& p) { return s.contains(p); };
  const auto rho2 = [&s](const Vec& p) { return cplx(1.0 / s.at(p).eps); };
  ConformalReport rep;
  rep.tolerances = tol;
  std::vector<Vec> pts;
  for (const auto& p : samples) {
    const auto Sh = hermitian_spray(s.h, p.z, p.eta), SF = hermitian_spray(gF, p.z, p.eta);
    const Vec d = wirtinger_gradient(rho2, p.z, false, DiffOptions::accurate(), dom);
    const Vec db = wirtinger_gradient(rho2, p.z, true, DiffOptions::accurate(), dom);
    const double r2 = rho2(p.z).real();
    const Mat h = s.h.eval(p.z);
    const double h00 = quad(h, p.eta, p.eta).real();
    const Vec shift_G = (cplx(d.transpose() * p.eta) / (2.0 * r2)) * p.eta;
    const Vec shift_t =
        (1.0 / r2) * (h00 * (hermitian_inverse(h).transpose() * db) - cplx(db.transpose() * p.eta.conjugate()) * p.eta);
    rep.spray = std::max(rep.spray, detail::rel(detail::vnorm(Sh.G - SF.G + shift_G),
                                                std::max(detail::vnorm(Sh.G), detail::vnorm(SF.G))));
    rep.theta = std::max(rep.theta, detail::rel(detail::vnorm(Sh.theta - SF.theta + shift_t),
                                                std::max(detail::vnorm(Sh.theta), detail::vnorm(SF.theta))));
    if (with_curvature) {
      const double KF = holomorphic_curvature(mF, sF, p.z, p.eta).K;
      const double Kh = holomorphic_curvature(mh, sh, p.z, p.eta).K;
      detail::EpsDerivatives e;
      e.d = d;
      e.db = db;
      e.ddb = wirtinger_jacobian(
          [&](const Vec& q) { return wirtinger_gradient(rho2, q, false, DiffOptions::accurate(), dom); }, p.z, true,
          DiffOptions::nested_outer(), dom);
      const double F2 = r2 * h00;
      const cplx rhs = Kh / r2 + 2.0 / (r2 * F2) * detail::log_hessian_form(e, r2, p.eta);
      rep.curvature = std::max(rep.curvature, std::abs(KF - rhs) / std::max({1.0, std::abs(KF), std::abs(Kh / r2)}));
    }
    pts.push_back(p.z);
  }
  rep.homothetic = constant_test([&](const Vec& p) { return rho2(p).real(); }, pts, tol);
  rep.projectively_related = projectively_related_test(sh, sF, mF, samples, Flag::True, tol);
  return rep;
}

struct ClassifyOptions {
  int points = 64;
  int directions = 8;
  std::uint64_t seed = 0;
  Domain sample_domain;       // defaults to the structure domain
  double sample_radius = 1.0;
  Tolerances tolerances = Tolerances::from_env();
};

inline ClassificationReport classify(const ZermeloStructure& s, const ClassifyOptions& opt = {}) {
  const Domain dom = intersect([&s](const Vec& p) { return s.contains(p); }, opt.sample_domain);
  const auto samples = sample_plan(s.n, opt.points, opt.directions, dom, opt.sample_radius, opt.seed);
  std::vector<Vec> pts;
  for (int i = 0; i < opt.points; ++i) pts.push_back(samples[static_cast<std::size_t>(i) * opt.directions].z);
  const Tolerances& tol = opt.tolerances;
  const auto cls = classify_solution(s);
  ClassificationReport rep;
  rep.kind = kind_name(cls.kind);
  rep.tolerances = tol;
  rep.samples_used = static_cast<int>(samples.size());
  auto& f = rep.flags;

  f["kahler_h"] = kahler_test(s.h, pts, tol);
  const Spray sh = hermitian_spray_evaluator(s.h);
  const FinslerMetric mh = hermitian_metric(s.h);

  if (cls.kind == SolutionKind::Randers) {
    const RandersData r = build_randers_data(s);
    const Spray sa = hermitian_spray_evaluator(r.a), sF = randers_spray_evaluator(r);
    const FinslerMetric ma = hermitian_metric(r.a), mF = forward_metric(s);
    f["kahler_a"] = kahler_test(r.a, pts, tol);
    f["generalized_berwald"] = generalized_berwald_test(r, samples, tol);
    f["kahler"] = weakly_kahler_test(sF, samples, tol);
    f["kahler"].note = "theta* of F vanishes";
    const Flag cb = flag_and(f["generalized_berwald"].flag, f["kahler"].flag);
    f["complex_berwald"] = {cb, std::max(f["generalized_berwald"].residual, f["kahler"].residual), tol.first, ""};
    const auto dg = douglas_test(s, r, samples, tol);
    f["douglas"] = dg.douglas;
    f["a_spray_identity"] = dg.spray_identity;
    f["douglas_a_criterion"] = dg.a_criterion;
    f["eps_constant"] = constant_test([&s](const Vec& p) { return s.eps(p); }, pts, tol);
    f["projectively_flat"] = projective_flatness_test(mF, sF, samples, cb, tol);
    f["projectively_related_h_a"] = projectively_related_test(sh, sa, ma, samples, Flag::True, tol);
    f["projectively_related_h_F"] = projectively_related_test(sh, sF, mF, samples, Flag::True, tol);
    f["projectively_related_a_F"] = projectively_related_test(sa, sF, mF, samples, Flag::True, tol);
    double nb = 0.0;
    for (const auto& p : pts) nb = std::max(nb, std::abs(r.at(p).b_norm2 - b_norm2_closed_form(s, p)));
    rep.diagnostics["b_norm2_formula_defect"] = nb;
  } else if (cls.kind == SolutionKind::ConformalHermitian) {
    const MatrixField gF = conformal_form(s);
    const Spray sF = hermitian_spray_evaluator(gF);
    const FinslerMetric mF = hermitian_metric(gF, Provenance::Conformal);
    f["generalized_berwald"] = given_flag(Flag::True, "Hermitian metrics are generalized Berwald");
    f["douglas"] = given_flag(Flag::True, "Hermitian metrics are complex Douglas");
    f["kahler"] = kahler_test(gF, pts, tol);
    f["complex_berwald"] = f["kahler"];
    f["projectively_flat"] = projective_flatness_test(mF, sF, samples, f["kahler"].flag, tol);
    const auto cr = conformal_relation_check(s, samples, tol, false);
    f["homothetic"] = cr.homothetic;
    f["projectively_related_h_F"] = cr.projectively_related;
    rep.diagnostics["conformal_spray_defect"] = cr.spray;
    rep.diagnostics["conformal_theta_defect"] = cr.theta;
  } else {
    f["generalized_berwald"] = given_flag(Flag::Inconclusive, "alpha - |beta| metrics are not classified");
  }
  return rep;
}

}  // namespace znav
