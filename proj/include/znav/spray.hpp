#pragma once

#include <cmath>
#include <functional>

#include "errors.hpp"
#include "finsler.hpp"
#include "linalg.hpp"
#include "navigation.hpp"
#include "wirtinger.hpp"

namespace znav {

struct SprayEvaluation {
  Vec G;      // spray coefficients G^i
  Vec theta;  // theta*^i
  Mat N;      // Chern-Finsler connection N^i_j, when has_N
  bool has_N = false;
};

struct Spray {
  int n = 0;
  std::function<SprayEvaluation(const Vec&, const Vec&)> eval;
  std::function<Vec(const Vec&, const Vec&)> coefficients;  // G^i alone
  std::function<Mat(const Vec&, const Vec&)> connection;    // N^i_j(z, eta)
  Domain domain;

  bool contains(const Vec& z) const { return z.size() == n && all_finite(z) && (!domain || domain(z)); }
  SprayEvaluation operator()(const Vec& z, const Vec& eta) const {
    if (!contains(z)) throw DomainError("point " + format_point(z) + " outside the spray domain");
    return eval(z, eta);
  }
};

namespace detail {

inline auto matrix_fn(const MatrixField& g) {
  return [&g](const Vec& p) { return g.eval(p); };
}
inline Domain field_domain(const MatrixField& g) {
  return [&g](const Vec& p) { return g.contains(p); };
}

// t_m = Gamma_{l rbar mbar} x^l conj(y^r), Gamma = da_{lm}/dzbar^r - da_{lr}/dzbar^m.
inline Vec torsion_contract(const std::vector<Mat>& dbar, const Vec& x, const Vec& y) {
  const Eigen::Index n = x.size();
  Vec t = Vec::Zero(n);
  for (Eigen::Index r = 0; r < n; ++r) t += std::conj(y(r)) * (dbar[r].transpose() * x);
  for (Eigen::Index m = 0; m < n; ++m) t(m) -= y.dot(dbar[m].transpose() * x);
  return t;
}

}  // namespace detail

// N^i_j = g^{mbar i} dg_{l mbar}/dz^j eta^l,  2G = N eta,
// theta*^k = -Gamma_{l rbar mbar} g^{mbar k} eta^l etabar^r.
inline SprayEvaluation hermitian_spray(const MatrixField& g, const Vec& z, const Vec& eta,
                                       const DiffOptions& o = DiffOptions::accurate()) {
  if (!g.contains(z)) throw DomainError("point " + format_point(z) + " outside the metric domain");
  const Mat M = g.eval(z);
  const Mat Minv = hermitian_inverse(M);
  const auto d = wirtinger_all(detail::matrix_fn(g), z, o, detail::field_domain(g));
  const Eigen::Index n = z.size();
  Mat C(n, n);
  for (Eigen::Index j = 0; j < n; ++j) C.col(j) = d.d[j].transpose() * eta;
  SprayEvaluation s;
  s.N = Minv.transpose() * C;
  s.has_N = true;
  s.G = 0.5 * s.N * eta;
  s.theta = -(Minv.transpose() * detail::torsion_contract(d.dbar, eta, eta));
  return s;
}

// max over index triples of |Gamma_{l rbar mbar}| at z, and the largest |dg| used as scale.
inline std::pair<double, double> kahler_torsion(const MatrixField& g, const Vec& z,
                                                const DiffOptions& o = DiffOptions::accurate()) {
  const auto d = wirtinger_all(detail::matrix_fn(g), z, o, detail::field_domain(g));
  const Eigen::Index n = z.size();
  double worst = 0.0, scale = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    scale = std::max(scale, max_abs(d.dbar[r]));
    for (Eigen::Index m = 0; m < n; ++m)
      for (Eigen::Index l = 0; l < n; ++l)
        worst = std::max(worst, std::abs(d.dbar[r](l, m) - d.dbar[m](l, r)));
  }
  return {worst, scale};
}

// Chern-Finsler N^i_j = g^{mbar i} d/dz^j (dF^2/d etabar^m) for any Finsler metric.
inline Mat chern_finsler_connection(const FinslerMetric& m, const Vec& z, const Vec& eta,
                                    const DiffOptions& o = DiffOptions::accurate()) {
  const auto ft = fundamental_tensor(m, z, eta);
  const Domain dom = [&m](const Vec& p) { return m.contains(p); };
  const Mat C = wirtinger_jacobian([&](const Vec& p) { return F2_grad_bar(m, p, eta); }, z, false, o, dom);
  return hermitian_inverse(ft.g).transpose() * C;
}

// theta*^k = g^{mbar k} l_pbar conj(sum_j (L^p_{jm} - L^p_{mj}) eta^j),  L^p_{jm} = d N^p_m / d eta^j.
inline Vec generic_theta(const FinslerMetric& m, const Vec& z, const Vec& eta,
                         const DiffOptions& o = DiffOptions::accurate()) {
  const auto ft = fundamental_tensor(m, z, eta);
  const auto dN = wirtinger_all([&](const Vec& e) { return chern_finsler_connection(m, z, e, o); },
                                eta, DiffOptions::vertical(max_abs(eta)));
  const Eigen::Index n = eta.size();
  Mat contracted = Mat::Zero(n, n);  // sum_j eta^j L^p_{jm}
  for (Eigen::Index j = 0; j < n; ++j) contracted += eta(j) * dN.d[j];
  Mat T(n, n);
  for (Eigen::Index mm = 0; mm < n; ++mm) T.col(mm) = contracted.col(mm) - dN.d[mm] * eta;
  const Vec l = ft.g.transpose() * eta;  // l_pbar = g_{h pbar} eta^h
  const Vec t = T.conjugate().transpose() * l;
  return hermitian_inverse(ft.g).transpose() * t;
}

inline SprayEvaluation generic_spray(const FinslerMetric& m, const Vec& z, const Vec& eta,
                                     const DiffOptions& o = DiffOptions::accurate()) {
  SprayEvaluation s;
  s.N = chern_finsler_connection(m, z, eta, o);
  s.has_N = true;
  s.G = 0.5 * s.N * eta;
  s.theta = generic_theta(m, z, eta, o);
  return s;
}

// A = eta^k d|beta|^2/dz^k - 2 conj(beta) b_l G_a^l.
inline cplx berwald_scalar_A(const RandersData& r, const Vec& z, const Vec& eta,
                             const DiffOptions& o = DiffOptions::accurate(), double* scale = nullptr) {
  const Domain dom = [&r](const Vec& p) { return r.contains(p); };
  const Vec b = r.b(z);
  const cplx beta = b.transpose() * eta;
  if (std::abs(beta) < 1e-12) throw BetaZeroError("|beta| below 1e-12 at " + format_point(z));
  const Vec Ga = hermitian_spray(r.a, z, eta, o).G;
  const Vec d = wirtinger_gradient(
      [&](const Vec& p) { return std::norm(cplx(r.b.eval(p).transpose() * eta)); }, z, false, o, dom);
  const cplx t1 = d.transpose() * eta;
  const cplx t2 = 2.0 * std::conj(beta) * cplx(b.transpose() * Ga);
  if (scale) *scale = std::abs(t1) + std::abs(t2);
  return t1 - t2;
}

struct RandersSprayOptions {
  DiffOptions diff = DiffOptions::accurate();
  double berwald_rel_tol = 1e-8;   // pointwise |A| threshold selecting the Berwald theta* formula
  bool with_theta = true;
};

namespace detail {

// Randers theta* valid for generalized Berwald data (A = 0).
inline Vec randers_theta_berwald(const RandersData& r, const RandersData::Pointwise& P, const Vec& z,
                                 const Vec& eta, const SprayEvaluation& sa, const DiffOptions& o) {
  const Domain dom = [&r](const Vec& p) { return r.contains(p); };
  const double al2 = quad(P.a, eta, eta).real(), al = std::sqrt(al2);
  const cplx beta = P.b.transpose() * eta;
  const double mb = std::abs(beta);
  const double F = al + mb;
  const double gam = F * F + al2 * (P.b_norm2 - 1.0);
  const Vec bupbar = P.b_up.conjugate();
  const Vec xi = std::conj(beta) * eta + al2 * P.b_up;

  const auto da = wirtinger_all([&r](const Vec& p) { return r.a.eval(p); }, z, o, dom);
  const Mat dbb_zb = wirtinger_jacobian([&r](const Vec& p) { return Vec(r.b.eval(p).conjugate()); }, z,
                                        true, o, dom);  // d conj(b_r) / dzbar^m
  const Mat db_zb = wirtinger_jacobian([&r](const Vec& p) { return r.b.eval(p); }, z, true, o, dom);

  const Vec Om = sa.N.conjugate().transpose() * P.b.conjugate() -
                 dbb_zb.transpose() * eta.conjugate() -
                 (std::conj(beta) * std::conj(beta) / (mb * mb)) * (db_zb.transpose() * eta);
  const Mat htil = P.a_inv - (al2 / gam) * bupbar * P.b_up.transpose();

  // Gamma(eta, etabar, bbar^m) and Gamma(b^l, etabar, .)
  const Vec tg = torsion_contract(da.dbar, eta, eta);
  const cplx s1 = P.b_up.dot(tg);  // sum_m tg_m conj(b^m)
  const Vec v = torsion_contract(da.dbar, P.b_up, eta) + 2.0 * Om;
  const Mat proj = htil - (std::conj(beta) / gam) * bupbar * eta.transpose();
  const Vec t2 = -(al * beta / mb) * (proj.transpose() * v);
  return sa.theta + (s1 / gam) * xi + t2;
}

}  // namespace detail

// Randers spray: G = G_a + correction (gamma = F^2 + alpha^2(||b||^2 - 1), xi = conj(beta) eta +
// alpha^2 b^i); theta* by the Berwald formula when A vanishes at (z, eta), else generic.
inline SprayEvaluation randers_spray(const RandersData& r, const Vec& z, const Vec& eta,
                                     const RandersSprayOptions& opt = {}) {
  if (r.sign < 0.0)
    throw HypothesisNotMetError("Randers spray formula needs F = alpha + |beta|");
  const auto P = r.at(z);
  if (!(P.b_norm2 < 1.0)) throw ConvexityError("||b||^2 = " + std::to_string(P.b_norm2) + " >= 1");
  const cplx beta = P.b.transpose() * eta;
  const double mb = std::abs(beta);
  // g blows up like 1/|beta| on the beta = 0 locus, so no spray exists there
  if (mb < 1e-12) throw BetaZeroError("|beta| below 1e-12 at " + format_point(z));
  const DiffOptions& o = opt.diff;
  const Domain dom = [&r](const Vec& p) { return r.contains(p); };
  const SprayEvaluation sa = hermitian_spray(r.a, z, eta, o);

  const double al2 = quad(P.a, eta, eta).real(), al = std::sqrt(al2);
  const double F = al + mb;
  const double nb2 = P.b_norm2;
  const double gam = F * F + al2 * (nb2 - 1.0);
  const Vec bupbar = P.b_up.conjugate();
  const Vec xi = std::conj(beta) * eta + al2 * P.b_up;
  const Vec lbar = P.a.transpose() * eta;

  const Mat dbupbar = wirtinger_jacobian(
      [&r](const Vec& p) {
        const auto q = r.at(p);
        return Vec(q.b_up.conjugate());
      },
      z, false, o, dom);
  const Mat dbbar =
      wirtinger_jacobian([&r](const Vec& p) { return Vec(r.b.eval(p).conjugate()); }, z, false, o, dom);

  const Vec dbbar_eta = dbbar * eta;
  const cplx term1 = (cplx(lbar.transpose() * (dbupbar * eta)) -
                      (beta * beta / (mb * mb)) * cplx(eta.conjugate().transpose() * dbbar_eta)) /
                     (2.0 * gam);
  const Mat k = 2.0 * al * P.a_inv.transpose() +
                (2.0 * (al * nb2 + 2.0 * mb) / gam) * eta * eta.adjoint() -
                (2.0 * al * al2 / gam) * P.b_up * bupbar.transpose() -
                (2.0 * al / gam) * (std::conj(beta) * eta * bupbar.transpose() +
                                    beta * P.b_up * eta.adjoint());
  SprayEvaluation s;
  s.G = sa.G + term1 * xi + (beta / (4.0 * mb)) * (k * dbbar_eta);
  if (!opt.with_theta) return s;

  double scale = 0.0;
  const cplx A = berwald_scalar_A(r, z, eta, o, &scale);
  if (std::abs(A) <= opt.berwald_rel_tol * (scale + 1e-6 * mb * mb))
    s.theta = detail::randers_theta_berwald(r, P, z, eta, sa, o);
  else
    s.theta = generic_theta(randers_metric(r), z, eta, o);
  return s;
}

inline Spray hermitian_spray_evaluator(const MatrixField& g) {
  Spray sp;
  sp.n = g.dim;
  sp.domain = [g](const Vec& z) { return g.contains(z); };
  sp.eval = [g](const Vec& z, const Vec& eta) { return hermitian_spray(g, z, eta); };
  sp.coefficients = [g](const Vec& z, const Vec& eta) { return hermitian_spray(g, z, eta).G; };
  sp.connection = [g](const Vec& z, const Vec& eta) { return hermitian_spray(g, z, eta).N; };
  return sp;
}

inline Spray randers_spray_evaluator(const RandersData& r, RandersSprayOptions opt = {}) {
  Spray sp;
  sp.n = r.n;
  sp.domain = [r](const Vec& z) { return r.contains(z); };
  sp.eval = [r, opt](const Vec& z, const Vec& eta) { return randers_spray(r, z, eta, opt); };
  RandersSprayOptions g_only = opt;
  g_only.with_theta = false;
  sp.coefficients = [r, g_only](const Vec& z, const Vec& eta) { return randers_spray(r, z, eta, g_only).G; };
  const FinslerMetric m = randers_metric(r);
  sp.connection = [m](const Vec& z, const Vec& eta) { return chern_finsler_connection(m, z, eta); };
  return sp;
}

inline Spray generic_spray_evaluator(const FinslerMetric& m) {
  Spray sp;
  sp.n = m.n;
  sp.domain = m.domain;
  sp.eval = [m](const Vec& z, const Vec& eta) { return generic_spray(m, z, eta); };
  sp.coefficients = [m](const Vec& z, const Vec& eta) -> Vec { return 0.5 * chern_finsler_connection(m, z, eta) * eta; };
  sp.connection = [m](const Vec& z, const Vec& eta) { return chern_finsler_connection(m, z, eta); };
  return sp;
}

// The spray of the time-optimal metric of a navigation structure.
inline Spray forward_spray(const ZermeloStructure& s) {
  switch (classify_solution(s).kind) {
    case SolutionKind::ConformalHermitian: return hermitian_spray_evaluator(conformal_form(s));
    case SolutionKind::Randers: return randers_spray_evaluator(build_randers_data(s));
    case SolutionKind::AlphaBetaNonRanders: return generic_spray_evaluator(forward_metric(s));
  }
  throw ValidationError("unknown solution kind");
}

}  // namespace znav
