#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "navigation.hpp"
#include "path.hpp"
#include "wirtinger.hpp"

namespace znav {

enum class Provenance { ForwardSolution, RandersComposed, Hermitian, Conformal };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::ForwardSolution: return "forward-solution";
    case Provenance::RandersComposed: return "randers-composed";
    case Provenance::Hermitian: return "hermitian";
    case Provenance::Conformal: return "conformal";
  }
  return "?";
}

struct FinslerMetric {
  int n = 0;
  std::function<double(const Vec&, const Vec&)> F;
  // Optional closed forms. F2_grad_bar(z, eta)_m = dF^2/d etabar^m.
  std::function<Vec(const Vec&, const Vec&)> F2_grad_bar;
  // Set for purely Hermitian metrics: F^2 = g_{i jbar}(z) eta^i conj(eta^j).
  std::function<Mat(const Vec&)> hermitian_form;
  Provenance provenance = Provenance::ForwardSolution;
  Domain domain;

  bool contains(const Vec& z) const { return z.size() == n && all_finite(z) && (!domain || domain(z)); }

  double operator()(const Vec& z, const Vec& eta) const {
    if (!contains(z)) throw DomainError("point " + format_point(z) + " outside the metric domain");
    return F(z, eta);
  }
};

inline FinslerMetric hermitian_metric(const MatrixField& g, Provenance prov = Provenance::Hermitian) {
  FinslerMetric m;
  m.n = g.dim;
  m.provenance = prov;
  m.domain = [g](const Vec& z) { return g.contains(z); };
  m.hermitian_form = [g](const Vec& z) { return g.eval(z); };
  m.F = [g](const Vec& z, const Vec& eta) { return hermitian_norm(g.eval(z), eta); };
  m.F2_grad_bar = [g](const Vec& z, const Vec& eta) -> Vec { return g.eval(z).transpose() * eta; };
  return m;
}

// F = alpha + sign |beta|.
inline FinslerMetric randers_metric(const RandersData& r, Provenance prov = Provenance::RandersComposed) {
  FinslerMetric m;
  m.n = r.n;
  m.provenance = prov;
  m.domain = [r](const Vec& z) { return r.contains(z); };
  m.F = [r](const Vec& z, const Vec& eta) { return r.F(z, eta); };
  m.F2_grad_bar = [r](const Vec& z, const Vec& eta) -> Vec {
    const Mat a = r.a.eval(z);
    const Vec b = r.b.eval(z);
    const Vec l = a.transpose() * eta;
    const double al = hermitian_norm(a, eta);
    const cplx be = b.transpose() * eta;
    const double mb = std::abs(be);
    const double F = al + r.sign * mb;
    Vec g = (F / al) * l;
    if (mb > 0.0) g += r.sign * (F / mb) * be * b.conjugate();
    return g;
  };
  return m;
}

// Metric g = h / eps for W == 0 (eps = f^2) or cos(phi) == 0.
inline MatrixField conformal_form(const ZermeloStructure& s) {
  MatrixField g;
  g.dim = s.n;
  g.domain = [s](const Vec& z) { return s.contains(z); };
  g.eval = [s](const Vec& z) -> Mat {
    const auto p = s.at(z);
    return Mat(p.h / p.eps);
  };
  return g;
}

// The time-optimal metric of a navigation structure, evaluated through solve_forward.
inline FinslerMetric forward_metric(const ZermeloStructure& s) {
  const auto kind = classify_solution(s).kind;
  FinslerMetric m;
  if (kind == SolutionKind::ConformalHermitian) {
    m = hermitian_metric(conformal_form(s), Provenance::Conformal);
  } else {
    m = randers_metric(build_randers_data(s), Provenance::ForwardSolution);
  }
  m.F = [s](const Vec& z, const Vec& eta) { return solve_forward(s, z, eta); };
  m.domain = [s](const Vec& z) { return s.contains(z); };
  return m;
}

// dF^2/d etabar^m, closed form when available.
inline Vec F2_grad_bar(const FinslerMetric& m, const Vec& z, const Vec& eta) {
  if (m.F2_grad_bar) return m.F2_grad_bar(z, eta);
  const auto F2 = [&](const Vec& e) {
    const double f = m.F(z, e);
    return f * f;
  };
  return wirtinger_gradient(F2, eta, true, DiffOptions::vertical(max_abs(eta)));
}

// dF^2/d eta^m = conj(dF^2/d etabar^m) since F^2 is real.
inline Vec F2_grad(const FinslerMetric& m, const Vec& z, const Vec& eta) {
  return F2_grad_bar(m, z, eta).conjugate();
}

struct FundamentalTensor {
  Mat g;
  Vec z, eta;
  double min_eigenvalue = 0.0;
  bool positive_definite = false;  // false signals a convexity failure
};

namespace detail {

// g(xi, xibar) = (1/4) Laplacian_t F^2(eta + t xi), 4th-order five-point stencil per axis.
inline double directional_form(const FinslerMetric& m, const Vec& z, const Vec& eta, const Vec& xi,
                               double h) {
  const auto F2 = [&](const Vec& e) {
    const double f = m.F(z, e);
    return f * f;
  };
  const double c = F2(eta);
  double lap = 0.0;
  for (const cplx dir : {cplx(1.0, 0.0), I}) {
    const Vec d = dir * xi;
    const double p1 = F2(eta + h * d), m1 = F2(eta - h * d);
    const double p2 = F2(eta + 2.0 * h * d), m2 = F2(eta - 2.0 * h * d);
    lap += (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
  }
  return 0.25 * lap;
}

}  // namespace detail

inline FundamentalTensor fundamental_tensor(const FinslerMetric& m, const Vec& z, const Vec& eta) {
  if (eta.size() != m.n) throw ValidationError("direction dimension does not match metric");
  if (!all_finite(eta) || eta.norm() == 0.0)
    throw ZeroDirectionError("the fundamental tensor is undefined at eta = 0");
  if (!m.contains(z)) throw DomainError("point " + format_point(z) + " outside the metric domain");
  FundamentalTensor ft;
  ft.z = z;
  ft.eta = eta;
  const int n = m.n;
  if (m.F2_grad_bar) {
    // g_{i jbar} = d/d eta^i (dF^2/d etabar^j)
    const Mat J = wirtinger_jacobian([&](const Vec& e) { return Vec(m.F2_grad_bar(z, e)); }, eta,
                                     false, DiffOptions::vertical(max_abs(eta)));
    ft.g = symmetrize(J.transpose());
  } else {
    const double h = 2e-3 * eta.norm();
    ft.g = Mat::Zero(n, n);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) {
      Vec e = Vec::Zero(n);
      e(i) = 1.0;
      diag[i] = detail::directional_form(m, z, eta, e, h);
      ft.g(i, i) = diag[i];
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vec e1 = Vec::Zero(n), e2 = Vec::Zero(n);
        e1(i) = 1.0;
        e1(j) = 1.0;
        e2(i) = 1.0;
        e2(j) = I;
        const double q1 = detail::directional_form(m, z, eta, e1 / std::sqrt(2.0), h) * 2.0;
        const double q2 = detail::directional_form(m, z, eta, e2 / std::sqrt(2.0), h) * 2.0;
        const cplx gij(0.5 * (q1 - diag[i] - diag[j]), 0.5 * (q2 - diag[i] - diag[j]));
        ft.g(i, j) = gij;
        ft.g(j, i) = std::conj(gij);
      }
  }
  ft.min_eigenvalue = hermitian_eigenvalues(ft.g)(0);
  ft.positive_definite = ft.min_eigenvalue > 0.0;
  return ft;
}

struct FinslerSample {
  Vec z, eta;
};

struct FinslerReport {
  bool homogeneity = true, positivity = true, convexity = true, euler = true;
  double homogeneity_defect = 0.0;  // max |F(z, l eta) - |l| F(z, eta)| / F(z, eta)
  double positivity_defect = 0.0;   // max(|F(z,0)|, -min F over eta != 0)
  double min_eigenvalue = 0.0;      // smallest eigenvalue of g over samples
  double euler_defect = 0.0;        // max |g eta etabar - F^2| / F^2
  int samples = 0;

  bool all_pass() const { return homogeneity && positivity && convexity && euler; }
};

inline FinslerReport verify_finsler_conditions(const FinslerMetric& m,
                                               const std::vector<FinslerSample>& samples) {
  if (samples.empty()) throw ValidationError("sample list is empty");
  static const cplx lambdas[] = {cplx(-1.0, 0.0), cplx(0.0, 1.0), cplx(2.5, -1.5), cplx(0.3, 0.7),
                                 cplx(0.0, -1e-3)};
  FinslerReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const double f = m(s.z, s.eta);
    rep.positivity_defect = std::max(rep.positivity_defect, std::abs(m(s.z, Vec::Zero(m.n))));
    if (!(f > 0.0)) rep.positivity_defect = std::max(rep.positivity_defect, std::max(-f, 1e-300));
    for (const cplx l : lambdas) {
      const double fl = m(s.z, l * s.eta);
      rep.homogeneity_defect = std::max(rep.homogeneity_defect, std::abs(fl - std::abs(l) * f) /
                                                                    (std::abs(l) * f));
    }
    const auto ft = fundamental_tensor(m, s.z, s.eta);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, ft.min_eigenvalue);
    rep.euler_defect =
        std::max(rep.euler_defect, std::abs(quad(ft.g, s.eta, s.eta).real() - f * f) / (f * f));
    ++rep.samples;
  }
  rep.homogeneity = rep.homogeneity_defect <= 1e-8;
  rep.positivity = rep.positivity_defect == 0.0;
  rep.convexity = rep.min_eigenvalue > 0.0;
  rep.euler = rep.euler_defect <= 1e-6;
  return rep;
}

inline Quadrature path_length_detailed(const FinslerMetric& m, const GeodesicPath& path) {
  if (path.size() < 2 || path.points.size() != path.size() || path.velocities.size() != path.size())
    throw EmptyPathError("path needs at least two samples with velocities");
  std::vector<double> f(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) f[k] = m(path.points[k], path.velocities[k]);
  return integrate_samples(path.times, f);
}

inline double path_length(const FinslerMetric& m, const GeodesicPath& path) {
  return path_length_detailed(m, path).value;
}

}  // namespace znav
