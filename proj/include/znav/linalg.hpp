#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "errors.hpp"

namespace znav {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr cplx I{0.0, 1.0};

// Matrix convention: m(i, j) = g_{i jbar}. Quadratic forms are x^T m conj(y).
inline cplx quad(const Mat& m, const Vec& x, const Vec& y) {
  return x.transpose() * m * y.conjugate();
}

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

inline bool is_hermitian(const Mat& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

// Eigenvalues of a Hermitian matrix, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const Mat& m) {
  const Mat s = symmetrize(m);
  if (s.rows() == 1) return Eigen::VectorXd::Constant(1, s(0, 0).real());
  if (s.rows() == 2) {
    const double a = s(0, 0).real(), d = s(1, 1).real();
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(s(0, 1)));
    Eigen::VectorXd ev(2);
    ev << 0.5 * (a + d) - disc, 0.5 * (a + d) + disc;
    return ev;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline bool is_positive_definite(const Mat& m) {
  return hermitian_eigenvalues(m)(0) > 0.0;
}

// Inverse of a positive-definite Hermitian matrix: m * result = identity.
inline Mat hermitian_inverse(const Mat& m) {
  const Eigen::Index n = m.rows();
  if (n == 0 || m.cols() != n) throw SingularError("matrix is empty or not square");
  const Eigen::VectorXd ev = hermitian_eigenvalues(m);
  const double hi = std::abs(ev(n - 1));
  if (!(ev(0) >= 1e-12 * hi) || hi == 0.0 || !std::isfinite(hi))
    throw SingularError("smallest eigenvalue " + std::to_string(ev(0)) + " vs largest " +
                        std::to_string(ev(n - 1)));
  if (n == 1) return Mat::Constant(1, 1, 1.0 / m(0, 0).real());
  if (n == 2) {
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const cplx b = m(0, 1), c = m(1, 0);
    const double det = a * d - (b * c).real();
    Mat r(2, 2);
    r << d / det, -b / det, -c / det, a / det;
    return r;
  }
  Eigen::LDLT<Mat> ldlt(symmetrize(m));
  return ldlt.solve(Mat::Identity(n, n));
}

// Solve m^T x = rhs for Hermitian positive-definite m (m^T = conj(m)).
inline Mat solve_transposed(const Mat& m, const Mat& rhs) {
  return hermitian_inverse(m).transpose() * rhs;
}
inline Vec solve_transposed(const Mat& m, const Vec& rhs) {
  return hermitian_inverse(m).transpose() * rhs;
}

inline double hermitian_norm(const Mat& m, const Vec& v) {
  if (m.rows() != v.size()) throw ValidationError("dimension mismatch in hermitian_norm");
  const double q = quad(m, v, v).real();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff() * v.squaredNorm());
  if (q < -1e-12 * scale) throw NegativeFormError("quadratic form is " + std::to_string(q));
  return std::sqrt(std::max(q, 0.0));
}

inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace znav
