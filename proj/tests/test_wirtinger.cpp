#include "common.hpp"

using namespace znav;
using namespace znav::test;

TEST(Wirtinger, CoordinateFunctionIsHolomorphic) {
  const ScalarField f{1, [](const Vec& z) { return z(0); }, {}};
  const Vec z = (Vec(1) << cplx(0.3, 0.1)).finished();
  EXPECT_NEAR(std::abs(wirtinger_d(f, z, 0, false) - 1.0), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(wirtinger_d(f, z, 0, true)), 0.0, 1e-10);
}

TEST(Wirtinger, ModulusSquaredProductRule) {
  const ScalarField f{1, [](const Vec& z) { return cplx(std::norm(z(0))); }, {}};
  const Vec z = (Vec(1) << 0.5).finished();
  EXPECT_NEAR(std::abs(wirtinger_d(f, z, 0, false) - 0.5), 0.0, 1e-9);
}

TEST(Wirtinger, HartogsPotentialDerivative) {
  const ScalarField pot{2,
                        [](const Vec& p) {
                          const double a = std::norm(p(0)), b = std::norm(p(1));
                          return cplx(std::log(1.0 / ((1.0 - a) * (a - b))));
                        },
                        {}};
  // zbar/(1-|z|^2) - zbar/(|z|^2-|w|^2) at (0.5, 0.2)
  const cplx d = wirtinger_d(pot, v2(0.5, 0.2), 0, false);
  EXPECT_NEAR(d.real(), -1.7142857142857142, 1e-8);
  EXPECT_NEAR(d.imag(), 0.0, 1e-8);
}

TEST(Wirtinger, PolynomialMatchesSymbolic) {
  std::mt19937_64 rng(5);
  const auto f = [](const Vec& z) { return z(0) * z(0) * std::conj(z(1)) + 3.0 * std::conj(z(0)) * z(1) * z(1); };
  const ScalarField field{2, f, {}};
  for (int k = 0; k < 20; ++k) {
    const Vec z = random_vec(rng, 2, 0.7);
    const cplx a = z(0), b = z(1);
    const cplx d0 = 2.0 * a * std::conj(b), d0b = 3.0 * b * b;
    const cplx d1 = 6.0 * std::conj(a) * b, d1b = a * a;
    EXPECT_LE(std::abs(wirtinger_d(field, z, 0, false) - d0), 1e-6 * std::max(1.0, std::abs(d0)));
    EXPECT_LE(std::abs(wirtinger_d(field, z, 0, true) - d0b), 1e-6 * std::max(1.0, std::abs(d0b)));
    EXPECT_LE(std::abs(wirtinger_d(field, z, 1, false) - d1), 1e-6 * std::max(1.0, std::abs(d1)));
    EXPECT_LE(std::abs(wirtinger_d(field, z, 1, true) - d1b), 1e-6 * std::max(1.0, std::abs(d1b)));
  }
}

TEST(Wirtinger, RealFieldConjugateSymmetry) {
  std::mt19937_64 rng(6);
  const ScalarField f{2, [](const Vec& z) { return cplx(std::norm(z(0)) * std::exp(z(1).real()) + std::norm(z(1))); }, {}};
  for (int k = 0; k < 20; ++k) {
    const Vec z = random_vec(rng, 2, 0.5);
    for (int i = 0; i < 2; ++i)
      EXPECT_LE(std::abs(wirtinger_d(f, z, i, true) - std::conj(wirtinger_d(f, z, i, false))), 1e-10);
  }
}

TEST(Wirtinger, StencilLeavingDomainThrows) {
  const ScalarField f{1, [](const Vec& z) { return z(0); }, [](const Vec& z) { return z(0).real() > 0.0; }};
  const Vec z = (Vec(1) << 1e-7).finished();
  EXPECT_THROW(wirtinger_d(f, z, 0, false), DomainError);
  const Vec outside = (Vec(1) << -1.0).finished();
  EXPECT_THROW(wirtinger_d(f, outside, 0, false), DomainError);
}

TEST(Wirtinger, StepUnderflowThrows) {
  const ScalarField f{1, [](const Vec& z) { return z(0); }, {}};
  const Vec z = (Vec(1) << 1.0).finished();
  EXPECT_THROW(wirtinger_d(f, z, 0, false, DiffOptions{1e-30, 2, 1.0}), StepError);
}

TEST(Wirtinger, FourthOrderStencilIsMoreAccurate) {
  // real-analytic, so the holomorphic error cancellation does not apply
  const auto f = [](const Vec& z) { return cplx(std::exp(3.0 * z(0).real())); };
  const Vec z = (Vec(1) << cplx(0.2, 0.1)).finished();
  const cplx exact = 1.5 * std::exp(3.0 * z(0).real());
  const DiffOptions coarse2{1e-2, 2, 0.0}, coarse4{1e-2, 4, 0.0};
  const double e2 = std::abs(wirtinger_pair(f, z, 0, coarse2).first - exact);
  const double e4 = std::abs(wirtinger_pair(f, z, 0, coarse4).first - exact);
  EXPECT_LT(e4, 1e-2 * e2);
}

TEST(Linalg, HermitianInverseExamples) {
  EXPECT_LE(max_diff(hermitian_inverse(Mat::Identity(2, 2)), Mat::Identity(2, 2)), 1e-15);
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  Mat want = Mat::Zero(2, 2);
  want(0, 0) = 0.5;
  want(1, 1) = 0.25;
  EXPECT_LE(max_diff(hermitian_inverse(d), want), 1e-15);
}

TEST(Linalg, HermitianInverseRoundTripUpToSix) {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 6; ++n)
    for (int k = 0; k < 10; ++k) {
      const Mat m = random_pd(rng, n);
      const Mat inv = hermitian_inverse(m);
      EXPECT_LE(max_diff(Mat(m * inv), Mat(Mat::Identity(n, n))), 1e-10);
      EXPECT_LE(max_diff(hermitian_inverse(inv), m), 1e-8 * m.cwiseAbs().maxCoeff());
    }
}

TEST(Linalg, SingularMatrixThrows) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-14;
  EXPECT_THROW(hermitian_inverse(m), SingularError);
}

TEST(Linalg, RandersInverseMatchesClosedForm) {
  const Scenario sc = builtin("hartogs_ex1");
  const Vec z = v2(0.5, 0.2);
  const RandersData r = build_randers_data(sc.structure);
  const auto p = sc.structure.at(z);
  const double c2 = 1.0;  // cos^2 phi, sin^2 phi = 0
  const Mat hinv = hermitian_inverse(p.h);
  // a^{jbar i} = eps (h^{jbar i} - cos^2/(f^2 - ||W||^2 sin^2) W^i conj(W^j)), stored at (j, i)
  const Mat want = p.eps * (hinv - (c2 / p.f2) * p.W.conjugate() * p.W.transpose());
  const Mat got = hermitian_inverse(hartogs_a_closed(z));
  EXPECT_LE(max_diff(got, want), 1e-12);
  EXPECT_LE(max_diff(r.at(z).a_inv, want), 1e-12);
}

TEST(Linalg, HermitianNormExamples) {
  EXPECT_DOUBLE_EQ(hermitian_norm(Mat::Identity(2, 2), v2(3.0, 4.0)), 5.0);
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 4.0;
  m(1, 1) = 1.0;
  EXPECT_DOUBLE_EQ(hermitian_norm(m, v2(1.0, 0.0)), 2.0);
  // sqrt(h_22) of the weighted Hartogs metric at (0.5, 0.2): |z|^2/(|z|^2-|w|^2) = 0.25/0.21
  const Mat h = builtin("hartogs_ex1").structure.h.eval(v2(0.5, 0.2));
  EXPECT_NEAR(hermitian_norm(h, v2(0.0, 1.0)), 0.25 / 0.21, 1e-14);
}

TEST(Linalg, HermitianNormHomogeneity) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const Mat m = random_pd(rng, 3);
    const Vec v = random_vec(rng, 3);
    const cplx l = random_vec(rng, 1)(0);
    EXPECT_NEAR(hermitian_norm(m, l * v), std::abs(l) * hermitian_norm(m, v), 1e-12 * hermitian_norm(m, l * v));
  }
}

TEST(Linalg, NegativeFormThrows) {
  Mat m = Mat::Identity(2, 2);
  m(1, 1) = -1.0;
  EXPECT_THROW(hermitian_norm(m, v2(0.0, 1.0)), NegativeFormError);
}
