#include "common.hpp"

using namespace znav;
using namespace znav::test;

TEST(Navigation, NoWindEuclideanIsNorm) {
  const ZermeloStructure s = flat_structure(v2(0.0, 0.0), 1.0, -1.0);
  EXPECT_DOUBLE_EQ(solve_forward(s, v2(0.2, 0.1), v2(1.0, 0.0)), 1.0);
}

TEST(Navigation, ExampleFourIsTwiceHermitian) {
  const Scenario sc = builtin("hartogs_ex4");
  std::mt19937_64 rng(3);
  for (const auto& p : points_for(sc, 20, 1)) {
    const Vec eta = random_vec(rng, 2);
    const double nh = hermitian_norm(sc.structure.h.eval(p), eta);
    EXPECT_NEAR(solve_forward(sc.structure, p, eta), 2.0 * nh, 1e-12 * nh);
  }
}

TEST(Navigation, ExampleOneMatchesComponentFormulas) {
  const Scenario sc = builtin("hartogs_ex1");
  const Vec p = v2(0.5, 0.2), eta = v2(0.0, 1.0);
  const double alpha = std::sqrt(quad(hartogs_a_closed(p), eta, eta).real());
  const double beta = std::abs(cplx(hartogs_b_closed(p).transpose() * eta));
  EXPECT_NEAR(alpha, std::sqrt(8.0 * 0.25) / 0.21, 1e-13);
  EXPECT_NEAR(beta, 1.0 / 0.21, 1e-13);
  EXPECT_NEAR(solve_forward(sc.structure, p, eta), alpha + beta, 1e-12);
  const RandersData r = build_randers_data(sc.structure);
  EXPECT_NEAR(r.alpha(p, eta), alpha, 1e-12);
  EXPECT_NEAR(std::abs(r.beta(p, eta)), beta, 1e-12);
}

TEST(Navigation, ExampleOneRandersDataMatchesClosedForms) {
  const Scenario sc = builtin("hartogs_ex1");
  const RandersData r = build_randers_data(sc.structure);
  for (const auto& p : points_for(sc, 30, 2)) {
    const Mat a = hartogs_a_closed(p);
    EXPECT_LE(max_diff(r.a.eval(p), a), 1e-10 * a.cwiseAbs().maxCoeff());
    EXPECT_LE(max_diff(r.b.eval(p), hartogs_b_closed(p)), 1e-10 * hartogs_b_closed(p).cwiseAbs().maxCoeff());
    EXPECT_NEAR(r.at(p).b_norm2, 0.5, 1e-10);
    // contravariant b: b^1 = 0, b^2 = -D/(4z)
    const double D = std::norm(p(0)) - std::norm(p(1));
    EXPECT_LE(max_diff(r.at(p).b_up, v2(0.0, -D / (4.0 * p(0)))), 1e-10);
  }
}

TEST(Navigation, ExampleOneEpsilon) {
  const Scenario sc = builtin("hartogs_ex1");
  // eps = |z|^2/2 - |z|^2/4
  EXPECT_NEAR(sc.structure.eps(v2(0.5, 0.2)), 0.0625, 1e-15);
  const Scenario s3 = builtin("hartogs_ex3");
  for (const auto& p : points_for(s3, 10, 4)) EXPECT_NEAR(s3.structure.eps(p), 0.25, 1e-14);
}

TEST(Navigation, ClassifySolution) {
  EXPECT_EQ(classify_solution(flat_structure(v2(0.0, 0.0), 0.5, -1.0)).kind, SolutionKind::ConformalHermitian);
  EXPECT_EQ(classify_solution(flat_structure(v2(0.2, 0.0), 0.5, 0.0)).kind, SolutionKind::ConformalHermitian);
  EXPECT_EQ(classify_solution(flat_structure(v2(0.2, 0.0), 0.5, -1.0)).kind, SolutionKind::Randers);
  const auto c = classify_solution(flat_structure(v2(0.2, 0.0), 0.5, 0.5));
  EXPECT_EQ(c.kind, SolutionKind::AlphaBetaNonRanders);
  EXPECT_TRUE(c.warning);
  EXPECT_STREQ(kind_name(SolutionKind::Randers), "Randers");
}

TEST(Navigation, RightAngleGivesConformalData) {
  const Vec W = v2(0.3, cplx(0.0, 0.2));
  const ZermeloStructure s = flat_structure(W, 0.81, 0.0);
  const RandersData r = build_randers_data(s);
  const Vec z = v2(0.1, 0.1);
  EXPECT_LE(r.b.eval(z).norm(), 1e-15);
  EXPECT_LE(max_diff(r.a.eval(z), Mat(Mat::Identity(2, 2) / s.eps(z))), 1e-14);
}

TEST(Navigation, BNormClosedFormAcrossAngles) {
  const Vec W = v2(0.3, cplx(0.1, 0.2));
  for (double c : {-1.0, -0.8, -0.3, 0.0, 0.4, 0.9}) {
    const ZermeloStructure s = flat_structure(W, 0.6, c);
    const Vec z = v2(0.0, 0.0);
    EXPECT_NEAR(build_randers_data(s).at(z).b_norm2, b_norm2_closed_form(s, z), 1e-13) << c;
  }
}

TEST(Navigation, ForwardSolutionIsUnitResultant) {
  // with h(v, Wbar) negative real, u = v/F - W has ||u||_h = f
  std::mt19937_64 rng(9);
  const Scenario sc = builtin("hartogs_ex1");
  for (const auto& p : points_for(sc, 20, 5)) {
    Vec eta = random_vec(rng, 2);
    const auto P = sc.structure.at(p);
    const cplx q = quad(P.h, eta, P.W);
    eta *= -std::conj(q) / std::abs(q);
    const double F = solve_forward(sc.structure, p, eta);
    const Vec u = eta / F - P.W;
    EXPECT_NEAR(quad(P.h, u, u).real(), P.f2, 1e-10 * P.f2);
    EXPECT_NEAR(orthogonality_angle(sc.structure, p, eta), std::numbers::pi, 1e-12);
  }
}

TEST(Navigation, InverseRecoversExampleOne) {
  const Scenario sc = builtin("hartogs_ex1");
  RandersData r;
  r.n = 2;
  r.domain = detail::in_hartogs;
  r.a = {2, hartogs_a_closed, detail::in_hartogs};
  r.b = {2, hartogs_b_closed, detail::in_hartogs};
  r.f2 = {2, [](const Vec& p) { return cplx(0.5 * std::norm(p(0))); }, detail::in_hartogs};
  const ZermeloStructure back = solve_inverse(r);
  for (const auto& p : points_for(sc, 30, 6)) {
    const Mat h = sc.structure.h.eval(p);
    EXPECT_LE(max_diff(back.h.eval(p), h), 1e-10 * h.cwiseAbs().maxCoeff());
    const double D = std::norm(p(0)) - std::norm(p(1));
    EXPECT_LE(max_diff(back.wind.eval(p), v2(0.0, -D / (2.0 * p(0)))), 1e-10);
  }
}

TEST(Navigation, InverseRoundTripRandom) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 3;
    const Mat h = random_pd(rng, n);
    Vec W = random_vec(rng, n);
    const double f2 = u(rng);
    W *= 0.9 * std::sqrt(f2) / hermitian_norm(h, W) * u(rng);
    const ZermeloStructure s = flat_structure(W, f2, -1.0, h);
    const ZermeloStructure back = solve_inverse(build_randers_data(s));
    const Vec z = Vec::Zero(n);
    EXPECT_LE(max_diff(back.h.eval(z), h), 1e-9 * h.cwiseAbs().maxCoeff());
    EXPECT_LE(max_diff(back.wind.eval(z), W), 1e-9);
    EXPECT_NEAR(back.speed2.eval(z).real(), f2, 1e-12);
  }
}

TEST(Navigation, InverseRejectsUnitB) {
  RandersData r;
  r.n = 2;
  r.a = constant_metric(Mat::Identity(2, 2));
  r.b = {2, [](const Vec&) { return v2(1.0, 0.0); }, {}};
  r.f2 = {2, [](const Vec&) { return cplx(0.5); }, {}};
  EXPECT_THROW(solve_inverse(r).h.eval(v2(0.0, 0.0)), ConvexityError);
}

TEST(Navigation, OrthogonalityAngle) {
  const ZermeloStructure s = flat_structure(v2(1.0, 0.0), 1.0, -1.0);
  // wind of size 1 against f = 1 is not mild; use a weaker ship only for structure validation elsewhere
  ZermeloStructure mild = flat_structure(v2(0.5, 0.0), 1.0, -1.0);
  const Vec z = v2(0.0, 0.0);
  EXPECT_NEAR(std::cos(orthogonality_angle(mild, z, v2(0.0, 1.0))), 0.0, 1e-15);
  EXPECT_NEAR(orthogonality_angle(mild, z, v2(-1.0, 0.0)), std::numbers::pi, 1e-15);
  EXPECT_THROW(orthogonality_angle(s, z, v2(0.0, 1.0)), WindTooStrongError);
  EXPECT_THROW(orthogonality_angle(mild, z, v2(0.0, 0.0)), ZeroDirectionError);
  EXPECT_THROW(orthogonality_angle(flat_structure(v2(0.0, 0.0), 1.0, -1.0), z, v2(0.0, 1.0)), ZeroWindError);
}

TEST(Navigation, StrongWindThrows) {
  EXPECT_THROW(solve_forward(flat_structure(v2(0.9, 0.5), 0.81, -1.0), v2(0.0, 0.0), v2(1.0, 0.0)),
               WindTooStrongError);
}

TEST(Navigation, FastShipRejected) {
  EXPECT_THROW(solve_forward(flat_structure(v2(0.1, 0.0), 1.5, -1.0), v2(0.0, 0.0), v2(1.0, 0.0)), ValidationError);
}

TEST(Navigation, OutsideDomainThrows) {
  const Scenario sc = builtin("hartogs_ex1");
  EXPECT_THROW(solve_forward(sc.structure, v2(0.2, 0.5), v2(1.0, 0.0)), DomainError);
}

TEST(Navigation, AlphaMinusBetaConvexityFailure) {
  // cos phi > 0 gives F = alpha - |beta|; a strong enough wind breaks convexity
  const ZermeloStructure s = flat_structure(v2(0.9, 0.0), 1.0, 1.0);
  const FinslerMetric m = forward_metric(s);
  std::mt19937_64 rng(10);
  bool failed = false;
  for (int k = 0; k < 50 && !failed; ++k) failed = !fundamental_tensor(m, v2(0.0, 0.0), random_vec(rng, 2)).positive_definite;
  EXPECT_TRUE(failed);
  EXPECT_TRUE(classify_solution(s).warning);
}
