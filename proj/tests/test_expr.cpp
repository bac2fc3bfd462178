#include "common.hpp"

using namespace znav;
using namespace znav::test;
using namespace znav::expr;

TEST(Expr, HartogsWindComponent) {
  const FieldExpr e = parse_field("-(abs2(z1)-abs2(z2))/(2*z1)");
  const cplx v = eval_field(e, v2(0.5, 0.2));
  EXPECT_NEAR(v.real(), -0.21, 1e-15);
  EXPECT_EQ(v.imag(), 0.0);
  EXPECT_EQ(e.max_var, 1);
}

TEST(Expr, ZeroField) {
  const FieldExpr e = parse_field("0");
  EXPECT_EQ(eval_field(e, v2(0.3, 0.7)), cplx(0.0));
  EXPECT_EQ(e.max_var, -1);
}

TEST(Expr, TrailingOperatorReportsColumn) {
  try {
    parse_field("z1*");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("column 4"), std::string::npos) << e.what();
  }
}

TEST(Expr, ParseErrorListsExpectedTokens) {
  try {
    parse_field("(z1 + 2");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("')'"), std::string::npos) << m;
    EXPECT_NE(m.find("line 1"), std::string::npos) << m;
  }
  try {
    parse_field("z1 +\n  foo(z1)");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2, column 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_field(""), ParseError);
  EXPECT_THROW(parse_field("   "), ParseError);
  EXPECT_THROW(parse_field("z1^1.5"), ParseError);
  EXPECT_THROW(parse_field("z3", 2), ParseError);
}

TEST(Expr, ElementaryEvaluations) {
  const Vec p = (Vec(1) << cplx(1.0, 2.0)).finished();
  EXPECT_EQ(eval_field(parse_field("conj(z1)"), p), cplx(1.0, -2.0));
  const Vec q = (Vec(1) << cplx(3.0, 4.0)).finished();
  EXPECT_EQ(eval_field(parse_field("abs2(z1)"), q), cplx(25.0));
  EXPECT_EQ(eval_field(parse_field("abs(z1)"), q), cplx(5.0));
  EXPECT_EQ(eval_field(parse_field("re(z1) + 10*im(z1)"), q), cplx(43.0));
  EXPECT_EQ(eval_field(parse_field("z1^-1"), q), 1.0 / cplx(3.0, 4.0));
  EXPECT_EQ(eval_field(parse_field("2.5i"), q), cplx(0.0, 2.5));
  EXPECT_EQ(eval_field(parse_field("-2^2"), q), cplx(-4.0));
  EXPECT_EQ(eval_field(parse_field("1 - 2 - 3"), q), cplx(-4.0));
  EXPECT_EQ(eval_field(parse_field("12 / 3 / 2"), q), cplx(2.0));
  EXPECT_EQ(eval_field(parse_field("1 + 2 * 3"), q), cplx(7.0));
}

TEST(Expr, HartogsPotential) {
  const FieldExpr e = parse_field("log(1/((1-abs2(z1))*(abs2(z1)-abs2(z2))))");
  const cplx v = eval_field(e, v2(0.5, 0.2));
  EXPECT_NEAR(v.real(), std::log(1.0 / 0.1575), 1e-14);
  EXPECT_NEAR(v.imag(), 0.0, 1e-15);
}

TEST(Expr, DomainGuards) {
  const Vec p = v2(0.0, 1.0);
  EXPECT_THROW(eval_field(parse_field("1/z1"), p), DomainError);
  EXPECT_THROW(eval_field(parse_field("z1^-2"), p), DomainError);
  EXPECT_THROW(eval_field(parse_field("log(z1)"), p), DomainError);
  EXPECT_THROW(eval_field(parse_field("log(-z2)"), p), DomainError);
  EXPECT_THROW(eval_field(parse_field("sqrt(-z2)"), p), DomainError);
  EXPECT_NO_THROW(eval_field(parse_field("sqrt(z1)"), p));
  EXPECT_THROW(eval_field(parse_field("z3"), p), DomainError);
}

TEST(Expr, PrintRoundTrip) {
  const char* srcs[] = {"-(abs2(z1)-abs2(z2))/(2*z1)",
                        "log(1/((1-abs2(z1))*(abs2(z1)-abs2(z2))))",
                        "1 - (2 - z1)",
                        "(z1 + z2)^3 * conj(z2)^-1",
                        "-z1^2",
                        "(-z1)^2",
                        "0.1 + 2.5i*exp(i*pi*re(z1))",
                        "sqrt(abs2(z1)/2) / (1 + 1e-3*z2)"};
  for (const char* s : srcs) {
    const FieldExpr e = parse_field(s);
    const std::string printed = print_field(e);
    const FieldExpr again = parse_field(printed);
    EXPECT_TRUE(same_ast(e, again)) << s << " -> " << printed;
    EXPECT_EQ(print_field(again), printed);
    const Vec z = v2(cplx(0.4, 0.1), cplx(-0.2, 0.3));
    EXPECT_EQ(eval_field(e, z), eval_field(again, z)) << s;
  }
}

TEST(Expr, EvaluationIsBitIdentical) {
  const FieldExpr e = parse_field("exp(z1)*log(2+z2)/sqrt(3+conj(z1)) + abs(z2)^5");
  const Vec z = v2(cplx(0.31, -0.17), cplx(0.05, 0.6));
  const cplx a = eval_field(e, z);
  for (int k = 0; k < 100; ++k) {
    const cplx b = eval_field(e, z);
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
  }
}

TEST(Expr, WirtingerOfParsedPolynomial) {
  const FieldExpr e = parse_field("z1^2*conj(z2) + 3*conj(z1)*z2^2 - 2i*abs2(z1)");
  const ScalarField f{2, [e](const Vec& z) { return eval_field(e, z); }, {}};
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const Vec z = random_vec(rng, 2, 0.6);
    const cplx a = z(0), b = z(1);
    const cplx want_d0 = 2.0 * a * std::conj(b) - 2.0 * I * std::conj(a);
    const cplx want_db0 = 3.0 * b * b - 2.0 * I * a;
    EXPECT_LE(std::abs(wirtinger_d(f, z, 0, false) - want_d0), 1e-6);
    EXPECT_LE(std::abs(wirtinger_d(f, z, 0, true) - want_db0), 1e-6);
  }
}
