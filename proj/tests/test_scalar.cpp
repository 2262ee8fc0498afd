#include <gtest/gtest.h>

#include "corank2/dual.hpp"
#include "corank2/eval.hpp"
#include "corank2/parse.hpp"
#include "support.hpp"

using namespace corank2;
using corank2::testing::at_x2;

namespace {

const Box kBand = Box::cube(1.0).with(Coordinate::x2, -0.99, 0.99);

Expr d_x2(const Expr& e) { return differentiate(e, Coordinate::x2); }

const Expr& delta_expr() {
  static const Expr e = parse_expr("sqrt(3 - 2*x2^2 - x2^4)");
  return e;
}

}  // namespace

TEST(Parse, PolynomialSmoke) {
  Expr e = parse_expr("x2^2 + 1");
  EXPECT_DOUBLE_EQ(eval_real(e, at_x2(3.0)), 10.0);
  EXPECT_DOUBLE_EQ(eval_real(e, at_x2(0.0)), 1.0);
}

TEST(Parse, FatnessPotential) {
  Expr a = parse_expr("-(x2^3)/3 - x2 - 2*x1");
  Point p{0.7, -0.4, 0, 0, 0, 0};
  EXPECT_NEAR(eval_real(a, p), 0.064 / 3 + 0.4 - 1.4, 1e-15);
}

TEST(Parse, UnknownIdentifierIsAnError) {
  try {
    parse_expr("atan(q)");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("q"), std::string::npos);
    EXPECT_EQ(e.position(), 5u);
  }
}

TEST(Parse, SyntaxErrorsCarryPosition) {
  EXPECT_THROW(parse_expr("x1 +"), ParseError);
  EXPECT_THROW(parse_expr("(x1"), ParseError);
  EXPECT_THROW(parse_expr("x1 ** 2"), ParseError);
  EXPECT_THROW(parse_expr("x1^0.5"), ParseError);
}

TEST(Parse, WhitespaceInsensitiveAndPrecedence) {
  Point p{1.5, -2.0, 0.25, 3.0, 0, 0};
  EXPECT_DOUBLE_EQ(eval_real(parse_expr("x1+x2*y2^2"), p), 1.5 - 18.0);
  EXPECT_DOUBLE_EQ(eval_real(parse_expr("  x1 +  x2 * y2 ^ 2 "), p), 1.5 - 18.0);
  EXPECT_DOUBLE_EQ(eval_real(parse_expr("-x2^2"), p), -4.0);
  EXPECT_DOUBLE_EQ(eval_real(parse_expr("x1/x2/y1"), p), 1.5 / -2.0 / 0.25);
  EXPECT_DOUBLE_EQ(eval_real(parse_expr("x2^-2"), p), 0.25);
}

TEST(Parse, ImaginaryLiteral) {
  auto v = eval(parse_expr("2 + 3i"), Point{}, EvalMode::Complex);
  EXPECT_DOUBLE_EQ(v.real(), 2.0);
  EXPECT_DOUBLE_EQ(v.imag(), 3.0);
}

TEST(Differentiate, PotentialAlongX2) {
  Expr a = parse_expr("-(x2^3)/3 - x2 - 2*x1");
  EXPECT_TRUE(expr_equal_sampled(d_x2(a), parse_expr("-x2^2 - 1"), Box::cube(2.0), 50, 1e-12));
}

TEST(Differentiate, ConstantIsZero) {
  Expr d = differentiate(Expr(7.0), Coordinate::x1);
  EXPECT_TRUE(d.is_zero());
}

TEST(Differentiate, TwoOverDelta) {
  Expr lhs = d_x2(Expr(2.0) / delta_expr());
  QuasiRandomSampler s(kBand, 11);
  for (int i = 0; i < 20; ++i) {
    Point p = s.next();
    double x = p[1], dl = corank2::testing::delta(x);
    EXPECT_NEAR(eval_real(lhs, p), 4.0 * x * (1.0 + x * x) / (dl * dl * dl), 1e-12);
  }
}

TEST(Eval, Values) {
  EXPECT_DOUBLE_EQ(eval_real(parse_expr("x2^2 + 1"), at_x2(0.0)), 1.0);
  EXPECT_NEAR(eval_real(delta_expr(), at_x2(0.0)), 1.7320508075688772, 1e-15);
  Expr t = parse_expr("(x2^2 + 1)/2 + 1i*sqrt(3 - 2*x2^2 - x2^4)/2");
  auto v = eval(t, at_x2(0.0));
  EXPECT_NEAR(v.real(), 0.5, 1e-15);
  EXPECT_NEAR(v.imag(), std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(Eval, SingularitiesAreReported) {
  EXPECT_THROW(eval(parse_expr("1/x1"), Point{}), SingularEvaluation);
  try {
    eval(delta_expr(), at_x2(1.5));
    FAIL() << "expected SingularEvaluation";
  } catch (const SingularEvaluation& e) {
    EXPECT_NE(e.subexpression().find("sqrt"), std::string::npos);
  }
  auto v = eval(delta_expr(), at_x2(1.5), EvalMode::Complex);
  EXPECT_NEAR(v.real(), 0.0, 1e-15);
  EXPECT_NEAR(v.imag(), std::sqrt(1.5 * 1.5 * 1.5 * 1.5 + 2 * 2.25 - 3.0), 1e-14);
}

TEST(SampledEquality, QuadraticSatisfiedByRoot) {
  Expr t = parse_expr("(x2^2 + 1)/2 + 1i*sqrt(3 - 2*x2^2 - x2^4)/2");
  Expr c = parse_expr("x2^2 + 1");
  EXPECT_TRUE(expr_equal_sampled(t * t - t * c + Expr(1.0), Expr(0.0), kBand, 100, 1e-12));
}

TEST(SampledEquality, DetectsShift) {
  Expr x2 = var(Coordinate::x2);
  EXPECT_FALSE(expr_equal_sampled(x2, x2 + Expr(1e-3), Box::cube(1.0), 10, 1e-9));
}

TEST(SampledEquality, DeltaDerivativeRelation) {
  Expr c = parse_expr("x2^2 + 1");
  Expr lhs = d_x2(Expr(2.0) / delta_expr());
  Expr rhs = c / Expr(2.0) * d_x2(c / delta_expr());
  EXPECT_TRUE(expr_equal_sampled(lhs, rhs, kBand, 100, 1e-10));
}

TEST(SampledEquality, RejectsZeroSamples) {
  EXPECT_THROW(expr_equal_sampled(Expr(1.0), Expr(1.0), Box::cube(1.0), 0, 1e-9), std::invalid_argument);
}

TEST(SampledEquality, RetryBudgetExhausted) {
  EXPECT_THROW(expr_equal_sampled(delta_expr(), Expr(0.0), Box::cube(1.0).with(Coordinate::x2, 1.5, 2.0), 5, 1e-9),
               SingularEvaluation);
}

TEST(Simplify, LocalRules) {
  Expr x = var(Coordinate::x1);
  EXPECT_TRUE((Expr(0.0) * x).is_zero());
  EXPECT_EQ(to_string(Expr(1.0) * x), to_string(x));
  Expr folded = Expr(2.0) * Expr(3.0) + Expr(1.0);
  ASSERT_TRUE(folded.is_const());
  EXPECT_DOUBLE_EQ(folded.const_value().real(), 7.0);
}

TEST(Dual, ChainRule) {
  Dual<double> x(0.3, 1.0);
  Dual<double> y = sin(x) * exp(x);
  EXPECT_NEAR(y.d, std::cos(0.3) * std::exp(0.3) + std::sin(0.3) * std::exp(0.3), 1e-15);
  Dual<Dual<double>> z(Dual<double>(0.3, 1.0), Dual<double>(1.0, 0.0));
  auto w = z * z * z;
  EXPECT_NEAR(w.d.d, 6.0 * 0.3, 1e-15);
}

TEST(Dual, TapeMatchesSymbolicDerivative) {
  Expr e = parse_expr("atan(x1*x2) + sqrt(2 + sin(y1)) / (1 + z1^2)");
  Point p{0.2, -0.7, 0.4, 0.0, 0.9, 0.0};
  for (int k = 0; k < kDim; ++k) {
    Coords<Dual<double>> q;
    for (int j = 0; j < kDim; ++j) q[j] = Dual<double>(p[j], j == k ? 1.0 : 0.0);
    double ad = eval_at(e, q).re.d;
    double sym = eval_real(differentiate(e, coordinate_from_index(k)), p);
    EXPECT_NEAR(ad, sym, 1e-14) << "coordinate " << k;
  }
}
