#include <gtest/gtest.h>

#include "corank2/catalog.hpp"
#include "corank2/distribution.hpp"
#include "support.hpp"

using namespace corank2;
using corank2::testing::at_x2;
using corank2::testing::paper;

namespace {

Form one(const char* s) { return Form::parse_one_form(s); }

Framing paper_framing() {
  return {VectorField::parse("d/dx1 + y1*d/dz1 + y2*d/dz2"), VectorField::parse("d/dx2 + y2*d/dz1 + y1*d/dz2"),
          VectorField::parse("d/dy1 + (x2^3/3 + x2 + 2*x1)*d/dz1"), VectorField::parse("d/dy2")};
}

const char* kL1 = "dz1 - y1*dx1 - y2*dx2 - (x2^3/3 + x2 + 2*x1)*dy1";
const char* kL2 = "dz2 - y2*dx1 - y1*dx2";

VectorField dz(int i) { return VectorField::coordinate(i == 1 ? Coordinate::z1 : Coordinate::z2); }

}  // namespace

TEST(Build, HintedFramingAccepted) {
  Distribution d = build_distribution(one(kL1), one(kL2), paper_framing(), Box::cube(2.0));
  EXPECT_FALSE(d.has_reeb());
  EXPECT_EQ(d.framing()[3][index_of(Coordinate::y2)].const_value().real(), 1.0);
}

TEST(Build, CorankDeficient) {
  EXPECT_THROW(build_distribution(one("dz1"), one("dz1"), std::nullopt, Box::cube(1.0)), DistributionError);
}

TEST(Build, KappaFramingAccepted) {
  CatalogModel m = load_model("h_kappa", std::string("sin(y1)"));
  EXPECT_TRUE(m.distribution.has_reeb());
}

TEST(Build, HintMustBeAnnihilated) {
  Framing f = paper_framing();
  f[2] = VectorField::parse("d/dy1");
  EXPECT_THROW(build_distribution(one(kL1), one(kL2), f, Box::cube(1.0)), DistributionError);
}

TEST(Build, HintMustBeIndependent) {
  Framing f = paper_framing();
  f[3] = f[2];
  EXPECT_THROW(build_distribution(one(kL1), one(kL2), f, Box::cube(1.0)), DistributionError);
}

TEST(Build, AutoFramingAnnihilated) {
  Distribution d = build_distribution(one(kL1), one(kL2), std::nullopt, Box::cube(1.0));
  QuasiRandomSampler s(Box::cube(1.0), 3);
  for (int n = 0; n < 20; ++n) {
    FrameData<double> f = d.frame_at(s.next());
    EXPECT_LT(max_abs(f.lambda * f.framing), 1e-12);
    Matrix<double, 4, 4> g = transpose(f.framing) * f.framing;
    EXPECT_GT(determinant(g), 1e-10);
  }
}

TEST(QuotientProject, Examples) {
  const Distribution& d = paper();
  Point p{0.3, -0.2, 0.7, 0.1, 0.5, -0.4};
  QuotientVector a = quotient_project(d, dz(1), p);
  EXPECT_DOUBLE_EQ(a[0], 1.0);
  EXPECT_DOUBLE_EQ(a[1], 0.0);
  QuotientVector b = quotient_project(d, d.framing()[2], p);
  EXPECT_NEAR(b[0], 0.0, 1e-15);
  EXPECT_NEAR(b[1], 0.0, 1e-15);
  VectorField w = Expr(3.0) * dz(1) - Expr(2.0) * dz(2) + d.framing()[1];
  QuotientVector c = quotient_project(d, w, p);
  EXPECT_NEAR(c[0], 3.0, 1e-15);
  EXPECT_NEAR(c[1], -2.0, 1e-15);
}

TEST(QuotientProject, NeedsReeb) {
  Distribution d = build_distribution(one(kL1), one(kL2), paper_framing(), Box::cube(2.0));
  EXPECT_THROW(quotient_project(d, dz(1), Point{}), DistributionError);
}

TEST(Levi, PaperSlotOneThree) {
  // λ1([X1, X3]) = λ1(∂z1) = 1.
  LeviData l = levi_matrix(paper(), at_x2(0.0));
  EXPECT_NEAR(l.levi[0](0, 2), 1.0, 1e-14);
  EXPECT_NEAR(l.levi[0](2, 0), -1.0, 1e-14);
  EXPECT_LT(l.cross_check, 1e-12);
}

TEST(Levi, Antisymmetric) {
  QuasiRandomSampler s(Box::cube(2.0), 5);
  for (int n = 0; n < 10; ++n) {
    LeviData l = levi_matrix(paper(), s.next());
    for (int k = 0; k < 2; ++k) EXPECT_LT(max_abs(l.levi[k] + transpose(l.levi[k])), 1e-14);
  }
}

TEST(Levi, HyperbolicComponentsDecouple) {
  LeviData l = levi_matrix(corank2::testing::hyperbolic(), Point{0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      bool s1 = (i == 0 && j == 2) || (i == 2 && j == 0);
      bool s2 = (i == 1 && j == 3) || (i == 3 && j == 1);
      if (!s1) EXPECT_EQ(l.levi[0](i, j), 0.0) << i << j;
      if (!s2) EXPECT_EQ(l.levi[1](i, j), 0.0) << i << j;
    }
  EXPECT_NE(l.levi[0](0, 2), 0.0);
  EXPECT_NE(l.levi[1](1, 3), 0.0);
}

TEST(DualCurvature, Lambda2) {
  const Distribution& d = paper();
  Matrix<Expr, 4, 4> m = dual_curvature(d, d.lambda(1));
  Point p{0.3, -0.2, 0.7, 0.1, 0.5, -0.4};
  // dx1∧dy2 + dx2∧dy1 on a framing whose (x, y) block is the identity.
  double expected[4][4] = {{0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {-1, 0, 0, 0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(eval_real(m(i, j), p), expected[i][j], 1e-15);
}

TEST(DualCurvature, ZeroForm) {
  Matrix<Expr, 4, 4> m = dual_curvature(paper(), Form(1));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_TRUE(m(i, j).is_zero());
}

TEST(DualCurvature, ComplexRootCombination) {
  const Distribution& d = paper();
  Expr t = parse_expr("(x2^2 + 1)/2 + 1i*sqrt(3 - 2*x2^2 - x2^4)/2");
  Form psi = d.lambda(0) + t * d.lambda(1);
  Box band = Box::cube(1.0).with(Coordinate::x2, -0.9, 0.9);
  Distribution db = build_distribution(d.lambda(0), d.lambda(1), d.framing(), band);
  Matrix<Expr, 4, 4> m = dual_curvature(db, psi);
  Expr c = parse_expr("x2^2 + 1");
  // −dx1∧dy1 + dx2∧dy2 + (t − x2² − 1)dx2∧dy1 + t dx1∧dy2
  EXPECT_TRUE(expr_equal_sampled(m(0, 2), Expr(-1.0), band, 30, 1e-12));
  EXPECT_TRUE(expr_equal_sampled(m(1, 3), Expr(1.0), band, 30, 1e-12));
  EXPECT_TRUE(expr_equal_sampled(m(1, 2), t - c, band, 30, 1e-12));
  EXPECT_TRUE(expr_equal_sampled(m(0, 3), t, band, 30, 1e-12));
  EXPECT_TRUE(expr_equal_sampled(m(0, 1), Expr(0.0), band, 30, 1e-12));
  EXPECT_TRUE(expr_equal_sampled(m(2, 3), Expr(0.0), band, 30, 1e-12));
}

TEST(DualCurvature, RejectsFormOutsideAnnihilator) {
  EXPECT_THROW(dual_curvature(paper(), Form::differential(Coordinate::x1)), DistributionError);
}

TEST(Reeb, CatalogPairsPass) {
  for (const Distribution* d : {&paper(), &corank2::testing::flat()}) {
    ReebReport r = verify_reeb(*d, dz(1), dz(2));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.samples, 50);
    ASSERT_TRUE(r.attached.has_value());
    EXPECT_TRUE(r.attached->has_reeb());
  }
}

TEST(Reeb, WrongPairFailsNormalization) {
  ReebReport r = verify_reeb(paper(), VectorField::coordinate(Coordinate::x1), dz(2));
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.conditions[1].passed);
  EXPECT_FALSE(r.attached.has_value());
}

TEST(Reeb, SwapInvariance) {
  Distribution swapped = build_distribution(one(kL2), one(kL1), paper_framing(), Box::cube(2.0));
  ReebReport a = verify_reeb(paper(), dz(1), dz(2));
  ReebReport b = verify_reeb(swapped, dz(2), dz(1));
  for (int c = 0; c < 4; ++c) EXPECT_EQ(a.conditions[c].passed, b.conditions[c].passed);
  ReebReport bad_a = verify_reeb(paper(), VectorField::coordinate(Coordinate::x1), dz(2));
  ReebReport bad_b = verify_reeb(swapped, dz(2), VectorField::coordinate(Coordinate::x1));
  for (int c = 0; c < 4; ++c) EXPECT_EQ(bad_a.conditions[c].passed, bad_b.conditions[c].passed);
}
