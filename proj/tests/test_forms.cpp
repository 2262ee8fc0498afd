#include <gtest/gtest.h>

#include "corank2/catalog.hpp"
#include "corank2/forms.hpp"
#include "support.hpp"

using namespace corank2;

namespace {

constexpr MultiIndex kTau = 0b1111;  // dx1∧dx2∧dy1∧dy2
const Box kUnit = Box::cube(1.0);
const Box kBand = Box::cube(1.0).with(Coordinate::x2, -0.99, 0.99);

MultiIndex mi(std::initializer_list<Coordinate> cs) {
  unsigned m = 0;
  for (auto c : cs) m |= 1u << index_of(c);
  return static_cast<MultiIndex>(m);
}

Form one(const char* s) { return Form::parse_one_form(s); }

const Form& lambda1() {
  static const Form f = one("dz1 - y1*dx1 - y2*dx2 - (x2^3/3 + x2 + 2*x1)*dy1");
  return f;
}
const Form& lambda2() {
  static const Form f = one("dz2 - y2*dx1 - y1*dx2");
  return f;
}

bool forms_equal(const Form& a, const Form& b, const Box& box, double tol = 1e-12) {
  if (a.degree() != b.degree()) return false;
  Form diff = a - b;
  for (const auto& [m, c] : diff.terms())
    if (!expr_equal_sampled(c, Expr(0.0), box, 30, tol)) return false;
  return true;
}

bool fields_equal(const VectorField& a, const VectorField& b, const Box& box, double tol = 1e-12) {
  for (int k = 0; k < kDim; ++k)
    if (!expr_equal_sampled(a[k], b[k], box, 30, tol)) return false;
  return true;
}

}  // namespace

TEST(Wedge, CurvatureSquares) {
  Form d1 = exterior_derivative(lambda1()), d2 = exterior_derivative(lambda2());
  Form sq = wedge(d1, d1);
  ASSERT_EQ(sq.terms().size(), 1u);
  EXPECT_TRUE(expr_equal_sampled(sq.coefficient(kTau), Expr(2.0), kUnit, 20, 1e-14));
  Form mixed = wedge(d1, d2);
  ASSERT_EQ(mixed.terms().size(), 1u);
  EXPECT_TRUE(expr_equal_sampled(mixed.coefficient(kTau), parse_expr("-x2^2 - 1"), Box::cube(2.0), 50, 1e-12));
}

TEST(Wedge, Anticommutative) {
  Form dx1 = Form::differential(Coordinate::x1);
  EXPECT_TRUE(wedge(dx1, dx1).is_zero());
  Form dy1 = Form::differential(Coordinate::y1);
  Form a = wedge(dx1, dy1), b = wedge(dy1, dx1);
  EXPECT_TRUE(forms_equal(a, -b, kUnit));
}

TEST(Wedge, DegreeOverflow) {
  Form a = wedge(wedge(exterior_derivative(lambda1()), Form::differential(Coordinate::z1)), Form::differential(Coordinate::z2));
  EXPECT_EQ(a.degree(), 4);
  EXPECT_EQ(wedge(a, exterior_derivative(lambda2())).degree(), 6);
  EXPECT_THROW(wedge(a, wedge(exterior_derivative(lambda2()), Form::differential(Coordinate::x1))), DegreeError);
}

TEST(ExteriorDerivative, Lambda2) {
  Form expected = wedge(Form::differential(Coordinate::x1), Form::differential(Coordinate::y2)) +
                  wedge(Form::differential(Coordinate::x2), Form::differential(Coordinate::y1));
  EXPECT_TRUE(forms_equal(exterior_derivative(lambda2()), expected, kUnit));
}

TEST(ExteriorDerivative, SquareIsZero) {
  Form dd = exterior_derivative(exterior_derivative(lambda1()));
  EXPECT_EQ(dd.degree(), 3);
  EXPECT_TRUE(forms_equal(dd, Form(3), kUnit));
}

TEST(ExteriorDerivative, KappaTermDrops) {
  Form a = one("dz1 - y1*dx1 - y2*dx2 - (x2^3/3 + x2 + 2*x1 + y1^2)*dy1");
  EXPECT_TRUE(forms_equal(exterior_derivative(a), exterior_derivative(lambda1()), Box::cube(2.0)));
}

TEST(InteriorProduct, Examples) {
  Form c = interior_product(VectorField::coordinate(Coordinate::z1), exterior_derivative(lambda1()));
  EXPECT_TRUE(forms_equal(c, Form(1), kUnit));
  Form dx1dy1 = wedge(Form::differential(Coordinate::x1), Form::differential(Coordinate::y1));
  EXPECT_TRUE(forms_equal(interior_product(VectorField::coordinate(Coordinate::x1), dx1dy1),
                          Form::differential(Coordinate::y1), kUnit));
  VectorField x3 = VectorField::parse("d/dy1 + (x2^3/3 + x2 + 2*x1)*d/dz1");
  Form v = interior_product(x3, lambda1());
  EXPECT_EQ(v.degree(), 0);
  EXPECT_TRUE(forms_equal(v, Form(0), Box::cube(2.0)));
  EXPECT_THROW(interior_product(x3, Form::function(Expr(1.0))), DegreeError);
}

TEST(LieBracket, ReebFieldsCommute) {
  VectorField b = lie_bracket(VectorField::coordinate(Coordinate::z1), VectorField::coordinate(Coordinate::z2));
  for (int k = 0; k < kDim; ++k) EXPECT_TRUE(b[k].is_zero());
}

TEST(LieBracket, RotatedReebAgainstNu) {
  Expr dl = parse_expr("sqrt(3 - 2*x2^2 - x2^4)");
  Expr c = parse_expr("x2^2 + 1");
  VectorField jr = Expr(-2.0) / dl * VectorField::coordinate(Coordinate::z1) + c / dl * VectorField::coordinate(Coordinate::z2);
  VectorField nu = VectorField::parse("d/dx2 + y2*d/dz1 + y1*d/dz2");
  VectorField expected = differentiate(Expr(2.0) / dl, Coordinate::x2) * VectorField::coordinate(Coordinate::z1) -
                         differentiate(c / dl, Coordinate::x2) * VectorField::coordinate(Coordinate::z2);
  EXPECT_TRUE(fields_equal(lie_bracket(jr, nu), expected, kBand, 1e-10));
}

TEST(LieBracket, FramingPairOneThree) {
  // Brute force: X1(B)∂z1 − X3(y1)∂z1 = 2∂z1 − ∂z1.
  VectorField x1 = VectorField::parse("d/dx1 + y1*d/dz1 + y2*d/dz2");
  VectorField x3 = VectorField::parse("d/dy1 + (x2^3/3 + x2 + 2*x1)*d/dz1");
  EXPECT_TRUE(fields_equal(lie_bracket(x1, x3), VectorField::coordinate(Coordinate::z1), Box::cube(2.0)));
}

TEST(Pullback, GlobalizedForms) {
  CoordinateMap phi = globalization_map();
  Box target = Box::cube(2.0).with(Coordinate::x2, -50.0, 50.0);
  Form beta2 = one("dz2 - y2*dx1 - 2*y1/(pi*(1 + x2^2))*dx2");
  Form beta1 = one("dz1 - y1*dx1 - 2*y2/(pi*(1 + x2^2))*dx2 - (8/(3*pi^3)*atan(x2)^3 + 2/pi*atan(x2) + 2*x1)*dy1");
  EXPECT_TRUE(forms_equal(pullback(phi.inverted(), lambda2()), beta2, target, 1e-12));
  EXPECT_TRUE(forms_equal(pullback(phi.inverted(), lambda1()), beta1, target, 1e-10));
}

TEST(Pullback, Identity) {
  EXPECT_TRUE(forms_equal(pullback(CoordinateMap::identity(), lambda1()), lambda1(), Box::cube(2.0)));
}

TEST(Pullback, CommutesWithWedgeAndD) {
  CoordinateMap phi = globalization_map().inverted();
  Box target = Box::cube(2.0).with(Coordinate::x2, -20.0, 20.0);
  Form a = lambda1(), b = lambda2();
  EXPECT_TRUE(forms_equal(pullback(phi, wedge(a, b)), wedge(pullback(phi, a), pullback(phi, b)), target, 1e-10));
  EXPECT_TRUE(forms_equal(pullback(phi, exterior_derivative(a)), exterior_derivative(pullback(phi, a)), target, 1e-10));
}

TEST(Pullback, CompositionCheck) {
  CoordinateMap phi = globalization_map();
  Box source = Box::cube(1.0).with(Coordinate::x2, -0.9, 0.9);
  Box target = Box::cube(1.0).with(Coordinate::x2, -5.0, 5.0);
  EXPECT_NO_THROW(verify_invertible(phi, source, target));
  CoordinateMap bad = phi;
  bad.inverse[index_of(Coordinate::x2)] = atan(var(Coordinate::x2));
  EXPECT_THROW(verify_invertible(bad, source, target), CompositionError);
}

TEST(Pushforward, CoordinateFields) {
  CoordinateMap phi = globalization_map();
  Box target = Box::cube(2.0).with(Coordinate::x2, -50.0, 50.0);
  EXPECT_TRUE(fields_equal(pushforward_field(phi, VectorField::coordinate(Coordinate::z1)),
                           VectorField::coordinate(Coordinate::z1), target));
  VectorField expected = parse_expr("pi/2*(1 + x2^2)") * VectorField::coordinate(Coordinate::x2);
  EXPECT_TRUE(fields_equal(pushforward_field(phi, VectorField::coordinate(Coordinate::x2)), expected, target, 1e-9));
}

TEST(Pushforward, FramingAnnihilatedByGlobalForms) {
  CoordinateMap phi = globalization_map();
  Distribution global = load_model("global_xi").distribution;
  Distribution local = corank2::testing::paper();
  Box target = Box::cube(2.0).with(Coordinate::x2, -50.0, 50.0);
  for (const auto& x : local.framing()) {
    VectorField px = pushforward_field(phi, x);
    for (int i = 0; i < 2; ++i)
      EXPECT_TRUE(expr_equal_sampled(evaluate_on(global.lambda(i), {px}), Expr(0.0), target, 50, 1e-10));
  }
}
