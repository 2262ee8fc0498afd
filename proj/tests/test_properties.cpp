#include <gtest/gtest.h>

#include <random>

#include "corank2/oracle.hpp"
#include "support.hpp"

using namespace corank2;
using corank2::testing::flat;
using corank2::testing::paper;
using corank2::testing::RandomExpr;

namespace {

const Box kUnit = Box::cube(1.0);

Form random_form(RandomExpr& gen, std::mt19937_64& rng, int degree, int terms = 3) {
  Form f(degree);
  std::vector<MultiIndex> masks;
  for (unsigned m = 0; m < 64; ++m)
    if (std::popcount(m) == degree) masks.push_back(static_cast<MultiIndex>(m));
  for (int t = 0; t < terms; ++t) f.add(masks[rng() % masks.size()], gen(2));
  return f;
}

VectorField random_field(RandomExpr& gen) {
  VectorField v;
  for (int k = 0; k < kDim; ++k) v[k] = gen(2);
  return v;
}

double max_coefficient_gap(const Form& a, const Form& b, const Box& box, int n = 10) {
  Form diff = a - b;
  double worst = 0.0;
  for (const auto& [m, c] : diff.terms()) worst = std::max(worst, max_sampled_difference(c, Expr(0.0), box, n));
  return worst;
}

std::vector<const Distribution*> elliptic_models() {
  static const Distribution hk = load_model("h_kappa", std::string("sin(y1)")).distribution;
  static const Distribution gx = load_model("global_xi").distribution;
  return {&paper(), &flat(), &hk, &gx};
}

/// Oracle-admissible box: |x2| ≤ 0.8, or its image under the globalization map.
Box admissible(const Distribution& d) {
  double a = d.domain().hi[1] > 100.0 ? std::tan(0.4 * kPi) : 0.8;
  return Box::cube(1.5).with(Coordinate::x2, -a, a);
}

std::vector<Point> elliptic_points(const Distribution& d, int n, std::uint64_t seed) {
  std::vector<Point> pts;
  QuasiRandomSampler s(admissible(d), seed);
  while (static_cast<int>(pts.size()) < n) {
    Point p = s.next();
    if (classify_point(d, p).kind == Kind::Elliptic) pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST(ScalarProperties, DerivativeMatchesFiniteDifference) {
  RandomExpr gen(101);
  QuasiRandomSampler s(Box::cube(0.9), 102);
  const double h = 1e-5;
  for (int n = 0; n < 100; ++n) {
    Expr e = gen(3);
    Coordinate v = gen.coordinate();
    Point p = s.next();
    Point up = p, dn = p;
    up[index_of(v)] += h;
    dn[index_of(v)] -= h;
    double fd = (eval_real(e, up) - eval_real(e, dn)) / (2.0 * h);
    double sym = eval_real(differentiate(e, v), p);
    EXPECT_LE(std::abs(sym - fd) / (1.0 + std::abs(eval_real(e, p))), 1e-6) << to_string(e);
  }
}

TEST(ScalarProperties, LinearityAndLeibniz) {
  RandomExpr gen(103);
  for (int n = 0; n < 30; ++n) {
    Expr a = gen(3), b = gen(3);
    Coordinate v = gen.coordinate();
    EXPECT_TRUE(expr_equal_sampled(differentiate(a + b, v), differentiate(a, v) + differentiate(b, v), kUnit, 20, 1e-9));
    EXPECT_TRUE(expr_equal_sampled(differentiate(a * b, v), a * differentiate(b, v) + b * differentiate(a, v), kUnit, 20,
                                   1e-9));
  }
}

TEST(ScalarProperties, PrintParseRoundTrip) {
  RandomExpr gen(104);
  QuasiRandomSampler s(kUnit, 105);
  for (int n = 0; n < 100; ++n) {
    Expr e = gen(4);
    Expr back = parse_expr(to_string(e));
    for (int k = 0; k < 5; ++k) {
      Point p = s.next();
      double a = eval_real(e, p), b = eval_real(back, p);
      EXPECT_LE(std::abs(a - b), 1e-12 * (1.0 + std::abs(a))) << to_string(e);
    }
  }
}

TEST(FormProperties, GradedAnticommutativity) {
  RandomExpr gen(201);
  std::mt19937_64 rng(202);
  for (int n = 0; n < 100; ++n) {
    int p = static_cast<int>(rng() % 4), q = static_cast<int>(rng() % 3);
    Form a = random_form(gen, rng, p, 2), b = random_form(gen, rng, q, 2);
    Form ab = wedge(a, b), ba = wedge(b, a);
    Form rhs = (p * q) % 2 ? -ba : ba;
    EXPECT_LE(max_coefficient_gap(ab, rhs, kUnit, 5), 1e-12);
  }
}

TEST(FormProperties, DSquaredVanishes) {
  RandomExpr gen(203);
  std::mt19937_64 rng(204);
  for (int n = 0; n < 50; ++n) {
    Form a = random_form(gen, rng, n % 5, 2);
    Form dd = exterior_derivative(exterior_derivative(a));
    EXPECT_LE(max_coefficient_gap(dd, Form(dd.degree()), kUnit, 5), 1e-9);
  }
}

TEST(FormProperties, CartanFormula) {
  RandomExpr gen(205);
  std::mt19937_64 rng(206);
  for (int n = 0; n < 30; ++n) {
    Form a = random_form(gen, rng, 1, 3);
    VectorField x = random_field(gen), y = random_field(gen);
    Expr lhs = evaluate_on(exterior_derivative(a), {x, y});
    Expr rhs = x.apply(evaluate_on(a, {y})) - y.apply(evaluate_on(a, {x})) - evaluate_on(a, {lie_bracket(x, y)});
    EXPECT_LE(max_sampled_difference(lhs, rhs, kUnit, 10), 1e-8);
  }
}

TEST(FormProperties, Jacobi) {
  RandomExpr gen(207);
  for (int n = 0; n < 30; ++n) {
    VectorField x = random_field(gen), y = random_field(gen), z = random_field(gen);
    VectorField j = lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) + lie_bracket(z, lie_bracket(x, y));
    std::vector<Expr> coeffs(j.coefficients().begin(), j.coefficients().end());
    ExprTape tape(coeffs);
    QuasiRandomSampler s(kUnit, 208 + n);
    for (int k = 0; k < 5; ++k)
      for (const auto& v : tape.evaluate<double>(s.next())) EXPECT_LE(std::abs(v.re), 1e-8);
  }
}

TEST(FormProperties, PullbackPushforwardDuality) {
  CoordinateMap phi = globalization_map();
  Box source = Box::cube(1.0).with(Coordinate::x2, -0.9, 0.9);
  RandomExpr gen(209);
  std::mt19937_64 rng(210);
  for (int n = 0; n < 10; ++n) {
    Form a = random_form(gen, rng, 1, 3);
    VectorField x = random_field(gen);
    // (φ*a)(X) at x equals a(φ_*X) at φ(x).
    Expr lhs = evaluate_on(pullback(phi, a), {x});
    Expr rhs = substitute(evaluate_on(a, {pushforward_field(phi, x)}), phi.forward);
    EXPECT_LE(max_sampled_difference(lhs, rhs, source, 10), 1e-8);
  }
}

TEST(DistributionProperties, LeviCrossCheck) {
  std::vector<const Distribution*> all = elliptic_models();
  all.push_back(&corank2::testing::hyperbolic());
  for (const Distribution* d : all) {
    QuasiRandomSampler s(d->domain(), 301);
    for (int n = 0; n < 100; ++n) EXPECT_LT(levi_matrix(*d, s.next()).cross_check, 1e-8);
  }
}

TEST(DistributionProperties, QuotientAnnihilatesFraming) {
  for (const Distribution* d : elliptic_models()) {
    QuasiRandomSampler s(d->domain(), 302);
    for (int n = 0; n < 10; ++n) {
      Point p = s.next();
      for (const auto& x : d->framing()) {
        QuotientVector q = quotient_project(*d, x, p);
        EXPECT_LT(std::max(std::abs(q[0]), std::abs(q[1])), 1e-12);
      }
    }
  }
}

TEST(PipelineProperties, ComplexBilinearCondition) {
  for (const Distribution* d : elliptic_models())
    for (const Point& p : elliptic_points(*d, 50, 401)) EXPECT_LT(check_conditions(*d, p).bilinear, 1e-7);
}

TEST(PipelineProperties, MixedCondition) {
  for (const Point& p : elliptic_points(paper(), 20, 402)) EXPECT_LT(check_conditions(paper(), p).mixed, 1e-6);
}

TEST(PipelineProperties, ConjugateRootSignRobustness) {
  PipelineOptions up, low;
  up.root = RootChoice::Upper;
  low.root = RootChoice::Lower;
  for (const Distribution* d : elliptic_models())
    for (const Point& p : elliptic_points(*d, 5, 403)) {
      ComplexStructureData a = canonical_J(*d, p, up), b = canonical_J(*d, p, low);
      EXPECT_LT(max_abs(a.j_D + b.j_D), 1e-10);
      EXPECT_LT(max_abs(a.j_Q + b.j_Q), 1e-10);
      STensorReport sa = s_tensor(*d, p, up), sb = s_tensor(*d, p, low);
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 4; ++k)
          for (int c = 0; c < 2; ++c) EXPECT_NEAR(sa.values[i][k][c], sb.values[i][k][c], 1e-7);
    }
}

TEST(PipelineProperties, ComplexScaleInvariance) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const Point& p : elliptic_points(paper(), 20, 405)) {
    ComplexStructureData base = canonical_J(paper(), p);
    PipelineOptions po;
    po.psi_scale = {u(rng), u(rng)};
    ComplexStructureData s = canonical_J(paper(), p, po);
    EXPECT_LT(max_abs_diff(s.j_D, base.j_D), 1e-10);
    EXPECT_LT(max_abs_diff(s.j_Q, base.j_Q), 1e-10);
  }
}

TEST(PipelineProperties, FactorizationResiduals) {
  for (const Distribution* d : elliptic_models())
    for (const Point& p : elliptic_points(*d, 20, 406)) {
      ComplexStructureData s = canonical_J(*d, p);
      EXPECT_LT(s.factorization.plucker_residual, 1e-9);
      EXPECT_LT(s.factorization.wedge_residual, 1e-9);
    }
}

TEST(PipelineProperties, ObstructionMatchesA1A2ClosedForms) {
  // Fails: the closed forms (A1, A2) do not describe S(∂z2, ν) for this model;
  // the S value is (8x2/Δ⁴)(1, −(x2²+1)/2), checked in STensor.PaperReebAgainstNu.
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    double x = -0.95 + 1.9 * (i + 0.5) / 50.0;
    STensorReport s = s_tensor(paper(), corank2::testing::at_x2(x));
    auto a = a1_a2_closed_form(x);
    worst = std::max({worst, std::abs(s.values[1][1][0] - a[0]), std::abs(s.values[1][1][1] - a[1])});
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(OracleProperties, AgreementOnCatalogModels) {
  for (const Distribution* d : elliptic_models())
    for (const Point& p : elliptic_points(*d, 30, 501)) {
      OracleResult r = numeric_oracle(*d, p);
      EXPECT_LE(r.delta_qd, 1e-6);
      EXPECT_LE(r.delta_j, 1e-6);
      EXPECT_LE(r.delta_s, 1e-5);
    }
}

TEST(OracleProperties, FlatDuality) {
  QuasiRandomSampler s(Box::cube(1.5), 502);
  for (int n = 0; n < 20; ++n) {
    Point p = s.next();
    EXPECT_EQ(classify_point(flat(), p).kind, Kind::Elliptic);
    EXPECT_LT(s_tensor(flat(), p).frobenius_norm, 1e-9);
    EXPECT_EQ(classify_point(corank2::testing::hyperbolic(), p).kind, Kind::Hyperbolic);
    EXPECT_THROW(canonical_J(corank2::testing::hyperbolic(), p), NonEllipticError);
  }
}
